#include "fracjac/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>

#include "fracjac/degree.hpp"
#include "fracjac/errors.hpp"
#include "fracjac/extension.hpp"
#include "fracjac/field_library.hpp"
#include "fracjac/frac_norms.hpp"
#include "fracjac/jacobian.hpp"
#include "fracjac/measures.hpp"
#include "fracjac/mollifier.hpp"
#include "fracjac/parallel.hpp"
#include "fracjac/sampler.hpp"
#include "fracjac/spec_string.hpp"
#include "fracjac/sublevel.hpp"
#include "fracjac/tv_estimate.hpp"

namespace fracjac {

namespace {
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string num(double v)
{
    std::ostringstream s;
    s << v;
    return s.str();
}

Mat mat2(double a, double b, double c, double d)
{
    Mat m(2, 2);
    m << a, b, c, d;
    return m;
}

Vec vec2(double a, double b)
{
    Vec v(2);
    v << a, b;
    return v;
}

/// Evaluates g on every target in parallel; std::nullopt marks a skipped
/// target. Results are reduced in target order.
struct MonteCarlo {
    std::vector<double> used;
    std::size_t skipped = 0;
};

MonteCarlo run_targets(const std::vector<Vec>& targets, const std::function<std::optional<double>(const Vec&)>& g,
                       std::size_t workers)
{
    std::vector<double> values(targets.size(), 0.0);
    std::vector<char> skip(targets.size(), 0);
    parallel_for_blocks(
        targets.size(),
        [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                const auto v = g(targets[i]);
                if (v)
                    values[i] = *v;
                else
                    skip[i] = 1;
            }
        },
        workers);
    MonteCarlo mc;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (skip[i])
            ++mc.skipped;
        else
            mc.used.push_back(values[i]);
    }
    return mc;
}

struct WeakValues {
    double lhs = 0.0, rhs = 0.0, se = 0.0;
    std::size_t skipped = 0, samples = 0;
};

WeakValues weak_once(const VectorField& u, const ChangeOfVariables* f, const TestFunction& psi, const Domain& omega,
                     const SamplerSpec& spec, std::size_t workers)
{
    WeakValues w;
    const VectorField lhs_field = f ? compose(f->field(), u) : u;
    w.lhs = jacobian_pairing(lhs_field, psi, omega, PairingMode::direct, {}, workers);
    Vec lo, hi;
    support_image_box(u, psi, omega, spec.margin, lo, hi);
    BoxSampler sampler(lo, hi, spec.seed);
    const std::vector<Vec> targets = sampler.draw(spec.samples);
    const DegreeSolver solver(u, omega, workers);
    const MonteCarlo mc = run_targets(
        targets,
        [&](const Vec& a) -> std::optional<double> {
            try {
                const AtomicMeasure mu = atomic_from_regular_value(solver, a);
                const double factor = f ? f->det(a) : 1.0;
                return factor * pair_atomic(mu, psi) / mu.scale;
            } catch (const BoundaryValue&) {
                return std::nullopt;
            } catch (const SingularValue&) {
                return std::nullopt;
            }
        },
        workers);
    const SampleStats stats = sample_stats(mc.used);
    w.rhs = sampler.volume() * stats.mean;
    w.se = sampler.volume() * stats.standard_error;
    w.skipped = mc.skipped;
    w.samples = targets.size();
    return w;
}

ExperimentReport weak_impl(const std::string& name, const VectorField& u, const ChangeOfVariables* f,
                           const TestFunction& psi, const Domain& omega, const SamplerSpec& spec,
                           std::vector<double> mollify, std::size_t workers)
{
    const auto start = Clock::now();
    psi.check_support(omega);
    ExperimentReport r;
    r.experiment = name;
    r.inputs = {{"field", u.name()}, {"test", psi.name()}, {"domain", omega.describe()},
                {"samples", std::to_string(spec.samples)}, {"margin", num(spec.margin)}};
    if (f) r.inputs["F"] = f->name();
    r.seed = spec.seed;
    r.samples = spec.samples;
    r.tol_rel = 0.02;
    r.tol_sigma = 3.0;
    r.tol_abs = 1e-12;

    if (u.smoothness().kind == Smoothness::smooth) {
        const WeakValues w = weak_once(u, f, psi, omega, spec, workers);
        r.lhs = w.lhs;
        r.rhs = w.rhs;
        r.standard_error = w.se;
        r.skipped = w.skipped;
    } else {
        // Rough fields enter only through mollified slices.
        std::sort(mollify.begin(), mollify.end());
        if (mollify.size() < 2) throw InvalidParameter("rough fields need two mollification scales");
        const double t1 = mollify[0], t2 = mollify[1];
        const ExtensionField U(u, Mollifier(omega.dimension()), omega);
        const WeakValues w1 = weak_once(U.slice(t1), f, psi, omega, spec, workers);
        const WeakValues w2 = weak_once(U.slice(t2), f, psi, omega, spec, workers);
        const double c = t1 / (t2 - t1);
        r.lhs = w1.lhs - c * (w2.lhs - w1.lhs);
        r.rhs = w1.rhs - c * (w2.rhs - w1.rhs);
        r.standard_error = (1.0 + c) * w1.se + c * w2.se;
        r.skipped = std::max(w1.skipped, w2.skipped);
        r.rows.push_back({{"t", t1}, {"lhs", w1.lhs}, {"rhs", w1.rhs}, {"standard_error", w1.se}});
        r.rows.push_back({{"t", t2}, {"lhs", w2.lhs}, {"rhs", w2.rhs}, {"standard_error", w2.se}});
        r.notes.push_back("rough field: values extrapolated to t = 0 from the two smallest mollification scales");
        r.inputs["mollify"] = num(t1) + "," + num(t2);
    }
    r.skip_fraction = r.samples ? static_cast<double>(r.skipped) / r.samples : 0.0;
    r.unreliable = r.skip_fraction > 0.1;
    if (r.unreliable) r.notes.push_back("skip fraction above 10%: estimate unreliable");
    finalize_gap(r);
    r.runtime_ms = elapsed_ms(start);
    return r;
}

VectorField as_field(const TestFunction& psi)
{
    return VectorField(
        psi.name(), psi.dimension(), 1, [psi](const Vec& x) { return Vec::Constant(1, psi.value(x)); },
        [psi](const Vec& x) -> Mat { return psi.gradient(x).transpose(); });
}
}  // namespace

ChangeOfVariables::ChangeOfVariables(VectorField f, double lipschitz) : f_(std::move(f)), lipschitz_(lipschitz)
{
    if (f_.input_dim() != f_.output_dim()) throw InvalidParameter("change of variables must map R^n to R^n");
    if (!(lipschitz > 0.0)) throw InvalidParameter("Lipschitz bound must be positive");
}

ChangeOfVariables ChangeOfVariables::identity(int n)
{
    return ChangeOfVariables(fields::identity(n), 1.0);
}

ChangeOfVariables ChangeOfVariables::linear(const Mat& a)
{
    const double norm = std::max(operator_norm(a), 1e-300);
    return ChangeOfVariables(fields::affine(a, Vec::Zero(a.rows())).renamed("linear"), norm);
}

double ChangeOfVariables::det(const Vec& y) const
{
    return det_expansion(gradient(f_, y));
}

double ChangeOfVariables::check_lipschitz(std::size_t pairs, std::uint64_t seed, double extent) const
{
    const int n = f_.input_dim();
    BoxSampler sampler(Vec::Constant(n, -extent), Vec::Constant(n, extent), seed);
    double worst = 0.0;
    for (std::size_t k = 0; k < pairs; ++k) {
        const Vec x = sampler.next();
        const Vec y = sampler.next();
        const double d = (x - y).norm();
        if (d == 0.0) continue;
        worst = std::max(worst, (f_(x) - f_(y)).norm() / d);
    }
    if (worst > lipschitz_ * (1.0 + 1e-9))
        throw InvalidParameter("change of variables " + name() + " exceeds its Lipschitz bound: " + num(worst));
    return worst;
}

ChangeOfVariables parse_change_of_variables(const std::string& text)
{
    const SpecString spec = SpecString::parse(text);
    const std::string& kind = spec.name();
    if (kind == "identity") {
        spec.only({});
        return ChangeOfVariables::identity(2);
    }
    if (kind == "linear") {
        spec.only({"a11", "a12", "a21", "a22"});
        return ChangeOfVariables::linear(mat2(spec.number("a11", 1.0), spec.number("a12", 0.0),
                                              spec.number("a21", 0.0), spec.number("a22", 1.0)));
    }
    if (kind == "sinpert") {
        spec.only({"eps"});
        const double e = spec.number("eps", 0.1);
        VectorField f(
            "sinpert", 2, 2, [e](const Vec& y) { return vec2(y(0) + e * std::sin(y(1)), y(1) + e * std::sin(y(0))); },
            [e](const Vec& y) { return mat2(1.0, e * std::cos(y(1)), e * std::cos(y(0)), 1.0); });
        return ChangeOfVariables(f, 1.0 + std::abs(e));
    }
    if (kind == "shear") {
        spec.only({"c"});
        const double c = spec.number("c", 0.5);
        VectorField f(
            "shear", 2, 2, [c](const Vec& y) { return vec2(y(0) + c * std::tanh(y(1)), y(1)); },
            [c](const Vec& y) {
                const double sech = 1.0 / std::cosh(y(1));
                return mat2(1.0, c * sech * sech, 0.0, 1.0);
            });
        // Operator norm of [[1, s], [0, 1]] is (|s| + sqrt(s^2 + 4)) / 2.
        return ChangeOfVariables(f, 0.5 * (std::abs(c) + std::sqrt(c * c + 4.0)));
    }
    if (kind == "twist") {
        spec.only({"c"});
        const double c = spec.number("c", 0.25);
        VectorField f(
            "twist", 2, 2,
            [c](const Vec& y) {
                return vec2(y(0) + c * std::sin(y(0) + y(1)), y(1) - c * std::cos(y(0) - y(1)));
            },
            [c](const Vec& y) {
                const double a = c * std::cos(y(0) + y(1));
                const double b = c * std::sin(y(0) - y(1));
                return mat2(1.0 + a, a, b, 1.0 - b);
            });
        // |grad F - I| <= |c| sqrt(2) + |c| sqrt(2) in Frobenius norm.
        return ChangeOfVariables(f, 1.0 + 2.0 * std::sqrt(2.0) * std::abs(c));
    }
    throw ConfigError("unknown change of variables '" + kind + "'");
}

bool gap_within_tolerance(const ExperimentReport& r)
{
    const double se = r.standard_error > 0.0 ? r.standard_error : 0.0;
    if (std::isfinite(r.lhs_upper)) {
        const double lo = r.rhs - r.tol_sigma * se, hi = r.rhs + r.tol_sigma * se;
        return hi * (1.0 + r.tol_rel) + r.tol_abs >= r.lhs && lo * (1.0 - r.tol_rel) - r.tol_abs <= r.lhs_upper;
    }
    bool rows_ok = true;
    for (const auto& row : r.rows) {
        const auto it = row.find("ok");
        if (it != row.end() && it->second == 0.0) rows_ok = false;
    }
    const double gap = std::abs(r.lhs - r.rhs);
    return rows_ok && gap <= r.tol_sigma * se + r.tol_rel * std::abs(r.lhs) + r.tol_abs;
}

void finalize_gap(ExperimentReport& r)
{
    r.abs_gap = std::abs(r.lhs - r.rhs);
    r.rel_gap = r.lhs != 0.0 ? r.abs_gap / std::abs(r.lhs) : (r.abs_gap == 0.0 ? 0.0 : INFINITY);
    r.pass = gap_within_tolerance(r);
}

ExperimentReport weak_coarea_experiment(const VectorField& u, const TestFunction& psi, const Domain& omega,
                                        const SamplerSpec& sampler, std::vector<double> mollify, std::size_t workers)
{
    return weak_impl("weak_coarea", u, nullptr, psi, omega, sampler, std::move(mollify), workers);
}

ExperimentReport weak_chain_experiment(const VectorField& u, const ChangeOfVariables& f, const TestFunction& psi,
                                       const Domain& omega, const SamplerSpec& sampler, std::vector<double> mollify,
                                       std::size_t workers)
{
    return weak_impl("weak_chain", u, &f, psi, omega, sampler, std::move(mollify), workers);
}

ExperimentReport strong_chain_experiment(const VectorField& u, const ChangeOfVariables& f, const TestFunction& psi,
                                         const Domain& omega, std::size_t workers)
{
    const auto start = Clock::now();
    psi.check_support(omega);
    ExperimentReport r;
    r.experiment = "strong_chain";
    r.inputs = {{"field", u.name()}, {"F", f.name()}, {"test", psi.name()}, {"domain", omega.describe()}};
    r.lhs = jacobian_pairing(compose(f.field(), u), psi, omega, PairingMode::divergence, {}, workers);
    const ChangeOfVariables fc = f;
    const VectorField uc = u;
    auto g = [fc, uc](const Vec& x) { return fc.det(uc(x)); };
    auto grad_g = [g](const Vec& x) -> Vec {
        const double h = 1e-6;
        Vec d(x.size());
        for (Eigen::Index k = 0; k < x.size(); ++k) {
            Vec xp = x, xm = x;
            xp(k) += h;
            xm(k) -= h;
            d(k) = (g(xp) - g(xm)) / (2 * h);
        }
        return d;
    };
    const TestFunction weighted =
        psi.weighted(psi.name() + "*detF(u)", g, grad_g, std::pow(f.lipschitz(), omega.dimension()));
    r.rhs = jacobian_pairing(u, weighted, omega, PairingMode::direct, {}, workers);
    r.tol_rel = 1e-3;
    r.tol_abs = 1e-12;
    finalize_gap(r);
    r.runtime_ms = elapsed_ms(start);
    return r;
}

ExperimentReport strong_coarea_experiment(const VectorField& u, const Domain& omega, const SamplerSpec& spec, int K,
                                          std::size_t workers)
{
    const auto start = Clock::now();
    ExperimentReport r;
    r.experiment = "strong_coarea";
    r.inputs = {{"field", u.name()}, {"domain", omega.describe()}, {"K", std::to_string(K)},
                {"samples", std::to_string(spec.samples)}};
    r.seed = spec.seed;
    r.samples = spec.samples;
    const auto pairing = [&](const TestFunction& psi) {
        return jacobian_pairing(u, psi, omega, PairingMode::direct, {}, workers);
    };
    const TvEstimate tv = tv_estimate(pairing, omega, K);
    const auto& nodes = omega.interior();
    const double upper = parallel_sum(
        nodes.size(),
        [&](std::size_t i) { return nodes[i].weight * std::abs(det_expansion(gradient(u, nodes[i].point))); },
        workers);
    r.lhs = tv.value;
    r.lhs_upper = upper;

    Vec lo, hi;
    support_image_box(u, TestFunction::zero(omega.dimension()), omega, spec.margin, lo, hi);
    BoxSampler sampler(lo, hi, spec.seed);
    const std::vector<Vec> targets = sampler.draw(spec.samples);
    const DegreeSolver solver(u, omega, workers);
    const MonteCarlo mc = run_targets(
        targets,
        [&](const Vec& a) -> std::optional<double> {
            try {
                return static_cast<double>(atomic_from_regular_value(solver, a).atoms.size());
            } catch (const BoundaryValue&) {
                return std::nullopt;
            } catch (const SingularValue&) {
                return std::nullopt;
            }
        },
        workers);
    const SampleStats stats = sample_stats(mc.used);
    r.rhs = sampler.volume() * stats.mean;
    r.standard_error = sampler.volume() * stats.standard_error;
    r.skipped = mc.skipped;
    r.skip_fraction = r.samples ? static_cast<double>(r.skipped) / r.samples : 0.0;
    r.unreliable = r.skip_fraction > 0.1;
    r.tol_rel = 0.05;
    r.tol_sigma = 3.0;
    r.rows.push_back({{"tv_lower", tv.value},
                      {"tv_upper", upper},
                      {"dictionary_size", static_cast<double>(tv.dictionary_size)},
                      {"area_formula", r.rhs},
                      {"standard_error", r.standard_error}});
    finalize_gap(r);
    r.runtime_ms = elapsed_ms(start);
    return r;
}

ExperimentReport holder_chain_experiment(const VectorField& u, const ChangeOfVariables& f, const LipschitzSet& e,
                                         const Domain& omega, const SamplerSpec& spec,
                                         const HolderChainOptions& options, std::size_t workers)
{
    const auto start = Clock::now();
    e.check_inside(omega);
    if (options.eps.size() < 2) throw InvalidParameter("holder chain needs at least two mollification scales");
    const int n = omega.dimension();
    const double alpha = u.smoothness().kind == Smoothness::holder ? u.smoothness().alpha : 1.0;
    if (!(alpha > (n - 1.0) / n)) throw InvalidParameter("Hölder exponent must exceed (n - 1) / n");

    ExperimentReport r;
    r.experiment = "holder_chain";
    r.inputs = {{"field", u.name()},      {"F", f.name()}, {"set", e.name()}, {"domain", omega.describe()},
                {"perimeter", num(e.perimeter())}, {"samples", std::to_string(spec.samples)}};
    r.seed = spec.seed;
    r.samples = spec.samples;
    r.tol_rel = options.tol_rel;
    r.tol_sigma = options.tol_sigma;

    const ExtensionField U(u, Mollifier(n), omega);
    const std::size_t m = options.eps.size();
    std::vector<VectorField> slices;
    std::vector<BoundaryImage> images;
    Vec lo = Vec::Constant(n, INFINITY), hi = Vec::Constant(n, -INFINITY);
    for (double eps : options.eps) {
        slices.push_back(U.slice(eps));
        images.push_back(BoundaryImage::sample(slices.back(), e, workers));
        for (const auto& v : images.back().values) {
            lo = lo.cwiseMin(v);
            hi = hi.cwiseMax(v);
        }
        for (const auto& node : omega.interior())
            if (e.contains(node.point)) {
                const Vec v = slices.back()(node.point);
                lo = lo.cwiseMin(v);
                hi = hi.cwiseMax(v);
            }
    }
    const double pad = spec.margin * (hi - lo).norm();
    lo.array() -= pad;
    hi.array() += pad;
    // One target set for every scale (common random numbers).
    BoxSampler sampler(lo, hi, spec.seed);
    const std::vector<Vec> targets = sampler.draw(spec.samples);
    const double omega_n = unit_ball_volume(n);

    std::vector<double> lhs(m), rhs(m), se(m);
    std::size_t worst_skipped = 0;
    bool gaps_ok = true;
    for (std::size_t k = 0; k < m; ++k) {
        const VectorField v = compose(f.field(), slices[k]);
        std::vector<double> flux(e.boundary().size());
        parallel_for_blocks(
            flux.size(),
            [&](std::size_t b, std::size_t end) {
                for (std::size_t i = b; i < end; ++i) {
                    const auto& node = e.boundary()[i];
                    flux[i] = node.weight * j_vector(v(node.point), gradient(v, node.point)).dot(node.normal);
                }
            },
            workers);
        lhs[k] = pairwise_sum(flux);
        const BoundaryImage& image = images[k];
        const MonteCarlo mc = run_targets(
            targets,
            [&](const Vec& a) -> std::optional<double> {
                try {
                    return f.det(a) * pair_Jua_indicator(image, a) / omega_n;
                } catch (const BoundaryValue&) {
                    return std::nullopt;
                } catch (const SingularPoint&) {
                    return std::nullopt;
                }
            },
            workers);
        const SampleStats stats = sample_stats(mc.used);
        rhs[k] = sampler.volume() * stats.mean;
        se[k] = sampler.volume() * stats.standard_error;
        worst_skipped = std::max(worst_skipped, mc.skipped);
        const double tol = options.tol_sigma * se[k] + options.tol_rel * std::abs(lhs[k]);
        const bool ok = std::abs(lhs[k] - rhs[k]) <= tol;
        gaps_ok = gaps_ok && ok;
        r.rows.push_back({{"eps", options.eps[k]},
                          {"lhs", lhs[k]},
                          {"rhs", rhs[k]},
                          {"standard_error", se[k]},
                          {"skip_fraction", static_cast<double>(mc.skipped) / spec.samples},
                          {"ok", ok ? 1.0 : 0.0}});
    }

    // Successive differences against the Hölder-norm product.
    const TestFunction chi = TestFunction::indicator(e);
    const double norm_radius = std::min(1.1 * chi.support_radius(), omega.distance_to_boundary(chi.support_center()));
    const Domain around = Domain::disk(chi.support_center(), norm_radius, options.norm_resolution);
    std::vector<double> diff(m - 1), bound(m - 1);
    for (std::size_t k = 0; k + 1 < m; ++k) {
        diff[k] = std::abs(lhs[k] - lhs[k + 1]);
        bound[k] = holder_norm(subtract(slices[k], slices[k + 1]), around, options.alpha_norm, workers) *
                   e.perimeter();
    }
    std::vector<double> ratio(m - 1, 0.0);
    double log_sum = 0.0;
    bool positive = true;
    for (std::size_t k = 0; k + 1 < m; ++k) {
        ratio[k] = bound[k] > 0.0 ? diff[k] / bound[k] : 0.0;
        positive = positive && ratio[k] > 0.0;
        if (ratio[k] > 0.0) log_sum += std::log(ratio[k]);
    }
    const double constant = positive ? std::exp(log_sum / static_cast<double>(m - 1)) : 0.0;
    bool bounds_ok = true;
    for (std::size_t k = 0; k + 1 < m; ++k) {
        const bool ok = positive ? ratio[k] <= options.constant_factor * constant &&
                                       ratio[k] >= constant / options.constant_factor
                                 : diff[k] == 0.0;
        bounds_ok = bounds_ok && ok;
        r.rows.push_back({{"eps", options.eps[k]},
                          {"eps_next", options.eps[k + 1]},
                          {"lhs_difference", diff[k]},
                          {"holder_product", bound[k]},
                          {"ratio", ratio[k]},
                          {"fitted_constant", constant},
                          {"ok", ok ? 1.0 : 0.0}});
    }
    r.lhs = lhs.back();
    r.rhs = rhs.back();
    r.standard_error = se.back();
    r.skipped = worst_skipped;
    r.skip_fraction = static_cast<double>(worst_skipped) / std::max<std::size_t>(spec.samples, 1);
    r.unreliable = r.skip_fraction > 0.1;
    if (!gaps_ok) r.notes.push_back("a per-scale gap exceeds its tolerance");
    if (!bounds_ok) r.notes.push_back("a successive difference is not within the fitted factor of the Hölder-norm product");
    finalize_gap(r);
    r.runtime_ms = elapsed_ms(start);
    return r;
}

ExperimentReport ua_continuity_experiment(const VectorField& u, const VectorField& w, const std::vector<double>& eps,
                                          double s, double p, double radius, const Domain& omega,
                                          const SamplerSpec& spec, std::size_t workers)
{
    const auto start = Clock::now();
    const int n = omega.dimension();
    if (!in_coarea_range(n, s, p)) throw InvalidParameter("need s > (n - 1)/n and s p > n - 1");
    if (eps.empty()) throw InvalidParameter("empty epsilon sequence");
    ExperimentReport r;
    r.experiment = "ua_continuity";
    r.inputs = {{"field", u.name()}, {"perturbation", w.name()}, {"domain", omega.describe()},
                {"s", num(s)},       {"p", num(p)},               {"radius", num(radius)},
                {"samples", std::to_string(spec.samples)}};
    r.seed = spec.seed;
    r.samples = spec.samples;
    r.tol_abs = INFINITY;

    // Targets uniform in B(0, R) by rejection from the enclosing box.
    std::vector<Vec> targets;
    if (radius > 0.0) {
        BoxSampler box(Vec::Constant(n, -radius), Vec::Constant(n, radius), spec.seed);
        while (targets.size() < spec.samples) {
            const Vec a = box.next();
            if (a.norm() < radius) targets.push_back(a);
        }
    }
    const double s_emb = (n - 1.0) / n;
    const double p_emb = n;
    const auto& nodes = omega.interior();
    std::vector<Vec> points(nodes.size());
    std::vector<double> weights(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        points[i] = nodes[i].point;
        weights[i] = nodes[i].weight;
    }
    std::vector<Vec> base(nodes.size()), pert(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        base[i] = u(points[i]);
        pert[i] = w(points[i]);
    }
    double range = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); j += 97) range = std::max(range, (base[i] - base[j]).norm());
    const double eps_sing = 1e-8 * std::max(range, 1e-300);

    std::vector<double> values(eps.size(), 0.0);
    std::size_t singular_nodes = 0, total_nodes = 0;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        std::vector<double> gap(targets.size(), 0.0);
        std::vector<std::size_t> excluded(targets.size(), 0);
        parallel_for_blocks(
            targets.size(),
            [&](std::size_t b, std::size_t e) {
                for (std::size_t t = b; t < e; ++t) {
                    const Vec& a = targets[t];
                    std::vector<Vec> diff(nodes.size());
                    std::vector<bool> include(nodes.size(), true);
                    std::vector<double> l2_terms;
                    for (std::size_t i = 0; i < nodes.size(); ++i) {
                        const Vec d0 = base[i] - a;
                        const Vec d1 = base[i] + eps[k] * pert[i] - a;
                        if (d0.norm() < eps_sing || d1.norm() < eps_sing) {
                            include[i] = false;
                            ++excluded[t];
                            diff[i] = Vec::Zero(d0.size());
                            continue;
                        }
                        diff[i] = d1 / d1.norm() - d0 / d0.norm();
                        l2_terms.push_back(weights[i] * std::pow(diff[i].squaredNorm(), 0.5 * p_emb));
                    }
                    const double l2 = std::pow(pairwise_sum(l2_terms), 1.0 / p_emb);
                    const double semi = std::pow(fractional_seminorm_power(points, weights, diff, include, s_emb,
                                                                           p_emb, omega.cell_diameter(), 1),
                                                 1.0 / p_emb);
                    gap[t] = std::pow(l2 + semi, n);
                }
            },
            workers);
        values[k] = targets.empty() ? 0.0 : pairwise_sum(gap) / static_cast<double>(targets.size());
        for (auto x : excluded) singular_nodes += x;
        total_nodes += targets.size() * nodes.size();
        r.rows.push_back({{"eps", eps[k]}, {"I", values[k]}});
    }
    r.singular_fraction = total_nodes ? static_cast<double>(singular_nodes) / total_nodes : 0.0;

    // Monotone along the sequence in the direction of decreasing eps, and a
    // positive log-log rate.
    std::vector<std::size_t> order(eps.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return eps[a] > eps[b]; });
    bool monotone = true;
    for (std::size_t k = 1; k < order.size(); ++k)
        if (values[order[k]] > values[order[k - 1]]) monotone = false;
    double rate = 0.0;
    bool all_zero = std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
    if (!all_zero && eps.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (std::size_t k = 0; k < eps.size(); ++k) {
            if (values[k] <= 0.0) continue;
            const double x = std::log(eps[k]), y = std::log(values[k]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++cnt;
        }
        if (cnt >= 2) rate = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    }
    const bool rate_ok = all_zero || rate > 0.0;
    r.rows.push_back({{"monotone", monotone ? 1.0 : 0.0}, {"rate", rate}, {"ok", monotone && rate_ok ? 1.0 : 0.0}});
    r.lhs = values[order.back()];
    r.rhs = 0.0;
    finalize_gap(r);
    r.runtime_ms = elapsed_ms(start);
    return r;
}

ExperimentReport stability_experiment(const VectorField& u, const VectorField& v, const TestFunction& psi,
                                      const Domain& omega, double alpha, std::size_t workers)
{
    const auto start = Clock::now();
    psi.check_support(omega);
    const int n = omega.dimension();
    ExperimentReport r;
    r.experiment = "stability";
    r.inputs = {{"u", u.name()}, {"v", v.name()}, {"test", psi.name()}, {"domain", omega.describe()},
                {"alpha", num(alpha)}};
    r.tol_abs = INFINITY;

    const double gap = std::abs(jacobian_pairing(u, psi, omega, PairingMode::direct, {}, workers) -
                                jacobian_pairing(v, psi, omega, PairingMode::direct, {}, workers));
    const VectorField d = subtract(u, v);
    const double s1 = (n - 1.0) / n, p1 = n;
    const double s2 = n / (n + 1.0), p2 = n + 1.0;

    const double d1 = sobolev_norm(d, omega, s1, p1, workers);
    const double m1 = sobolev_norm(u, omega, s1, p1, workers) + sobolev_norm(v, omega, s1, p1, workers);
    const double d2 = sobolev_norm(d, omega, s2, p2, workers);
    const double m2 = sobolev_norm(u, omega, s2, p2, workers) + sobolev_norm(v, omega, s2, p2, workers);
    const double d3 = holder_norm(d, omega, alpha, workers);
    const double m3 = holder_norm(u, omega, alpha, workers) + holder_norm(v, omega, alpha, workers);

    double grad_inf = 0.0;
    for (const auto& node : omega.interior()) grad_inf = std::max(grad_inf, psi.gradient(node.point).norm());
    for (const auto& x : omega.vertices()) grad_inf = std::max(grad_inf, psi.gradient(x).norm());
    const auto& nodes = omega.interior();
    const double grad_l1 =
        parallel_sum(nodes.size(), [&](std::size_t i) { return nodes[i].weight * psi.gradient(nodes[i].point).norm(); });
    const double psi_w = sobolev_norm(as_field(psi), omega, s2, p2, workers);

    const double prod1 = d1 * std::pow(m1, n - 1) * grad_inf;
    const double prod2 = d2 * std::pow(m2, n - 1) * psi_w;
    const double prod3 = d3 * std::pow(m3, n - 1) * grad_l1;
    auto ratio = [gap](double prod) { return prod > 0.0 ? gap / prod : 0.0; };
    r.rows.push_back({{"gap", gap},
                      {"product_1", prod1},
                      {"product_2", prod2},
                      {"product_3", prod3},
                      {"ratio_1", ratio(prod1)},
                      {"ratio_2", ratio(prod2)},
                      {"ratio_3", ratio(prod3)},
                      {"ok", std::isfinite(ratio(prod1)) && std::isfinite(ratio(prod2)) && std::isfinite(ratio(prod3))
                                 ? 1.0
                                 : 0.0}});
    r.lhs = gap;
    r.rhs = prod1;
    finalize_gap(r);
    r.runtime_ms = elapsed_ms(start);
    return r;
}

double layer_cake_rhs(const VectorField& u, const TestFunction& psi, const Domain& omega, const SamplerSpec& spec,
                      int levels, std::size_t workers)
{
    if (levels < 1) throw InvalidParameter("layer cake needs at least one level");
    const double top = psi.sup_bound();
    if (top <= 0.0) return 0.0;
    Vec lo, hi;
    support_image_box(u, psi, omega, spec.margin, lo, hi);
    BoxSampler sampler(lo, hi, spec.seed);
    const std::vector<Vec> targets = sampler.draw(spec.samples);
    const double dt = top / levels;
    const double omega_n = unit_ball_volume(omega.dimension());
    std::vector<double> per_level(levels, 0.0);
    for (int l = 0; l < levels; ++l) {
        const double t = (l + 0.5) * dt;
        const LipschitzSet e = sublevel_set(psi, t, omega, 128);
        if (e.empty()) continue;
        const BoundaryImage image = BoundaryImage::sample(u, e, workers);
        const MonteCarlo mc = run_targets(
            targets,
            [&](const Vec& a) -> std::optional<double> {
                try {
                    return image.flux(a) / omega_n;
                } catch (const SingularPoint&) {
                    return std::nullopt;
                }
            },
            workers);
        per_level[l] = sampler.volume() * sample_stats(mc.used).mean;
    }
    return dt * pairwise_sum(per_level);
}

std::vector<std::string> experiment_names()
{
    return {"weak_coarea", "weak_chain", "strong_chain", "strong_coarea", "holder_chain", "ua_continuity", "stability"};
}

}  // namespace fracjac
