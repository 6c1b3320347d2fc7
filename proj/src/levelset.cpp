#include "fracjac/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracjac/errors.hpp"
#include "fracjac/flat_norm.hpp"
#include "fracjac/parallel.hpp"
#include "fracjac/sampler.hpp"

namespace fracjac {

namespace {
Vec join(const Vec& x, double t)
{
    Vec p(x.size() + 1);
    p.head(x.size()) = x;
    p(x.size()) = t;
    return p;
}

std::string describe(const Vec& p)
{
    std::ostringstream s;
    s << "(";
    for (Eigen::Index i = 0; i < p.size(); ++i) s << (i ? ", " : "") << p(i);
    s << ")";
    return s.str();
}
}  // namespace

std::string to_string(EndpointClass c)
{
    switch (c) {
    case EndpointClass::bottom:
        return "bottom";
    case EndpointClass::top:
        return "top";
    case EndpointClass::lateral:
        return "lateral";
    case EndpointClass::closed_loop:
        return "closed_loop";
    }
    return "unknown";
}

double curve_length(const LevelCurve& c)
{
    std::vector<double> seg;
    for (std::size_t i = 1; i < c.vertices.size(); ++i) seg.push_back((c.vertices[i] - c.vertices[i - 1]).norm());
    if (c.closed && c.vertices.size() > 1) seg.push_back((c.vertices.front() - c.vertices.back()).norm());
    return pairwise_sum(seg);
}

double TraceResult::total_length() const
{
    std::vector<double> l;
    for (const auto& c : curves) l.push_back(c.length);
    return pairwise_sum(l);
}

LevelSetTracer::LevelSetTracer(const ExtensionField& U, double t_lo, double t_hi, TraceOptions options,
                               std::size_t workers)
    : U_(U), t_lo_(t_lo), t_hi_(t_hi), options_(options)
{
    const Domain& omega = U.domain();
    if (omega.dimension() != 2) throw Unsupported("level-set tracing is implemented for n = 2");
    if (!(t_lo > 0.0 && t_hi > t_lo && t_hi < 1.0)) throw InvalidParameter("slab needs 0 < t_lo < t_hi < 1");

    bottom_ = std::make_unique<PreimageFinder>(domain_grid_map(U.slice(t_lo), omega), workers);
    top_ = std::make_unique<PreimageFinder>(domain_grid_map(U.slice(t_hi), omega), workers);

    // Lateral surface: loops laid side by side in the s coordinate.
    const double h = options.lateral_cells_per_unit > 0 ? 1.0 / options.lateral_cells_per_unit
                                                        : omega.cell_diameter() / std::sqrt(2.0);
    const int nt = std::max(4, static_cast<int>(std::ceil((t_hi - t_lo) / h)));
    std::vector<double> offsets, lengths;
    GridMap lateral;
    double offset = 0.0;
    for (int loop = 0; loop < omega.boundary_loop_count(); ++loop) {
        const double len = omega.boundary_loop_length(loop);
        const int ns = std::max(64, static_cast<int>(std::ceil(len / h)));
        const std::size_t base = lateral.vertices.size();
        for (int j = 0; j <= nt; ++j)
            for (int i = 0; i <= ns; ++i) {
                Vec p(2);
                p << offset + len * i / ns, t_lo + (t_hi - t_lo) * j / nt;
                lateral.vertices.push_back(p);
            }
        for (int j = 0; j < nt; ++j)
            for (int i = 0; i < ns; ++i) {
                const std::size_t v0 = base + j * (ns + 1) + i;
                lateral.cells.push_back({v0, v0 + 1, v0 + ns + 2, v0 + ns + 1});
            }
        offsets.push_back(offset);
        lengths.push_back(len);
        offset += len;
    }
    auto locate = [offsets, lengths](double s, int& loop, double& local) {
        loop = 0;
        for (std::size_t k = 0; k < offsets.size(); ++k)
            if (s >= offsets[k]) loop = static_cast<int>(k);
        local = s - offsets[loop];
    };
    const ExtensionField* field = &U;
    lateral.value = [field, locate](const Vec& p) {
        int loop;
        double s;
        locate(p(0), loop, s);
        return field->value(field->domain().boundary_loop_point(loop, s), p(1));
    };
    lateral.jacobian = [field, locate, lengths](const Vec& p) {
        int loop;
        double s;
        locate(p(0), loop, s);
        const Domain& dom = field->domain();
        const double ds = 1e-7 * lengths[loop];
        const Vec tangent = (dom.boundary_loop_point(loop, s + ds) - dom.boundary_loop_point(loop, s - ds)) / (2 * ds);
        const Mat joint = field->joint_gradient(dom.boundary_loop_point(loop, s), p(1));
        Mat j(2, 2);
        j.col(0) = joint.leftCols(2) * tangent;
        j.col(1) = joint.col(2);
        return j;
    };
    lateral.canonical = [locate, offsets, lengths](const Vec& p) {
        int loop;
        double s;
        locate(p(0), loop, s);
        Vec q = p;
        s = std::fmod(s, lengths[loop]);
        if (s < 0.0) s += lengths[loop];
        q(0) = offsets[loop] + s;
        return q;
    };
    lateral.admissible = [t_lo, t_hi](const Vec& p) { return p(1) >= t_lo && p(1) <= t_hi; };
    lateral_ = std::make_unique<PreimageFinder>(std::move(lateral), workers);

    range_lo_ = Vec::Constant(2, std::numeric_limits<double>::infinity());
    range_hi_ = -range_lo_;
    for (const PreimageFinder* f : {bottom_.get(), top_.get(), lateral_.get()})
        for (const auto& v : f->vertex_values()) {
            range_lo_ = range_lo_.cwiseMin(v);
            range_hi_ = range_hi_.cwiseMax(v);
        }
    tol_ = options.tolerance_factor * std::max((range_hi_ - range_lo_).norm(), 1e-300);
}

Vec LevelSetTracer::tangent(const Mat& joint) const
{
    const Eigen::Vector3d r0 = joint.row(0).transpose();
    const Eigen::Vector3d r1 = joint.row(1).transpose();
    const Eigen::Vector3d c = r0.cross(r1);
    return Vec(c.normalized());
}

bool LevelSetTracer::correct(Vec& p, const Vec& a) const
{
    for (int it = 0; it < 25; ++it) {
        Vec v;
        Mat j;
        U_.evaluate(p.head(2), p(2), v, j);
        const Vec r = v - a;
        if (r.norm() < tol_) return true;
        const Mat jjt = j * j.transpose();
        Eigen::FullPivLU<Mat> lu(jjt);
        if (!lu.isInvertible()) return false;
        const Vec dp = j.transpose() * lu.solve(r);
        if (!dp.allFinite()) return false;
        p -= dp;
        if (!(p(2) > 0.0 && p(2) < 1.0)) return false;
    }
    const Vec r = U_.value(p.head(2), p(2)) - a;
    return r.norm() < tol_;
}

void LevelSetTracer::finish_on_slice(Vec& p, double t, const Vec& a) const
{
    Vec x = p.head(2);
    for (int it = 0; it < 30; ++it) {
        Vec v;
        Mat j;
        U_.evaluate(x, t, v, j);
        const Vec r = v - a;
        if (r.norm() < tol_) break;
        x -= j.leftCols(2).fullPivLu().solve(r);
    }
    p = join(x, t);
}

LevelCurve LevelSetTracer::follow(const Vec& start, EndpointClass start_kind, const Vec& a) const
{
    const Domain& omega = U_.domain();
    LevelCurve curve;
    curve.vertices.push_back(start);
    curve.start.kind = start_kind;
    curve.start.point = start;

    Vec p = start;
    Vec v;
    Mat j;
    U_.evaluate(p.head(2), p(2), v, j);
    Vec dir = tangent(j);
    if (start_kind == EndpointClass::bottom && dir(2) < 0) dir = -dir;
    if (start_kind == EndpointClass::top && dir(2) > 0) dir = -dir;
    if (start_kind == EndpointClass::lateral) {
        // Inward: towards increasing distance to the boundary, tested at a
        // nearby interior point.
        const Vec probe = p.head(2) + 1e-6 * omega.diameter() * dir.head(2);
        if (!omega.contains(probe)) dir = -dir;
    }
    if (start_kind == EndpointClass::bottom || start_kind == EndpointClass::top)
        curve.start.sign = j.leftCols(2).determinant() > 0 ? 1 : -1;

    for (std::size_t step = 0; step < options_.max_steps; ++step) {
        U_.evaluate(p.head(2), p(2), v, j);
        if (smallest_singular_value(j) < options_.min_singular_value)
            throw SingularCurve("joint gradient degenerates at " + describe(p));
        Vec dir_here = tangent(j);
        if (dir_here.dot(dir) < 0) dir_here = -dir_here;
        dir = dir_here;
        double h = std::min(options_.max_step, options_.step_scale / j.norm());
        Vec q;
        bool ok = false;
        for (int attempt = 0; attempt < 12; ++attempt, h *= 0.5) {
            q = p + h * dir;
            if (!correct(q, a)) continue;
            if ((q - p).norm() > 2.0 * h) continue;
            ok = true;
            break;
        }
        if (!ok) throw SingularCurve("corrector failed near " + describe(p));

        const bool below = q(2) < t_lo_, above = q(2) > t_hi_;
        const bool outside = !omega.contains(q.head(2));
        if (below || above) {
            const double target = below ? t_lo_ : t_hi_;
            const double lambda = (target - p(2)) / (q(2) - p(2));
            Vec end = p + lambda * (q - p);
            finish_on_slice(end, target, a);
            if (omega.contains(end.head(2))) {
                curve.vertices.push_back(end);
                curve.end.kind = below ? EndpointClass::bottom : EndpointClass::top;
                curve.end.point = end;
                curve.end.sign = U_.gradient(end.head(2), target).determinant() > 0 ? 1 : -1;
                curve.length = curve_length(curve);
                return curve;
            }
        }
        if (outside || below || above) {
            // Bisect the chord, correcting each probe back onto the curve.
            double lo = 0.0, hi = 1.0;
            Vec inside_point = p;
            for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
                const double mid = 0.5 * (lo + hi);
                Vec probe = p + mid * (q - p);
                const bool corrected = correct(probe, a);
                if (corrected && omega.contains(probe.head(2)) && probe(2) >= t_lo_ && probe(2) <= t_hi_) {
                    lo = mid;
                    inside_point = probe;
                } else {
                    hi = mid;
                }
            }
            curve.vertices.push_back(inside_point);
            curve.end.kind = EndpointClass::lateral;
            curve.end.point = inside_point;
            curve.length = curve_length(curve);
            return curve;
        }
        curve.vertices.push_back(q);
        p = q;
    }
    throw SingularCurve("trace did not terminate from " + describe(start));
}

AtomicMeasure LevelSetTracer::slice_measure(const Vec& a, bool bottom) const
{
    const PreimageFinder& finder = bottom ? *bottom_ : *top_;
    AtomicMeasure mu;
    mu.scale = unit_ball_volume(2);
    for (const auto& p : finder.solve(a)) {
        if (std::abs(p.det) <= 1e-8)
            throw SingularValue("slice preimage with |det grad U| = " + std::to_string(std::abs(p.det)));
        mu.atoms.push_back({p.x, p.det > 0 ? 1 : -1});
    }
    return mu;
}

TraceResult LevelSetTracer::trace(const Vec& a) const
{
    TraceResult result;
    result.bottom = slice_measure(a, true);
    result.top = slice_measure(a, false);

    struct Seed {
        Vec point;
        EndpointClass kind;
    };
    std::vector<Seed> seeds;
    for (const auto& atom : result.bottom.atoms) seeds.push_back({join(atom.x, t_lo_), EndpointClass::bottom});
    for (const auto& atom : result.top.atoms) seeds.push_back({join(atom.x, t_hi_), EndpointClass::top});
    const Domain& omega = U_.domain();
    for (const auto& root : lateral_->solve(a)) {
        int loop = 0;
        double s = root.x(0);
        for (int k = 0; k < omega.boundary_loop_count(); ++k) {
            const double len = omega.boundary_loop_length(k);
            if (s < len || k + 1 == omega.boundary_loop_count()) {
                loop = k;
                break;
            }
            s -= len;
        }
        seeds.push_back({join(omega.boundary_loop_point(loop, s), root.x(1)), EndpointClass::lateral});
    }

    const double same = 1e-6 * (1.0 + omega.diameter());
    auto matches = [&](const Vec& p) {
        for (const auto& c : result.curves)
            if ((c.start.point - p).norm() < same || (c.end.point - p).norm() < same) return true;
        return false;
    };
    for (const auto& seed : seeds) {
        if (matches(seed.point)) continue;
        result.curves.push_back(follow(seed.point, seed.kind, a));
    }

    // Audit: every slice atom is an endpoint of exactly one curve and every
    // slice endpoint is an atom.
    auto audit = [&](const AtomicMeasure& mu, double t, EndpointClass kind) {
        std::vector<int> hits(mu.atoms.size(), 0);
        for (const auto& c : result.curves)
            for (const Endpoint* e : {&c.start, &c.end}) {
                if (e->kind != kind) continue;
                bool found = false;
                for (std::size_t i = 0; i < mu.atoms.size(); ++i)
                    if ((join(mu.atoms[i].x, t) - e->point).norm() < same) {
                        ++hits[i];
                        found = true;
                    }
                if (!found) result.unmatched_atoms.push_back(e->point);
            }
        for (std::size_t i = 0; i < mu.atoms.size(); ++i)
            if (hits[i] != 1) result.unmatched_atoms.push_back(join(mu.atoms[i].x, t));
    };
    audit(result.bottom, t_lo_, EndpointClass::bottom);
    audit(result.top, t_hi_, EndpointClass::top);
    result.complete = result.unmatched_atoms.empty();
    return result;
}

std::vector<LevelCurve> trace_level_set(const ExtensionField& U, const Vec& a, double t_lo, double t_hi,
                                        TraceOptions options)
{
    return LevelSetTracer(U, t_lo, t_hi, options).trace(a).curves;
}

CauchyCheck cauchy_gap_check(const LevelSetTracer& tracer, const Vec& a)
{
    CauchyCheck check;
    check.trace = tracer.trace(a);
    const AtomicMeasure diff = difference(check.trace.bottom, check.trace.top);
    check.lhs = flat_norm(diff, tracer.field().domain()).value;
    check.rhs = unit_ball_volume(2) * check.trace.total_length();
    return check;
}

CauchyCheck cauchy_gap_check(const ExtensionField& U, const Vec& a, double t_k, double t_l, TraceOptions options)
{
    if (t_k == t_l) return {};
    return cauchy_gap_check(LevelSetTracer(U, std::min(t_k, t_l), std::max(t_k, t_l), options), a);
}

double coarea_factor(const Mat& joint)
{
    const auto n = joint.rows();
    if (joint.cols() != n + 1) throw InvalidParameter("coarea factor needs an n x (n + 1) matrix");
    double sum = 0.0;
    for (Eigen::Index skip = 0; skip <= n; ++skip) {
        Mat minor(n, n);
        for (Eigen::Index c = 0, k = 0; c <= n; ++c)
            if (c != skip) minor.col(k++) = joint.col(c);
        const double d = det_expansion(minor);
        sum += d * d;
    }
    return std::sqrt(sum);
}

double jacobian_slab_integral(const ExtensionField& U, double t_lo, double t_hi, int levels, std::size_t workers)
{
    if (t_hi <= t_lo) return 0.0;
    if (levels < 1) throw InvalidParameter("slab quadrature needs at least one level");
    const auto& nodes = U.domain().interior();
    const double dt = (t_hi - t_lo) / levels;
    const std::size_t count = nodes.size() * static_cast<std::size_t>(levels);
    return parallel_sum(
        count,
        [&](std::size_t k) {
            const std::size_t i = k / levels;
            const double t = t_lo + (static_cast<double>(k % levels) + 0.5) * dt;
            return nodes[i].weight * dt * coarea_factor(U.joint_gradient(nodes[i].point, t));
        },
        workers);
}

CoareaCheck coarea_extension_check(const ExtensionField& U, double t_lo, double t_hi, std::size_t samples,
                                   std::uint64_t seed, TraceOptions options, std::size_t workers)
{
    CoareaCheck check;
    check.samples = samples;
    if (t_hi <= t_lo) return check;
    const LevelSetTracer tracer(U, t_lo, t_hi, options, workers);
    const double pad = 0.2 * (tracer.range_upper() - tracer.range_lower()).norm();
    check.box_lower = tracer.range_lower().array() - pad;
    check.box_upper = tracer.range_upper().array() + pad;
    BoxSampler sampler(check.box_lower, check.box_upper, seed);
    const std::vector<Vec> targets = sampler.draw(samples);

    std::vector<double> lengths(samples, 0.0);
    std::vector<char> skipped(samples, 0);
    parallel_for_blocks(
        samples,
        [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                try {
                    lengths[i] = tracer.trace(targets[i]).total_length();
                } catch (const SingularCurve&) {
                    skipped[i] = 1;
                } catch (const SingularValue&) {
                    skipped[i] = 1;
                }
            }
        },
        workers);
    std::vector<double> used;
    for (std::size_t i = 0; i < samples; ++i) {
        if (skipped[i])
            ++check.skipped;
        else
            used.push_back(lengths[i]);
    }
    const SampleStats stats = sample_stats(used);
    const double volume = sampler.volume();
    check.lhs = volume * stats.mean;
    check.standard_error = volume * stats.standard_error;
    check.skip_fraction = samples ? static_cast<double>(check.skipped) / samples : 0.0;
    check.unreliable = check.skip_fraction > 0.1;
    check.rhs = jacobian_slab_integral(U, t_lo, t_hi, 16, workers);
    return check;
}

}  // namespace fracjac
