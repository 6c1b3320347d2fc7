#include "fracjac/degree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fracjac/errors.hpp"
#include "fracjac/jacobian.hpp"
#include "fracjac/parallel.hpp"

namespace fracjac {

namespace {
constexpr double kSingularDet = 1e-8;

bool integral_raw(double raw)
{
    return std::abs(raw - std::round(raw)) < 0.1;
}
}  // namespace

BoundaryImage BoundaryImage::sample(const VectorField& u, const std::vector<BoundaryNode>& nodes,
                                    std::size_t workers)
{
    BoundaryImage img;
    img.nodes = nodes;
    img.values.resize(nodes.size());
    img.gradients.resize(nodes.size());
    parallel_for_blocks(
        nodes.size(),
        [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                img.values[i] = u(nodes[i].point);
                img.gradients[i] = gradient(u, nodes[i].point);
            }
        },
        workers);
    double arc = 0.0, lip = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        arc = std::max(arc, nodes[i].weight);
        lip = std::max(lip, operator_norm(img.gradients[i]));
    }
    img.tolerance = 2.0 * arc * lip;
    return img;
}

BoundaryImage BoundaryImage::sample(const VectorField& u, const LipschitzSet& e, std::size_t workers)
{
    BoundaryImage img = sample(u, e.boundary(), workers);
    if (u.output_dim() != 2) return img;
    img.loop_ends = e.loop_ends();
    double sag = 0.0, scale = 0.0;
    std::size_t begin = 0;
    for (std::size_t end : img.loop_ends) {
        const std::size_t m = end - begin;
        double turn = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t i = begin + k;
            const std::size_t next = begin + (k + 1) % m, prev = begin + (k + m - 1) % m;
            sag = std::max(sag, (img.values[next] - 2.0 * img.values[i] + img.values[prev]).norm());
            scale = std::max(scale, img.values[i].norm());
            const Vec t = e.boundary()[next].point - e.boundary()[i].point;
            const Vec& n = e.boundary()[i].normal;
            turn += t(0) * n(1) - t(1) * n(0);
        }
        img.loop_sign.push_back(turn < 0.0 ? 1.0 : -1.0);
        begin = end;
    }
    img.tolerance = sag + 1e-12 * std::max(scale, 1.0);
    return img;
}

double BoundaryImage::distance(const Vec& a) const
{
    double best = std::numeric_limits<double>::infinity();
    if (loop_ends.empty()) {
        for (const auto& v : values) best = std::min(best, (v - a).norm());
        return best;
    }
    std::size_t begin = 0;
    for (std::size_t end : loop_ends) {
        for (std::size_t i = begin; i < end; ++i) {
            const Vec& p = values[i];
            const Vec& q = values[i + 1 < end ? i + 1 : begin];
            const Vec d = q - p;
            const double len2 = d.squaredNorm();
            const double s = len2 > 0.0 ? std::clamp((a - p).dot(d) / len2, 0.0, 1.0) : 0.0;
            best = std::min(best, (p + s * d - a).norm());
        }
        begin = end;
    }
    return best;
}

void BoundaryImage::require_clear(const Vec& a) const
{
    const double d = distance(a);
    if (d < tolerance) {
        std::ostringstream msg;
        msg << "target lies within " << d << " of the boundary image (tolerance " << tolerance << ")";
        throw BoundaryValue(msg.str(), d);
    }
}

double BoundaryImage::flux(const Vec& a) const
{
    if (!loop_ends.empty()) {
        std::vector<double> terms(nodes.size());
        std::size_t begin = 0;
        for (std::size_t l = 0; l < loop_ends.size(); ++l) {
            const std::size_t end = loop_ends[l];
            for (std::size_t i = begin; i < end; ++i) {
                const Vec p = values[i] - a;
                const Vec q = values[i + 1 < end ? i + 1 : begin] - a;
                if (p.squaredNorm() == 0.0 || q.squaredNorm() == 0.0)
                    throw SingularPoint("boundary image passes through the target");
                terms[i] = 0.5 * loop_sign[l] * std::atan2(p(0) * q(1) - p(1) * q(0), p.dot(q));
            }
            begin = end;
        }
        return pairwise_sum(terms);
    }
    std::vector<double> terms(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
        terms[i] = nodes[i].weight * j_sphere(values[i], gradients[i], a).dot(nodes[i].normal);
    return pairwise_sum(terms);
}

DegreeSolver::DegreeSolver(const VectorField& u, const Domain& omega, std::size_t workers)
    : u_(u), omega_(omega), finder_(domain_grid_map(u, omega), workers),
      boundary_(BoundaryImage::sample(u, omega.boundary(), workers))
{
    if (u.input_dim() != omega.dimension() || u.output_dim() != omega.dimension())
        throw InvalidParameter("degree needs u: R^n -> R^n on an n-dimensional domain");
}

std::vector<Preimage> DegreeSolver::preimages(const Vec& a) const
{
    return finder_.solve(a);
}

DegreeReport DegreeSolver::preimage(const Vec& a) const
{
    DegreeReport r;
    r.target = a;
    r.method = "preimage";
    r.boundary_distance = boundary_.distance(a);
    boundary_.require_clear(a);
    r.preimages = finder_.solve(a);
    r.min_abs_det = std::numeric_limits<double>::infinity();
    int count = 0;
    for (const auto& p : r.preimages) {
        r.min_abs_det = std::min(r.min_abs_det, std::abs(p.det));
        if (std::abs(p.det) <= kSingularDet) {
            std::ostringstream msg;
            msg << "target is a singular value: |det grad u| = " << std::abs(p.det) << " at a preimage";
            throw SingularValue(msg.str());
        }
        count += p.det > 0 ? 1 : -1;
    }
    r.degree = count;
    r.raw = count;
    r.integral = true;
    return r;
}

DegreeReport DegreeSolver::boundary(const Vec& a) const
{
    DegreeReport r;
    r.target = a;
    r.method = "boundary";
    r.boundary_distance = boundary_.distance(a);
    boundary_.require_clear(a);
    r.raw = boundary_.flux(a) / unit_ball_volume(omega_.dimension());
    r.degree = static_cast<int>(std::lround(r.raw));
    r.integral = integral_raw(r.raw);
    r.min_abs_det = std::numeric_limits<double>::quiet_NaN();
    return r;
}

DegreeReport degree_preimage(const VectorField& u, const Domain& omega, const Vec& a)
{
    return DegreeSolver(u, omega).preimage(a);
}

DegreeReport degree_boundary(const VectorField& u, const Domain& omega, const Vec& a)
{
    if (u.input_dim() != omega.dimension() || u.output_dim() != omega.dimension())
        throw InvalidParameter("degree needs u: R^n -> R^n on an n-dimensional domain");
    const BoundaryImage img = BoundaryImage::sample(u, omega.boundary());
    DegreeReport r;
    r.target = a;
    r.method = "boundary";
    r.boundary_distance = img.distance(a);
    img.require_clear(a);
    r.raw = img.flux(a) / unit_ball_volume(omega.dimension());
    r.degree = static_cast<int>(std::lround(r.raw));
    r.integral = integral_raw(r.raw);
    r.min_abs_det = std::numeric_limits<double>::quiet_NaN();
    return r;
}

double degree_changevar(const VectorField& u, const Domain& omega, const TestFunction& psi, std::size_t workers)
{
    const auto& nodes = omega.interior();
    return parallel_sum(
        nodes.size(),
        [&](std::size_t i) {
            const Vec& x = nodes[i].point;
            const double p = psi.value(u(x));
            if (p == 0.0) return 0.0;
            return nodes[i].weight * p * det_expansion(gradient(u, x));
        },
        workers);
}

double pair_Jua_indicator(const VectorField& u, const LipschitzSet& e, const Vec& a)
{
    return pair_Jua_indicator(BoundaryImage::sample(u, e, 1), a);
}

double pair_Jua_indicator(const BoundaryImage& image, const Vec& a)
{
    image.require_clear(a);
    return image.flux(a);
}

}  // namespace fracjac
