#include "fracjac/preimage.hpp"

#include <algorithm>
#include <cmath>

#include "fracjac/errors.hpp"
#include "fracjac/parallel.hpp"

namespace fracjac {

PreimageFinder::PreimageFinder(GridMap map, std::size_t workers) : map_(std::move(map))
{
    const std::size_t nv = map_.vertices.size();
    values_.resize(nv);
    auto& values = values_;
    parallel_for_blocks(
        nv,
        [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) values[i] = map_.value(map_.vertices[i]);
        },
        workers);
    double scale = 0.0;
    for (const auto& v : values) scale = std::max(scale, v.cwiseAbs().maxCoeff());
    value_scale_ = std::max(scale, 1e-300);

    const std::size_t nc = map_.cells.size();
    box_lo_.resize(nc);
    box_hi_.resize(nc);
    seeds_.resize(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        const auto& cell = map_.cells[c];
        Vec lo = values[cell[0]], hi = values[cell[0]];
        Vec centre = Vec::Zero(map_.vertices[cell[0]].size());
        double diam = 0.0;
        for (std::size_t k = 0; k < cell.size(); ++k) {
            lo = lo.cwiseMin(values[cell[k]]);
            hi = hi.cwiseMax(values[cell[k]]);
            centre += map_.vertices[cell[k]];
            for (std::size_t l = k + 1; l < cell.size(); ++l)
                diam = std::max(diam, (map_.vertices[cell[k]] - map_.vertices[cell[l]]).norm());
        }
        // Curvature inside a cell can push the image past the vertex hull.
        const double pad = 0.25 * (hi - lo).maxCoeff() + 1e-9 * value_scale_;
        box_lo_[c] = lo.array() - pad;
        box_hi_[c] = hi.array() + pad;
        seeds_[c] = centre / static_cast<double>(cell.size());
        cell_size_ = std::max(cell_size_, diam);
    }
}

std::size_t PreimageFinder::candidate_count(const Vec& a) const
{
    std::size_t count = 0;
    for (std::size_t c = 0; c < box_lo_.size(); ++c)
        if ((a.array() >= box_lo_[c].array()).all() && (a.array() <= box_hi_[c].array()).all()) ++count;
    return count;
}

bool PreimageFinder::newton(const Vec& start, const Vec& a, Vec& root, bool& degenerate) const
{
    // Iterates may leave the parameter region where the map is defined (for
    // instance t outside (0, 1) on a lateral surface); such seeds are dropped.
    try {
        return newton_unchecked(start, a, root, degenerate);
    } catch (const InvalidParameter&) {
        return false;
    }
}

bool PreimageFinder::newton_unchecked(const Vec& start, const Vec& a, Vec& root, bool& degenerate) const
{
    degenerate = false;
    Vec x = start;
    const double max_step = 10.0 * cell_size_;
    for (int it = 0; it < 30; ++it) {
        const Vec r = map_.value(x) - a;
        const Mat j = map_.jacobian(x);
        Eigen::FullPivLU<Mat> lu(j);
        if (!lu.isInvertible()) return false;
        Vec step = lu.solve(r);
        if (!step.allFinite()) return false;
        const double len = step.norm();
        if (len > max_step) step *= max_step / len;
        x -= step;
        if (map_.canonical) x = map_.canonical(x);
        if (len < 1e-12 * (1.0 + x.norm())) {
            root = x;
            return (map_.value(x) - a).norm() <= 1e-8 * value_scale_;
        }
    }
    // Small residual without quadratic convergence: the Jacobian is
    // (numerically) singular at the root.
    const Vec r = map_.value(x) - a;
    if (r.norm() <= 1e-11 * value_scale_) {
        root = x;
        degenerate = true;
        return true;
    }
    return false;
}

std::vector<Preimage> PreimageFinder::solve(const Vec& a) const
{
    std::vector<Preimage> roots;
    for (std::size_t c = 0; c < box_lo_.size(); ++c) {
        if (!((a.array() >= box_lo_[c].array()).all() && (a.array() <= box_hi_[c].array()).all())) continue;
        Vec x;
        bool degenerate = false;
        if (!newton(seeds_[c], a, x, degenerate)) continue;
        if (map_.admissible && !map_.admissible(x)) continue;
        const Mat j = map_.jacobian(x);
        double det = degenerate || j.rows() != j.cols() ? 0.0 : det_lu(j);
        // A double root is only located to about sqrt(eps), which leaves
        // |det| near 1e-8 |J|^n instead of 0.
        if (det != 0.0 && std::abs(det) <= 1e-6 * std::pow(operator_norm(j), static_cast<double>(j.rows()))) det = 0.0;
        // Nearby roots of opposite orientation are distinct (both sides of a fold).
        bool duplicate = false;
        for (auto& r : roots) {
            const double d = (r.x - x).norm();
            const bool same_side = (r.det > 0) == (det > 0) || r.det == 0.0 || det == 0.0;
            if (d < 1e-6 * cell_size_ || (d < cell_size_ && same_side)) {
                if (det == 0.0) r.det = 0.0;
                duplicate = true;
                break;
            }
        }
        if (duplicate) continue;
        roots.push_back({x, det});
    }
    return roots;
}

GridMap domain_grid_map(const VectorField& u, const Domain& omega)
{
    GridMap map;
    map.vertices = omega.vertices();
    map.cells = omega.cells();
    map.value = [u](const Vec& x) { return u(x); };
    map.jacobian = [u](const Vec& x) { return gradient(u, x); };
    const Domain dom = omega;
    map.admissible = [dom](const Vec& x) { return dom.contains(x); };
    return map;
}

}  // namespace fracjac
