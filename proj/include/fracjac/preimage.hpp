#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "fracjac/domain.hpp"
#include "fracjac/field.hpp"

namespace fracjac {

/// A map f from a 2- or 3-dimensional parameter region to R^n (same n),
/// sampled on a cell grid. Used for preimages of u on a domain and for the
/// lateral boundary surface of a space-time slab.
struct GridMap {
    std::vector<Vec> vertices;
    std::vector<std::vector<std::size_t>> cells;
    std::function<Vec(const Vec&)> value;
    std::function<Mat(const Vec&)> jacobian;
    /// Whether a converged parameter belongs to the region.
    std::function<bool(const Vec&)> admissible;
    /// Optional canonical form of a parameter (e.g. periodic wrap).
    std::function<Vec(const Vec&)> canonical;
};

struct Preimage {
    Vec x;
    double det = 0.0;  // det of the Jacobian at x
};

/// Finds all solutions of f(x) = a by Newton's method seeded from every cell
/// whose (slightly inflated) vertex-image bounding box contains a. At most 30
/// iterations per seed, converged when the step is below 1e-12 relative.
/// Roots closer than one cell size with the same orientation are merged.
/// Roots reached without quadratic convergence, or with |det| <= 1e-6 |J|^n,
/// are reported with det = 0.
class PreimageFinder {
public:
    explicit PreimageFinder(GridMap map, std::size_t workers = 0);

    std::vector<Preimage> solve(const Vec& a) const;
    /// Number of cells whose inflated image box contains a.
    std::size_t candidate_count(const Vec& a) const;
    double cell_size() const { return cell_size_; }
    const GridMap& map() const { return map_; }
    const std::vector<Vec>& vertex_values() const { return values_; }

private:
    bool newton(const Vec& start, const Vec& a, Vec& root, bool& degenerate) const;
    bool newton_unchecked(const Vec& start, const Vec& a, Vec& root, bool& degenerate) const;

    GridMap map_;
    std::vector<Vec> values_;
    std::vector<Vec> box_lo_, box_hi_;
    std::vector<Vec> seeds_;
    double cell_size_ = 0.0;
    double value_scale_ = 1.0;
};

/// Grid map of u over omega's vertex grid.
GridMap domain_grid_map(const VectorField& u, const Domain& omega);

}  // namespace fracjac
