#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fracjac/linalg.hpp"

namespace fracjac {

enum class DomainKind { rectangle, disk, annulus };

struct QuadratureNode {
    Vec point;
    double weight = 0.0;
};

struct BoundaryNode {
    Vec point;
    Vec normal;  // outward unit normal
    double weight = 0.0;
};

/// A bounded region with interior and boundary quadrature, plus the grid of
/// cells that generated the interior nodes (used for preimage seeding).
///
/// Rectangles use the tensor midpoint rule in any dimension; disks and
/// annuli (n = 2 only) use the polar midpoint rule with `resolution` radial
/// and 4 * resolution angular cells. Boundary quadrature uses 8 * resolution
/// nodes per unit-resolution loop in n = 2 (2 * resolution per rectangle
/// edge). Instances are immutable.
class Domain {
public:
    static Domain rectangle(const Vec& lower, const Vec& upper, int resolution);
    static Domain disk(const Vec& center, double radius, int resolution);
    static Domain annulus(const Vec& center, double inner_radius, double outer_radius, int resolution);

    int dimension() const { return dim_; }
    DomainKind kind() const { return kind_; }
    int resolution() const { return resolution_; }

    const std::vector<QuadratureNode>& interior() const { return interior_; }
    const std::vector<BoundaryNode>& boundary() const { return boundary_; }

    /// Grid vertices and the cells (lists of vertex indices) whose midpoints
    /// are the interior nodes.
    const std::vector<Vec>& vertices() const { return vertices_; }
    const std::vector<std::vector<std::size_t>>& cells() const { return cells_; }

    bool contains(const Vec& x) const;
    /// Euclidean distance from x to the boundary (for any x).
    double distance_to_boundary(const Vec& x) const;
    /// Gradient of distance_to_boundary for interior x (unit length a.e.).
    Vec distance_gradient(const Vec& x) const;

    double volume() const;
    double boundary_measure() const;
    double diameter() const;
    double cell_diameter() const { return cell_diameter_; }
    /// Default central-difference step, diameter / (8 * resolution).
    double default_fd_step() const { return diameter() / (8.0 * resolution_); }

    const Vec& lower() const { return lower_; }
    const Vec& upper() const { return upper_; }
    const Vec& center() const { return center_; }
    double radius() const { return outer_radius_; }
    double inner_radius() const { return inner_radius_; }

    /// Closed boundary loops parametrized by arc length (n = 2 only). The
    /// outer loop is counter-clockwise.
    int boundary_loop_count() const;
    double boundary_loop_length(int loop) const;
    Vec boundary_loop_point(int loop, double s) const;

    /// Same domain at a different resolution.
    Domain with_resolution(int resolution) const;
    /// Domain scaled about the origin by `factor` (x -> factor * x).
    Domain scaled(double factor) const;

    std::string describe() const;

private:
    Domain() = default;
    void build_rectangle();
    void build_polar();

    DomainKind kind_ = DomainKind::rectangle;
    int dim_ = 2;
    int resolution_ = 0;
    Vec lower_, upper_, center_;
    double inner_radius_ = 0.0, outer_radius_ = 0.0;
    double cell_diameter_ = 0.0;
    std::vector<QuadratureNode> interior_;
    std::vector<BoundaryNode> boundary_;
    std::vector<Vec> vertices_;
    std::vector<std::vector<std::size_t>> cells_;
};

/// Generic constructor. Parameters: rectangle = (lower..., upper...),
/// disk = (cx, cy, r), annulus = (cx, cy, r_in, r_out).
Domain make_domain(DomainKind kind, std::span<const double> params, int resolution);

/// Parses `square`, `rect:x0=..:y0=..:x1=..:y1=..`, `box3:...`,
/// `disk:r=1:cx=0:cy=0`, `annulus:rin=..:rout=..`; all accept `res=`.
Domain parse_domain(const std::string& spec, int default_resolution = 64);

}  // namespace fracjac
