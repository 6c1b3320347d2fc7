#pragma once

#include <string>
#include <vector>

#include "fracjac/domain.hpp"

namespace fracjac {

/// A bounded planar region E bounded by one or more closed loops, with
/// boundary quadrature (point, outward unit normal, arc weight).
///
/// Loops are stored as polylines for containment tests and area. Circles and
/// arcs carry their analytic normals and exact arc weights; straight edges
/// use a midpoint rule with a fixed number of nodes per edge.
class LipschitzSet {
public:
    LipschitzSet() = default;

    static LipschitzSet circle(const Vec& center, double radius, int nodes = 2048);
    /// Simple polygon; vertices in either orientation.
    static LipschitzSet polygon(const std::vector<Vec>& vertices, int nodes_per_edge = 256);
    /// {center + r (cos th, sin th): r_in < r < r_out, th0 < th < th1}.
    static LipschitzSet annular_sector(const Vec& center, double r_in, double r_out, double theta0,
                                       double theta1, int nodes = 2048);
    /// Region bounded by closed polylines (holes allowed, even-odd rule).
    /// Each loop must have at least three vertices. `normals`, when
    /// non-empty, gives per-edge outward normals; otherwise they are taken
    /// from the polyline orientation.
    static LipschitzSet from_loops(const std::vector<std::vector<Vec>>& loops,
                                   const std::vector<std::vector<Vec>>& normals = {});

    bool empty() const { return loops_.empty(); }
    const std::vector<BoundaryNode>& boundary() const { return boundary_; }
    /// Boundary nodes are stored loop by loop in traversal order; loop k
    /// occupies [loop_ends()[k - 1], loop_ends()[k]).
    const std::vector<std::size_t>& loop_ends() const { return loop_ends_; }
    const std::vector<std::vector<Vec>>& loops() const { return loops_; }
    bool contains(const Vec& x) const;
    double perimeter() const { return perimeter_; }
    double area() const { return area_; }
    /// Largest boundary arc weight.
    double max_arc() const { return max_arc_; }
    const std::string& name() const { return name_; }

    /// Minimum distance from the boundary nodes of E to the boundary of omega
    /// (negative when a node lies outside omega).
    double clearance(const Domain& omega) const;
    /// Throws InvalidGeometry unless the closure of E lies inside omega.
    void check_inside(const Domain& omega) const;

private:
    void finish();

    std::string name_;
    std::vector<std::vector<Vec>> loops_;
    std::vector<BoundaryNode> boundary_;
    std::vector<std::size_t> loop_ends_;
    double perimeter_ = 0.0;
    double area_ = 0.0;
    double max_arc_ = 0.0;
    bool exact_area_ = false;
};

/// Parses `circle:r=0.5:cx=0:cy=0:nodes=2048`,
/// `square:half=0.25:cx=0:cy=0:nodes=256` (per edge) and
/// `sector:rin=0.3:rout=0.6:th0=0:th1=1.5:cx=0:cy=0:nodes=2048`.
LipschitzSet parse_lipschitz_set(const std::string& spec);

}  // namespace fracjac
