#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "fracjac/domain.hpp"
#include "fracjac/field.hpp"
#include "fracjac/lipschitz_set.hpp"
#include "fracjac/preimage.hpp"
#include "fracjac/test_function.hpp"

namespace fracjac {

struct DegreeReport {
    Vec target;
    int degree = 0;
    double raw = 0.0;
    std::string method;
    /// min |det grad u| over the preimages (infinity when there are none).
    double min_abs_det = 0.0;
    /// dist(a, u(boundary nodes)).
    double boundary_distance = 0.0;
    /// |raw - round(raw)| < 0.1.
    bool integral = true;
    std::vector<Preimage> preimages;
};

/// Images of boundary nodes under u with their gradients.
///
/// For unordered nodes the flux is the midpoint rule and targets closer than
/// 2 * (largest arc weight) * (largest |grad u|) to a node image are
/// rejected. Planar sets sampled loop by loop integrate the flux exactly
/// along the chords between consecutive node images (half the swept angle
/// per chord), so only targets within the chord sag (largest second
/// difference of the image) of the image polygon are rejected.
struct BoundaryImage {
    std::vector<Vec> values;
    std::vector<Mat> gradients;
    std::vector<BoundaryNode> nodes;
    double tolerance = 0.0;
    std::vector<std::size_t> loop_ends;  // empty: unordered nodes
    std::vector<double> loop_sign;       // +1 when traversal agrees with the normals

    static BoundaryImage sample(const VectorField& u, const std::vector<BoundaryNode>& nodes,
                                std::size_t workers = 0);
    static BoundaryImage sample(const VectorField& u, const LipschitzSet& e, std::size_t workers = 0);
    double distance(const Vec& a) const;
    /// Throws BoundaryValue when distance(a) < tolerance.
    void require_clear(const Vec& a) const;
    /// (1 / omega_n) sum_nodes w j(u^a) . nu, without the clearance check.
    double flux(const Vec& a) const;
};

/// Precomputes u on the grid and boundary of omega so that many targets can
/// be processed cheaply. Thread-safe for concurrent queries.
class DegreeSolver {
public:
    DegreeSolver(const VectorField& u, const Domain& omega, std::size_t workers = 0);

    /// Signed preimage count. Throws BoundaryValue or SingularValue.
    DegreeReport preimage(const Vec& a) const;
    /// Boundary flux (1 / omega_n) int_{dOmega} j u^a . nu. Throws
    /// BoundaryValue.
    DegreeReport boundary(const Vec& a) const;
    /// Newton-polished preimages with det grad u; no regularity checks.
    std::vector<Preimage> preimages(const Vec& a) const;

    const BoundaryImage& boundary_image() const { return boundary_; }
    const VectorField& field() const { return u_; }
    const Domain& domain() const { return omega_; }

private:
    VectorField u_;
    Domain omega_;
    PreimageFinder finder_;
    BoundaryImage boundary_;
};

DegreeReport degree_preimage(const VectorField& u, const Domain& omega, const Vec& a);
DegreeReport degree_boundary(const VectorField& u, const Domain& omega, const Vec& a);
/// int_Omega psi(u(x)) det grad u(x) dx.
double degree_changevar(const VectorField& u, const Domain& omega, const TestFunction& psi,
                        std::size_t workers = 0);

/// <J u^a, chi_E> = int_{dE} j u^a . nu (omega_n deg(u, E, a) for smooth u).
/// Throws BoundaryValue when a is within the tolerance of u(dE).
double pair_Jua_indicator(const VectorField& u, const LipschitzSet& e, const Vec& a);
/// Same with the boundary of E already sampled.
double pair_Jua_indicator(const BoundaryImage& image, const Vec& a);

}  // namespace fracjac
