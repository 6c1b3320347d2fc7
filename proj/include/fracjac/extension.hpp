#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "fracjac/domain.hpp"
#include "fracjac/field.hpp"
#include "fracjac/mollifier.hpp"

namespace fracjac {

/// Extension of u beyond omega. Rectangles: even reflection across each face
/// inside a collar of one cell diameter, constant beyond. Disks and annuli:
/// constant radial extension u(R y / |y|).
VectorField extend_field(const VectorField& u, const Domain& omega);

/// U(x, t) = (eta_t * u~)(x) evaluated with a moving-node rule
/// U(x, t) = sum_k w_k u~(x - t z_k) over a fixed lattice {z_k} of the unit
/// ball, so grad U and dU/dt are the exact derivatives of the discrete rule.
/// The lattice has at least 16 points per axis and is refined with t times
/// the field bandwidth so that oscillatory fields are not aliased.
class ExtensionField {
public:
    ExtensionField(const VectorField& u, const Mollifier& eta, const Domain& omega, int min_nodes_per_axis = 16);

    int dimension() const { return omega_.dimension(); }
    const VectorField& base() const { return base_; }
    const VectorField& extended() const { return extended_; }
    const Domain& domain() const { return omega_; }
    const Mollifier& mollifier() const { return eta_; }

    Vec value(const Vec& x, double t) const;
    /// grad_x U (n x n).
    Mat gradient(const Vec& x, double t) const;
    /// [grad_x U | dU/dt] (n x (n + 1)).
    Mat joint_gradient(const Vec& x, double t) const;
    /// Value and joint gradient in one pass.
    void evaluate(const Vec& x, double t, Vec& value, Mat& joint) const;

    /// The slice u_t = U(., t) as a field with analytic gradient.
    VectorField slice(double t) const;
    int nodes_per_axis(double t) const;

private:
    using NodeList = std::vector<Mollifier::Node>;
    std::shared_ptr<const NodeList> nodes_for(double t) const;

    VectorField base_;
    VectorField extended_;
    Mollifier eta_;
    Domain omega_;
    int min_nodes_;
    mutable std::mutex cache_mutex_;
    mutable std::map<int, std::shared_ptr<const NodeList>> cache_;
};

}  // namespace fracjac
