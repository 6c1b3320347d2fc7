#pragma once

#include <cstddef>

#include "fracjac/domain.hpp"
#include "fracjac/field.hpp"
#include "fracjac/test_function.hpp"

namespace fracjac {

/// j u = (1/n) (cof grad u)^T u from a value and its gradient.
Vec j_vector(const Vec& value, const Mat& grad);
/// j u(x).
Vec j_field(const VectorField& u, const Vec& x, GradientMode mode = {});

enum class PairingMode { divergence, direct };

/// <Ju, psi>. Direct mode: sum_x w det grad u(x) psi(x). Divergence mode:
/// -sum_x w j u(x) . grad psi(x); indicators are rejected there.
double jacobian_pairing(const VectorField& u, const TestFunction& psi, const Domain& omega, PairingMode mode,
                        GradientMode gradient_mode = {}, std::size_t workers = 0);

/// Value and gradient of the sphere projection (v - a) / |v - a| given
/// v = u(x) and grad u(x). Throws SingularPoint when v == a.
struct SphereSample {
    Vec value;
    Mat gradient;
    double distance = 0.0;  // |u(x) - a|
};
SphereSample sphere_sample(const Vec& v, const Mat& grad, const Vec& a);

/// j(u^a)(x) from v = u(x) and grad u(x).
Vec j_sphere(const Vec& v, const Mat& grad, const Vec& a);

/// u^a as a field. Evaluation where |u(x) - a| < eps_sing sets the singular
/// flag of `evaluate`; evaluation exactly on the fiber throws SingularPoint.
class SphereProjection {
public:
    struct Evaluation {
        Vec value;
        Mat gradient;
        bool singular = false;
    };

    SphereProjection(VectorField u, Vec a, double eps_sing);
    /// eps_sing = 1e-8 * range_diameter(u, omega).
    SphereProjection(VectorField u, Vec a, const Domain& omega);

    Evaluation evaluate(const Vec& x, GradientMode mode = {}) const;
    const VectorField& field() const { return field_; }
    double eps_sing() const { return eps_sing_; }
    const Vec& target() const { return a_; }

private:
    VectorField base_;
    VectorField field_;
    Vec a_;
    double eps_sing_ = 0.0;
};

VectorField sphere_projection(const VectorField& u, const Vec& a);

/// max_i |sum_j (cof grad u)_ij d_j psi - det(grad u with row i replaced by
/// grad psi)|.
double cofactor_identity_residual(const VectorField& u, const TestFunction& psi, const Vec& x,
                                  GradientMode mode = {});

}  // namespace fracjac
