#include "fracjac/jacobian.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fracjac/errors.hpp"
#include "fracjac/parallel.hpp"

namespace fracjac {

Vec j_vector(const Vec& value, const Mat& grad)
{
    const auto n = static_cast<double>(grad.rows());
    return cofactor(grad).transpose() * value / n;
}

Vec j_field(const VectorField& u, const Vec& x, GradientMode mode)
{
    return j_vector(u(x), gradient(u, x, mode));
}

double jacobian_pairing(const VectorField& u, const TestFunction& psi, const Domain& omega, PairingMode mode,
                        GradientMode gradient_mode, std::size_t workers)
{
    if (u.input_dim() != omega.dimension() || u.output_dim() != omega.dimension())
        throw InvalidParameter("pairing needs u: R^n -> R^n on an n-dimensional domain");
    const auto& nodes = omega.interior();
    if (mode == PairingMode::divergence) {
        if (psi.kind() == TestKind::indicator)
            throw Unsupported("indicator test functions cannot be paired in divergence mode");
        return parallel_sum(
            nodes.size(),
            [&](std::size_t i) {
                const Vec& x = nodes[i].point;
                const Vec dpsi = psi.gradient(x);
                if (dpsi.isZero()) return 0.0;
                return -nodes[i].weight * j_vector(u(x), gradient(u, x, gradient_mode, omega)).dot(dpsi);
            },
            workers);
    }
    return parallel_sum(
        nodes.size(),
        [&](std::size_t i) {
            const Vec& x = nodes[i].point;
            const double p = psi.value(x);
            if (p == 0.0) return 0.0;
            return nodes[i].weight * det_expansion(gradient(u, x, gradient_mode, omega)) * p;
        },
        workers);
}

SphereSample sphere_sample(const Vec& v, const Mat& grad, const Vec& a)
{
    const Vec d = v - a;
    const double r = d.norm();
    if (r == 0.0) throw SingularPoint("sphere projection evaluated on the singular fiber");
    SphereSample s;
    s.distance = r;
    s.value = d / r;
    const auto m = d.size();
    s.gradient = (Mat::Identity(m, m) - s.value * s.value.transpose()) * grad / r;
    return s;
}

Vec j_sphere(const Vec& v, const Mat& grad, const Vec& a)
{
    const SphereSample s = sphere_sample(v, grad, a);
    return j_vector(s.value, s.gradient);
}

SphereProjection::SphereProjection(VectorField u, Vec a, double eps_sing)
    : base_(std::move(u)), a_(std::move(a)), eps_sing_(eps_sing)
{
    field_ = sphere_projection(base_, a_);
}

SphereProjection::SphereProjection(VectorField u, Vec a, const Domain& omega)
    : SphereProjection(u, std::move(a), 1e-8 * range_diameter(u, omega))
{
}

SphereProjection::Evaluation SphereProjection::evaluate(const Vec& x, GradientMode mode) const
{
    const Vec v = base_(x);
    if ((v - a_).norm() < eps_sing_) {
        Evaluation e;
        e.singular = true;
        if ((v - a_).norm() > 0.0) {
            const SphereSample s = sphere_sample(v, gradient(base_, x, mode), a_);
            e.value = s.value;
            e.gradient = s.gradient;
        }
        return e;
    }
    const SphereSample s = sphere_sample(v, gradient(base_, x, mode), a_);
    return {s.value, s.gradient, false};
}

VectorField sphere_projection(const VectorField& u, const Vec& a)
{
    if (a.size() != u.output_dim()) throw InvalidParameter("sphere projection target has the wrong dimension");
    VectorField::Evaluator value = [u, a](const Vec& x) -> Vec {
        const Vec d = u(x) - a;
        const double r = d.norm();
        if (r == 0.0) throw SingularPoint("sphere projection evaluated on the singular fiber");
        return d / r;
    };
    VectorField::GradientEvaluator grad = [u, a](const Vec& x) -> Mat {
        return sphere_sample(u(x), gradient(u, x), a).gradient;
    };
    return VectorField(u.name() + "^a", u.input_dim(), u.output_dim(), value, grad);
}

double cofactor_identity_residual(const VectorField& u, const TestFunction& psi, const Vec& x, GradientMode mode)
{
    const Mat g = gradient(u, x, mode);
    const Vec dpsi = psi.gradient(x);
    const Vec lhs = cofactor(g) * dpsi;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        Mat replaced = g;
        replaced.row(i) = dpsi.transpose();
        worst = std::max(worst, std::abs(lhs(i) - det_expansion(replaced)));
    }
    return worst;
}

}  // namespace fracjac
