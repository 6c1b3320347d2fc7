#include "fracjac/field.hpp"

#include <algorithm>
#include <limits>

#include "fracjac/domain.hpp"
#include "fracjac/errors.hpp"

namespace fracjac {

VectorField::VectorField(std::string name, int input_dim, int output_dim, Evaluator value,
                         GradientEvaluator gradient, SmoothnessTag tag, double bandwidth)
    : name_(std::move(name)),
      input_dim_(input_dim),
      output_dim_(output_dim),
      value_(std::move(value)),
      gradient_(std::move(gradient)),
      tag_(tag),
      bandwidth_(bandwidth)
{
    if (input_dim_ < 1 || output_dim_ < 1) throw InvalidParameter("field dimensions must be positive");
    if (!value_) throw InvalidParameter("field '" + name_ + "' has no evaluator");
}

Mat VectorField::analytic_gradient(const Vec& x) const
{
    if (!gradient_) throw Unsupported("field '" + name_ + "' has no analytic gradient");
    return gradient_(x);
}

VectorField VectorField::renamed(std::string name) const
{
    VectorField copy = *this;
    copy.name_ = std::move(name);
    return copy;
}

Mat fd_gradient(const VectorField& u, const Vec& x, double h)
{
    if (!(h > 0.0)) throw InvalidParameter("finite-difference step must be positive");
    Mat g(u.output_dim(), x.size());
    Vec xp = x, xm = x;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        xp(j) = x(j) + h;
        xm(j) = x(j) - h;
        g.col(j) = (u(xp) - u(xm)) / (2.0 * h);
        xp(j) = x(j);
        xm(j) = x(j);
    }
    return g;
}

Mat gradient(const VectorField& u, const Vec& x, GradientMode mode)
{
    switch (mode.kind) {
    case GradientMode::Kind::analytic:
        return u.analytic_gradient(x);
    case GradientMode::Kind::finite_difference:
        return fd_gradient(u, x, mode.h > 0.0 ? mode.h : 1e-5);
    case GradientMode::Kind::automatic:
        break;
    }
    if (u.has_analytic_gradient()) return u.analytic_gradient(x);
    return fd_gradient(u, x, mode.h > 0.0 ? mode.h : 1e-5);
}

Mat gradient(const VectorField& u, const Vec& x, GradientMode mode, const Domain& omega)
{
    const bool use_fd = mode.kind == GradientMode::Kind::finite_difference ||
                        (mode.kind == GradientMode::Kind::automatic && !u.has_analytic_gradient());
    if (!use_fd) return u.analytic_gradient(x);
    const double h = mode.h > 0.0 ? mode.h : omega.default_fd_step();
    if (!omega.contains(x) || omega.distance_to_boundary(x) <= h) {
        throw BoundaryProximity("finite-difference stencil of width " + std::to_string(h) +
                                " leaves the domain");
    }
    return fd_gradient(u, x, h);
}

VectorField compose(const VectorField& outer, const VectorField& inner)
{
    if (outer.input_dim() != inner.output_dim()) throw InvalidParameter("compose: dimension mismatch");
    VectorField::GradientEvaluator grad = [outer, inner](const Vec& x) -> Mat {
        return gradient(outer, inner(x)) * gradient(inner, x);
    };
    SmoothnessTag tag = inner.smoothness();
    return VectorField(outer.name() + "∘" + inner.name(), inner.input_dim(), outer.output_dim(),
                       [outer, inner](const Vec& x) { return outer(inner(x)); }, grad, tag,
                       inner.bandwidth());
}

namespace {

VectorField combine(const VectorField& u, const VectorField& v, double sign, const std::string& op)
{
    if (u.input_dim() != v.input_dim() || u.output_dim() != v.output_dim()) {
        throw InvalidParameter("field arithmetic: dimension mismatch");
    }
    VectorField::GradientEvaluator grad;
    if (u.has_analytic_gradient() && v.has_analytic_gradient()) {
        grad = [u, v, sign](const Vec& x) -> Mat {
            return u.analytic_gradient(x) + sign * v.analytic_gradient(x);
        };
    }
    SmoothnessTag tag = u.smoothness();
    if (v.smoothness().kind != Smoothness::smooth) tag = v.smoothness();
    return VectorField("(" + u.name() + op + v.name() + ")", u.input_dim(), u.output_dim(),
                       [u, v, sign](const Vec& x) -> Vec { return u(x) + sign * v(x); }, grad, tag,
                       std::max(u.bandwidth(), v.bandwidth()));
}

}  // namespace

VectorField add(const VectorField& u, const VectorField& v) { return combine(u, v, 1.0, "+"); }
VectorField subtract(const VectorField& u, const VectorField& v) { return combine(u, v, -1.0, "-"); }

VectorField scale(const VectorField& u, double c)
{
    VectorField::GradientEvaluator grad;
    if (u.has_analytic_gradient()) grad = [u, c](const Vec& x) -> Mat { return c * u.analytic_gradient(x); };
    return VectorField(std::to_string(c) + "*" + u.name(), u.input_dim(), u.output_dim(),
                       [u, c](const Vec& x) -> Vec { return c * u(x); }, grad, u.smoothness(), u.bandwidth());
}

VectorField rescale_argument(const VectorField& u, double lambda)
{
    VectorField::GradientEvaluator grad;
    if (u.has_analytic_gradient()) {
        grad = [u, lambda](const Vec& x) -> Mat { return lambda * u.analytic_gradient(lambda * x); };
    }
    return VectorField(u.name() + "(λx)", u.input_dim(), u.output_dim(),
                       [u, lambda](const Vec& x) -> Vec { return u(lambda * x); }, grad, u.smoothness(),
                       u.bandwidth() * lambda);
}

double range_diameter(const VectorField& u, const Domain& omega)
{
    Vec lo = Vec::Constant(u.output_dim(), std::numeric_limits<double>::infinity());
    Vec hi = -lo;
    auto visit = [&](const Vec& x) {
        const Vec v = u(x);
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    };
    for (const auto& node : omega.interior()) visit(node.point);
    for (const auto& node : omega.boundary()) visit(node.point);
    return (hi - lo).norm();
}

}  // namespace fracjac
