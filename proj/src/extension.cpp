#include "fracjac/extension.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracjac/errors.hpp"

namespace fracjac {

namespace {
void check_t(double t)
{
    if (!(t > 0.0 && t < 1.0)) throw InvalidParameter("mollification scale t must lie in (0, 1)");
}

/// Maps y to the point of omega whose value u~ copies, plus the Jacobian of
/// that map.
void retract(const Domain& omega, const Vec& y, Vec& p, Mat& dp)
{
    const int n = static_cast<int>(y.size());
    p = y;
    dp = Mat::Identity(n, n);
    if (omega.kind() == DomainKind::rectangle) {
        const double collar = omega.cell_diameter();
        for (int d = 0; d < n; ++d) {
            const double lo = omega.lower()(d), hi = omega.upper()(d);
            const double c = std::min(collar, hi - lo);
            if (y(d) < lo) {
                const double dist = lo - y(d);
                if (dist < c) {
                    p(d) = lo + dist;
                    dp(d, d) = -1.0;
                } else {
                    p(d) = lo + c;
                    dp(d, d) = 0.0;
                }
            } else if (y(d) > hi) {
                const double dist = y(d) - hi;
                if (dist < c) {
                    p(d) = hi - dist;
                    dp(d, d) = -1.0;
                } else {
                    p(d) = hi - c;
                    dp(d, d) = 0.0;
                }
            }
        }
        return;
    }
    const Vec rel = y - omega.center();
    const double r = rel.norm();
    double target = 0.0;
    if (r > omega.radius())
        target = omega.radius();
    else if (omega.kind() == DomainKind::annulus && r < omega.inner_radius())
        target = omega.inner_radius();
    else
        return;
    if (r == 0.0) throw SingularPoint("radial extension undefined at the center");
    const Vec dir = rel / r;
    p = omega.center() + target * dir;
    dp = (target / r) * (Mat::Identity(n, n) - dir * dir.transpose());
}
}  // namespace

VectorField extend_field(const VectorField& u, const Domain& omega)
{
    const Domain dom = omega;
    VectorField::Evaluator value = [u, dom](const Vec& y) -> Vec {
        Vec p;
        Mat dp;
        retract(dom, y, p, dp);
        return u(p);
    };
    VectorField::GradientEvaluator grad = [u, dom](const Vec& y) -> Mat {
        Vec p;
        Mat dp;
        retract(dom, y, p, dp);
        return gradient(u, p) * dp;
    };
    return VectorField(u.name() + "~", u.input_dim(), u.output_dim(), value, grad, u.smoothness(), u.bandwidth());
}

ExtensionField::ExtensionField(const VectorField& u, const Mollifier& eta, const Domain& omega,
                               int min_nodes_per_axis)
    : base_(u), extended_(extend_field(u, omega)), eta_(eta), omega_(omega), min_nodes_(min_nodes_per_axis)
{
    if (u.input_dim() != omega.dimension() || eta.dimension() != omega.dimension())
        throw InvalidParameter("extension: field, mollifier and domain dimensions differ");
    if (min_nodes_per_axis < 16) throw InvalidParameter("extension needs at least 16 mollifier nodes per axis");
}

int ExtensionField::nodes_per_axis(double t) const
{
    const double need = std::ceil(1.3 * t * base_.bandwidth());
    return std::max(min_nodes_, static_cast<int>(need));
}

std::shared_ptr<const ExtensionField::NodeList> ExtensionField::nodes_for(double t) const
{
    const int m = nodes_per_axis(t);
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = cache_.find(m);
    if (it == cache_.end()) it = cache_.emplace(m, std::make_shared<const NodeList>(eta_.nodes(m))).first;
    return it->second;
}

void ExtensionField::evaluate(const Vec& x, double t, Vec& value, Mat& joint) const
{
    check_t(t);
    const auto nodes = nodes_for(t);
    const int n = dimension();
    const int m = base_.output_dim();
    value = Vec::Zero(m);
    joint = Mat::Zero(m, n + 1);
    for (const auto& node : *nodes) {
        const Vec y = x - t * node.offset;
        value += node.weight * extended_(y);
        const Mat g = fracjac::gradient(extended_, y);
        joint.leftCols(n) += node.weight * g;
        joint.col(n) -= node.weight * (g * node.offset);
    }
}

Vec ExtensionField::value(const Vec& x, double t) const
{
    check_t(t);
    const auto nodes = nodes_for(t);
    Vec v = Vec::Zero(base_.output_dim());
    for (const auto& node : *nodes) v += node.weight * extended_(x - t * node.offset);
    return v;
}

Mat ExtensionField::gradient(const Vec& x, double t) const
{
    check_t(t);
    const auto nodes = nodes_for(t);
    Mat g = Mat::Zero(base_.output_dim(), dimension());
    for (const auto& node : *nodes) g += node.weight * fracjac::gradient(extended_, x - t * node.offset);
    return g;
}

Mat ExtensionField::joint_gradient(const Vec& x, double t) const
{
    Vec v;
    Mat j;
    evaluate(x, t, v, j);
    return j;
}

VectorField ExtensionField::slice(double t) const
{
    check_t(t);
    const auto nodes = nodes_for(t);
    const VectorField ext = extended_;
    VectorField::Evaluator value = [ext, nodes, t](const Vec& x) -> Vec {
        Vec v = Vec::Zero(ext.output_dim());
        for (const auto& node : *nodes) v += node.weight * ext(x - t * node.offset);
        return v;
    };
    VectorField::GradientEvaluator grad = [ext, nodes, t](const Vec& x) -> Mat {
        Mat g = Mat::Zero(ext.output_dim(), ext.input_dim());
        for (const auto& node : *nodes) g += node.weight * fracjac::gradient(ext, x - t * node.offset);
        return g;
    };
    std::ostringstream name;
    name << base_.name() << "*eta_" << t;
    return VectorField(name.str(), base_.input_dim(), base_.output_dim(), value, grad, {}, 0.0);
}

}  // namespace fracjac
