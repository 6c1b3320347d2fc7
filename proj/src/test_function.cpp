#include "fracjac/test_function.hpp"

#include <cmath>
#include <limits>

#include "fracjac/errors.hpp"
#include "fracjac/parallel.hpp"
#include "fracjac/spec_string.hpp"

namespace fracjac {

TestFunction TestFunction::bump(const Vec& center, double radius, double height)
{
    if (!(radius > 0.0)) throw InvalidParameter("bump radius must be positive");
    TestFunction t;
    t.name_ = "bump";
    t.dim_ = static_cast<int>(center.size());
    const double inv_r2 = 1.0 / (radius * radius);
    t.value_ = [=](const Vec& x) {
        const double q = 1.0 - (x - center).squaredNorm() * inv_r2;
        return q > 0.0 ? height * q * q * q : 0.0;
    };
    t.gradient_ = [=](const Vec& x) -> Vec {
        const double q = 1.0 - (x - center).squaredNorm() * inv_r2;
        if (q <= 0.0) return Vec::Zero(center.size());
        return (-6.0 * height * q * q * inv_r2) * (x - center);
    };
    t.sup_bound_ = std::abs(height);
    t.support_center_ = center;
    t.support_radius_ = radius;
    return t;
}

TestFunction TestFunction::custom(std::string name, int dim, Value value, Gradient gradient, double sup_bound,
                                  const Vec& support_center, double support_radius)
{
    TestFunction t;
    t.name_ = std::move(name);
    t.dim_ = dim;
    t.value_ = std::move(value);
    t.gradient_ = std::move(gradient);
    t.sup_bound_ = sup_bound;
    t.support_center_ = support_center;
    t.support_radius_ = support_radius;
    return t;
}

TestFunction TestFunction::indicator(const LipschitzSet& set)
{
    TestFunction t;
    t.kind_ = TestKind::indicator;
    t.name_ = "indicator(" + set.name() + ")";
    t.dim_ = 2;
    auto shared = std::make_shared<const LipschitzSet>(set);
    t.set_ = shared;
    t.value_ = [shared](const Vec& x) { return shared->contains(x) ? 1.0 : 0.0; };
    t.sup_bound_ = 1.0;
    Vec lo = Vec::Constant(2, std::numeric_limits<double>::infinity());
    Vec hi = -lo;
    for (const auto& loop : set.loops())
        for (const auto& p : loop) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
    t.support_center_ = set.empty() ? Vec(Vec::Zero(2)) : Vec(0.5 * (lo + hi));
    t.support_radius_ = set.empty() ? 0.0 : 0.5 * (hi - lo).norm();
    return t;
}

TestFunction TestFunction::zero(int dim)
{
    return custom(
        "zero", dim, [](const Vec&) { return 0.0; }, [dim](const Vec&) -> Vec { return Vec::Zero(dim); }, 0.0,
        Vec::Zero(dim), 0.0);
}

double TestFunction::value(const Vec& x) const
{
    return value_(x);
}

Vec TestFunction::gradient(const Vec& x) const
{
    if (kind_ == TestKind::indicator) throw Unsupported("indicator test functions have no gradient");
    return gradient_(x);
}

const LipschitzSet& TestFunction::set() const
{
    if (!set_) throw Unsupported("smooth test function has no underlying set");
    return *set_;
}

TestFunction TestFunction::scaled(double lambda) const
{
    TestFunction t = *this;
    auto v = value_;
    t.value_ = [v, lambda](const Vec& x) { return lambda * v(x); };
    if (gradient_) {
        auto g = gradient_;
        t.gradient_ = [g, lambda](const Vec& x) -> Vec { return lambda * g(x); };
    }
    t.sup_bound_ = std::abs(lambda) * sup_bound_;
    return t;
}

TestFunction TestFunction::weighted(std::string name, Value g, Gradient grad_g, double g_bound) const
{
    if (kind_ == TestKind::indicator) throw Unsupported("weighted indicators are not supported");
    TestFunction t = *this;
    t.name_ = std::move(name);
    auto v = value_;
    auto dv = gradient_;
    t.value_ = [v, g](const Vec& x) {
        const double p = v(x);
        return p == 0.0 ? 0.0 : p * g(x);
    };
    t.gradient_ = [v, dv, g, grad_g](const Vec& x) -> Vec {
        const double p = v(x);
        const Vec dp = dv(x);
        if (p == 0.0 && dp.isZero()) return dp;
        return dp * g(x) + p * grad_g(x);
    };
    t.sup_bound_ = sup_bound_ * g_bound;
    return t;
}

void TestFunction::check_support(const Domain& omega) const
{
    if (kind_ == TestKind::indicator) {
        set().check_inside(omega);
        return;
    }
    if (support_radius_ > 0.0 &&
        (!omega.contains(support_center_) || omega.distance_to_boundary(support_center_) < support_radius_))
        throw InvalidParameter("test function support is not inside the domain");
    for (const auto& node : omega.boundary()) {
        if (value_(node.point) != 0.0 || !gradient_(node.point).isZero())
            throw InvalidParameter("test function " + name_ + " does not vanish on the boundary");
    }
}

double bump_integral(int n, double radius, double height)
{
    // n omega_n r^n int_0^1 (1 - rho^2)^3 rho^{n-1} d rho, the radial integral
    // being B(n/2, 4) / 2.
    const double half = 0.5 * n;
    const double beta = std::tgamma(half) * 6.0 / std::tgamma(half + 4.0);
    const double omega = std::pow(M_PI, half) / std::tgamma(half + 1.0);
    return height * n * omega * std::pow(radius, n) * 0.5 * beta;
}

double integrate(const TestFunction& psi, const Domain& omega)
{
    const auto& nodes = omega.interior();
    return parallel_sum(nodes.size(), [&](std::size_t i) { return nodes[i].weight * psi.value(nodes[i].point); });
}

TestFunction parse_test_function(const std::string& spec, int dim)
{
    const SpecString s = SpecString::parse(spec);
    if (s.name() == "bump") {
        s.only({"r", "cx", "cy", "cz", "h"});
        Vec c = Vec::Zero(dim);
        c(0) = s.number("cx", 0.0);
        c(1) = s.number("cy", 0.0);
        if (dim > 2) c(2) = s.number("cz", 0.0);
        return TestFunction::bump(c, s.number("r", 0.3), s.number("h", 1.0));
    }
    if (s.name() == "zero") {
        s.only({});
        return TestFunction::zero(dim);
    }
    throw ConfigError("unknown test function '" + s.name() + "'");
}

}  // namespace fracjac
