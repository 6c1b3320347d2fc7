#include "fracjac/tv_estimate.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fracjac/errors.hpp"

namespace fracjac {

namespace {
/// C^2 step from 0 (s <= 0) to 1 (s >= 1).
double step(double s)
{
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double step_derivative(double s)
{
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return 30.0 * s * s * (1.0 - s) * (1.0 - s);
}

/// One-dimensional smooth partition of unity over `m` intervals of
/// [lo, hi]; transitions of width w centered on the interior grid lines.
struct Partition {
    double lo, width, w;
    int m;

    double rise(int k, double s) const  // 0 left of grid line k, 1 right of it
    {
        return step((s - (lo + k * width)) / w + 0.5);
    }
    double rise_d(int k, double s) const
    {
        return step_derivative((s - (lo + k * width)) / w + 0.5) / w;
    }
    double phi(int k, double s) const
    {
        const double left = k == 0 ? 1.0 : rise(k, s);
        const double right = k == m - 1 ? 0.0 : rise(k + 1, s);
        return left - right;
    }
    double phi_d(int k, double s) const
    {
        const double left = k == 0 ? 0.0 : rise_d(k, s);
        const double right = k == m - 1 ? 0.0 : rise_d(k + 1, s);
        return left - right;
    }
};
}  // namespace

TvEstimate tv_estimate(const std::function<double(const TestFunction&)>& pairing, const Domain& omega, int K)
{
    if (omega.dimension() != 2) throw Unsupported("tv_estimate is planar");
    if (K < 1) throw InvalidParameter("dictionary size must be positive");
    const int m = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(K)) + 1e-9)));
    Vec lo(2), hi(2);
    if (omega.kind() == DomainKind::rectangle) {
        lo = omega.lower();
        hi = omega.upper();
    } else {
        lo = omega.center().array() - omega.radius();
        hi = omega.center().array() + omega.radius();
    }
    const double w_fixed = 0.005 * omega.diameter();
    const double cell = std::min((hi(0) - lo(0)) / m, (hi(1) - lo(1)) / m);
    const double w = std::min(w_fixed, 0.5 * cell);
    const Partition px{lo(0), (hi(0) - lo(0)) / m, w, m};
    const Partition py{lo(1), (hi(1) - lo(1)) / m, w, m};
    const Domain dom = omega;
    auto cutoff = [dom, w](const Vec& x) { return dom.contains(x) ? step(dom.distance_to_boundary(x) / w) : 0.0; };
    auto cutoff_grad = [dom, w](const Vec& x) -> Vec {
        if (!dom.contains(x)) return Vec::Zero(2);
        return step_derivative(dom.distance_to_boundary(x) / w) / w * dom.distance_gradient(x);
    };

    auto plateau = [&](const std::vector<double>& sign) {
        auto value = [=](const Vec& x) {
            const double c = cutoff(x);
            if (c == 0.0) return 0.0;
            double sum = 0.0;
            for (int i = 0; i < m; ++i) {
                const double fx = px.phi(i, x(0));
                if (fx == 0.0) continue;
                for (int j = 0; j < m; ++j) {
                    const double s = sign[i * m + j];
                    if (s != 0.0) sum += s * fx * py.phi(j, x(1));
                }
            }
            return c * sum;
        };
        auto grad = [=](const Vec& x) -> Vec {
            const double c = cutoff(x);
            Vec g = Vec::Zero(2);
            double sum = 0.0;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    const double s = sign[i * m + j];
                    if (s == 0.0) continue;
                    const double fx = px.phi(i, x(0)), fy = py.phi(j, x(1));
                    sum += s * fx * fy;
                    g(0) += s * px.phi_d(i, x(0)) * fy;
                    g(1) += s * fx * py.phi_d(j, x(1));
                }
            return c * g + sum * cutoff_grad(x);
        };
        return TestFunction::custom("plateau", 2, value, grad, 1.0, dom.center(), 0.5 * dom.diameter());
    };

    std::vector<double> sign(static_cast<std::size_t>(m) * m, 0.0);
    for (int c = 0; c < m * m; ++c) {
        std::vector<double> unit(static_cast<std::size_t>(m) * m, 0.0);
        unit[c] = 1.0;
        const double p = pairing(plateau(unit));
        sign[c] = p > 0.0 ? 1.0 : (p < 0.0 ? -1.0 : 0.0);
    }
    TvEstimate est;
    est.value = pairing(plateau(sign));
    est.dictionary_size = m * m;
    est.cells_per_axis = m;
    est.transition = w;
    return est;
}

}  // namespace fracjac
