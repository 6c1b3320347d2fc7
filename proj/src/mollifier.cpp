#include "fracjac/mollifier.hpp"

#include <cmath>

#include "fracjac/errors.hpp"

namespace fracjac {

namespace {
// 1 / int_{B(0,1)} exp(-1 / (1 - |x|^2)) dx, evaluated to 18 digits offline.
constexpr double kC2 = 2.14356577579223660;
constexpr double kC3 = 2.26711673960832646;

template <class F>
void lattice(int dim, int per_axis, F&& visit)
{
    const double h = 2.0 / per_axis;
    std::vector<int> idx(dim, 0);
    Vec y(dim);
    while (true) {
        for (int d = 0; d < dim; ++d) y(d) = -1.0 + (idx[d] + 0.5) * h;
        visit(y);
        int d = 0;
        while (d < dim && ++idx[d] == per_axis) idx[d++] = 0;
        if (d == dim) break;
    }
}
}  // namespace

Mollifier::Mollifier(int dim) : dim_(dim)
{
    if (dim == 2)
        c_ = kC2;
    else if (dim == 3)
        c_ = kC3;
    else
        throw Unsupported("mollifier is normalized for n = 2 and n = 3 only");
}

double Mollifier::profile(const Vec& y) const
{
    const double r2 = y.squaredNorm();
    return r2 < 1.0 ? c_ * std::exp(-1.0 / (1.0 - r2)) : 0.0;
}

double Mollifier::scaled(const Vec& y, double t) const
{
    return profile(y / t) / std::pow(t, dim_);
}

std::vector<Mollifier::Node> Mollifier::nodes(int per_axis) const
{
    if (per_axis < 2) throw InvalidParameter("mollifier lattice needs at least 2 points per axis");
    std::vector<Node> out;
    double total = 0.0;
    lattice(dim_, per_axis, [&](const Vec& y) {
        const double w = profile(y);
        if (w > 0.0) {
            out.push_back({y, w});
            total += w;
        }
    });
    for (auto& node : out) node.weight /= total;
    return out;
}

double Mollifier::mass(double t, int per_axis) const
{
    const double h = 2.0 * t / per_axis;
    double total = 0.0;
    lattice(dim_, per_axis, [&](const Vec& y) { total += scaled(t * y, t); });
    return total * std::pow(h, dim_);
}

}  // namespace fracjac
