#include "fracjac/sampler.hpp"

#include <cmath>
#include <limits>

#include "fracjac/errors.hpp"
#include "fracjac/parallel.hpp"

namespace fracjac {

double unit_uniform(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

BoxSampler::BoxSampler(Vec lower, Vec upper, std::uint64_t seed)
    : lower_(std::move(lower)), upper_(std::move(upper)), rng_(seed)
{
    if (lower_.size() != upper_.size() || !(upper_.array() >= lower_.array()).all())
        throw InvalidParameter("sampler box is inverted");
}

Vec BoxSampler::next()
{
    Vec a(lower_.size());
    for (Eigen::Index d = 0; d < a.size(); ++d) a(d) = lower_(d) + (upper_(d) - lower_(d)) * unit_uniform(rng_);
    return a;
}

std::vector<Vec> BoxSampler::draw(std::size_t count)
{
    std::vector<Vec> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(next());
    return out;
}

double BoxSampler::volume() const
{
    return (upper_ - lower_).prod();
}

void support_image_box(const VectorField& u, const TestFunction& psi, const Domain& omega, double margin, Vec& lower,
                       Vec& upper)
{
    const int m = u.output_dim();
    lower = Vec::Constant(m, std::numeric_limits<double>::infinity());
    upper = -lower;
    const bool whole = psi.support_radius() <= 0.0;
    auto visit = [&](const Vec& x) {
        if (!whole && (x - psi.support_center()).norm() > psi.support_radius()) return;
        const Vec v = u(x);
        lower = lower.cwiseMin(v);
        upper = upper.cwiseMax(v);
    };
    for (const auto& node : omega.interior()) visit(node.point);
    for (const auto& node : omega.boundary()) visit(node.point);
    if (!lower.allFinite()) throw InvalidParameter("test function support contains no quadrature nodes");
    const double pad = margin * (upper - lower).norm();
    lower.array() -= pad;
    upper.array() += pad;
}

SampleStats sample_stats(const std::vector<double>& values)
{
    SampleStats s;
    s.count = values.size();
    if (values.empty()) return s;
    s.mean = pairwise_sum(values) / static_cast<double>(values.size());
    if (values.size() > 1) {
        std::vector<double> sq(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - s.mean) * (values[i] - s.mean);
        const double var = pairwise_sum(sq) / static_cast<double>(values.size() - 1);
        s.standard_error = std::sqrt(var / static_cast<double>(values.size()));
    }
    return s;
}

}  // namespace fracjac
