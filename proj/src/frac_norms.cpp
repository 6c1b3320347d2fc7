#include "fracjac/frac_norms.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <vector>

#include "fracjac/errors.hpp"
#include "fracjac/parallel.hpp"

namespace fracjac {

namespace {
/// q^e for q >= 0, with repeated multiplication when 2e is a small integer.
class SquarePower {
public:
    explicit SquarePower(double e) : e_(e)
    {
        const double twice = 2.0 * e;
        if (twice == std::round(twice) && twice >= 0.0 && twice <= 16.0) {
            fast_ = true;
            whole_ = static_cast<int>(std::floor(e));
            half_ = (static_cast<int>(twice) % 2) == 1;
        }
    }

    double operator()(double q) const
    {
        if (!fast_) return std::pow(q, e_);
        double r = half_ ? std::sqrt(q) : 1.0;
        for (int k = 0; k < whole_; ++k) r *= q;
        return r;
    }

private:
    double e_;
    bool fast_ = false;
    int whole_ = 0;
    bool half_ = false;
};

void check_sp(double s, double p)
{
    if (!(p >= 1.0)) throw InvalidParameter("p must be at least 1");
    if (!(s > 0.0)) throw InvalidParameter("s must be positive");
    if (!(s * p < p)) throw InvalidParameter("s must be below 1");
}

std::vector<Vec> sample(const VectorField& u, const std::vector<Vec>& points, std::size_t workers)
{
    std::vector<Vec> values(points.size());
    parallel_for_blocks(
        points.size(),
        [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) values[i] = u(points[i]);
        },
        workers);
    return values;
}

std::vector<Vec> holder_points(const Domain& omega)
{
    std::vector<Vec> pts;
    pts.reserve(omega.interior().size() + omega.vertices().size());
    for (const auto& node : omega.interior()) pts.push_back(node.point);
    for (const auto& v : omega.vertices()) pts.push_back(v);
    return pts;
}
}  // namespace

bool in_coarea_range(int n, double s, double p)
{
    return s > (n - 1.0) / n && s * p > n - 1.0;
}

double lp_norm(const VectorField& u, const Domain& omega, double p)
{
    if (!(p >= 1.0)) throw InvalidParameter("p must be at least 1");
    const auto& nodes = omega.interior();
    const SquarePower pw(0.5 * p);
    const double sum = parallel_sum(nodes.size(), [&](std::size_t i) {
        return nodes[i].weight * pw(u(nodes[i].point).squaredNorm());
    });
    return std::pow(sum, 1.0 / p);
}

double sup_norm(const VectorField& u, const Domain& omega)
{
    double best = 0.0;
    for (const auto& x : holder_points(omega)) best = std::max(best, u(x).norm());
    return best;
}

double fractional_seminorm_power(const std::vector<Vec>& points, const std::vector<double>& weights,
                                 const std::vector<Vec>& values, const std::vector<bool>& include, double s,
                                 double p, double delta_cut, std::size_t workers)
{
    check_sp(s, p);
    if (!(delta_cut > 0.0)) throw InvalidParameter("diagonal cutoff must be positive");
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (include.empty() || include[i]) keep.push_back(i);
    const std::size_t count = keep.size();
    if (count < 2) return 0.0;
    const int n = static_cast<int>(points[keep[0]].size());
    const int m = static_cast<int>(values[keep[0]].size());
    // Pairs at exactly one cell diameter (diagonal neighbours) are kept.
    const double cut2 = delta_cut * delta_cut * (1.0 - 1e-9);

    // Flattened copies keep the inner loop free of Eigen temporaries.
    std::vector<double> xs(count * n), vs(count * m), ws(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t i = keep[k];
        for (int d = 0; d < n; ++d) xs[k * n + d] = points[i](d);
        for (int d = 0; d < m; ++d) vs[k * m + d] = values[i](d);
        ws[k] = weights[i];
    }
    const SquarePower numerator(0.5 * p);
    const SquarePower kernel(0.5 * (n + s * p));

    std::vector<double> rows(count, 0.0);
    parallel_for_blocks(
        count,
        [&](std::size_t b, std::size_t e) {
            std::vector<double> terms;
            terms.reserve(count);
            for (std::size_t i = b; i < e; ++i) {
                terms.clear();
                const double* xi = &xs[i * n];
                const double* vi = &vs[i * m];
                for (std::size_t j = i + 1; j < count; ++j) {
                    const double* xj = &xs[j * n];
                    double r2 = 0.0;
                    for (int d = 0; d < n; ++d) {
                        const double t = xi[d] - xj[d];
                        r2 += t * t;
                    }
                    if (r2 < cut2) continue;
                    const double* vj = &vs[j * m];
                    double q = 0.0;
                    for (int d = 0; d < m; ++d) {
                        const double t = vi[d] - vj[d];
                        q += t * t;
                    }
                    if (q == 0.0) continue;
                    terms.push_back(ws[j] * numerator(q) / kernel(r2));
                }
                rows[i] = 2.0 * ws[i] * pairwise_sum(terms);
            }
        },
        workers);
    return pairwise_sum(rows);
}

double fractional_seminorm_power(const VectorField& u, const Domain& omega, double s, double p,
                                 double delta_cut, std::size_t workers)
{
    check_sp(s, p);
    const auto& nodes = omega.interior();
    std::vector<Vec> pts(nodes.size());
    std::vector<double> weights(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        pts[i] = nodes[i].point;
        weights[i] = nodes[i].weight;
    }
    const std::vector<Vec> values = sample(u, pts, workers);
    return fractional_seminorm_power(pts, weights, values, {}, s, p,
                                     delta_cut > 0.0 ? delta_cut : omega.cell_diameter(), workers);
}

double fractional_seminorm(const VectorField& u, const Domain& omega, double s, double p, double delta_cut,
                           std::size_t workers)
{
    return std::pow(fractional_seminorm_power(u, omega, s, p, delta_cut, workers), 1.0 / p);
}

double sobolev_norm(const VectorField& u, const Domain& omega, double s, double p, std::size_t workers)
{
    return lp_norm(u, omega, p) + fractional_seminorm(u, omega, s, p, 0.0, workers);
}

double holder_seminorm(const VectorField& u, const Domain& omega, double alpha, std::size_t workers)
{
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidParameter("Hölder exponent must lie in (0, 1]");
    const std::vector<Vec> pts = holder_points(omega);
    const std::vector<Vec> values = sample(u, pts, workers);
    const std::size_t count = pts.size();
    const SquarePower kernel(0.5 * alpha);
    std::vector<double> rows(count, 0.0);
    parallel_for_blocks(
        count,
        [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                double best = 0.0;
                for (std::size_t j = i + 1; j < count; ++j) {
                    const double r2 = (pts[i] - pts[j]).squaredNorm();
                    if (r2 == 0.0) continue;
                    const double q = (values[i] - values[j]).squaredNorm();
                    best = std::max(best, std::sqrt(q) / kernel(r2));
                }
                rows[i] = best;
            }
        },
        workers);
    return count == 0 ? 0.0 : *std::max_element(rows.begin(), rows.end());
}

double holder_norm(const VectorField& u, const Domain& omega, double alpha, std::size_t workers)
{
    return sup_norm(u, omega) + holder_seminorm(u, omega, alpha, workers);
}

}  // namespace fracjac
