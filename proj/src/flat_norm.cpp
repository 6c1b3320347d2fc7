#include "fracjac/flat_norm.hpp"

#include <cmath>
#include <limits>

#include "fracjac/errors.hpp"
#include "fracjac/parallel.hpp"

namespace fracjac {

std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost, std::vector<double>& row_potential,
                                  std::vector<double>& col_potential)
{
    const int n = static_cast<int>(cost.size());
    const double inf = std::numeric_limits<double>::infinity();
    // 1-based shortest augmenting path formulation; index 0 is a dummy.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        if (static_cast<int>(cost[i - 1].size()) != n) throw InvalidParameter("assignment cost must be square");
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> assignment(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] != 0) assignment[p[j] - 1] = j - 1;
    row_potential.assign(u.begin() + 1, u.end());
    col_potential.assign(v.begin() + 1, v.end());
    return assignment;
}

FlatNormResult flat_norm(const AtomicMeasure& mu, const Domain& omega)
{
    FlatNormResult result;
    std::vector<int> pos, neg;
    for (int i = 0; i < static_cast<int>(mu.atoms.size()); ++i) (mu.atoms[i].sign > 0 ? pos : neg).push_back(i);
    const int p = static_cast<int>(pos.size()), q = static_cast<int>(neg.size());
    const int n = p + q;
    if (n == 0) return result;

    // Rows: positives, then one sink per negative. Columns: negatives, then
    // one sink per positive.
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const bool real_row = r < p, real_col = c < q;
            if (real_row && real_col)
                cost[r][c] = (mu.atoms[pos[r]].x - mu.atoms[neg[c]].x).norm();
            else if (real_row)
                cost[r][c] = omega.distance_to_boundary(mu.atoms[pos[r]].x);
            else if (real_col)
                cost[r][c] = omega.distance_to_boundary(mu.atoms[neg[c]].x);
            else
                cost[r][c] = 0.0;
        }
    std::vector<double> ur, vc;
    const std::vector<int> assign = solve_assignment(cost, ur, vc);

    std::vector<double> primal_terms, dual_terms;
    for (int r = 0; r < n; ++r) {
        const int c = assign[r];
        primal_terms.push_back(cost[r][c]);
        dual_terms.push_back(ur[r]);
        dual_terms.push_back(vc[r]);
        const bool real_row = r < p, real_col = c < q;
        if (real_row && real_col)
            result.matching.push_back({pos[r], neg[c], cost[r][c]});
        else if (real_row)
            result.matching.push_back({pos[r], kBoundary, cost[r][c]});
        else if (real_col)
            result.matching.push_back({kBoundary, neg[c], cost[r][c]});
    }
    const double primal = pairwise_sum(primal_terms);
    result.certificate_gap = primal - pairwise_sum(dual_terms);
    result.value = std::abs(mu.scale) * primal;
    return result;
}

double matching_value(const AtomicMeasure& mu, const Domain& omega, const std::vector<MatchPair>& matching)
{
    std::vector<double> terms;
    for (const auto& m : matching) {
        if (m.positive != kBoundary && m.negative != kBoundary)
            terms.push_back((mu.atoms[m.positive].x - mu.atoms[m.negative].x).norm());
        else if (m.positive != kBoundary)
            terms.push_back(omega.distance_to_boundary(mu.atoms[m.positive].x));
        else if (m.negative != kBoundary)
            terms.push_back(omega.distance_to_boundary(mu.atoms[m.negative].x));
    }
    return std::abs(mu.scale) * pairwise_sum(terms);
}

}  // namespace fracjac
