#pragma once

// Dense two-phase-free simplex for max c^T y, A y <= b, y >= 0 with b >= 0
// (the origin is feasible). Bland's rule, so it terminates on degenerate
// instances. Test-only oracle.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oracle {

inline double simplex_max(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                          const std::vector<double>& c)
{
    const std::size_t m = A.size(), n = c.size();
    // Tableau rows 0..m-1 constraints, row m objective (reduced costs).
    std::vector<std::vector<double>> T(m + 1, std::vector<double>(n + m + 1, 0.0));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (b[i] < -1e-12) throw std::invalid_argument("simplex_max needs b >= 0");
        for (std::size_t j = 0; j < n; ++j) T[i][j] = A[i][j];
        T[i][n + i] = 1.0;
        T[i][n + m] = std::max(b[i], 0.0);
        basis[i] = n + i;
    }
    for (std::size_t j = 0; j < n; ++j) T[m][j] = -c[j];
    const double eps = 1e-12;
    for (int iter = 0; iter < 100000; ++iter) {
        std::size_t enter = n + m;
        for (std::size_t j = 0; j < n + m; ++j)
            if (T[m][j] < -eps) {
                enter = j;
                break;
            }
        if (enter == n + m) return T[m][n + m];
        std::size_t leave = m;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i)
            if (T[i][enter] > eps) {
                const double ratio = T[i][n + m] / T[i][enter];
                if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && leave < m && basis[i] < basis[leave])) {
                    best = ratio;
                    leave = i;
                }
            }
        if (leave == m) throw std::runtime_error("unbounded LP");
        const double piv = T[leave][enter];
        for (auto& v : T[leave]) v /= piv;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == leave || T[i][enter] == 0.0) continue;
            const double f = T[i][enter];
            for (std::size_t j = 0; j <= n + m; ++j) T[i][j] -= f * T[leave][j];
        }
        basis[leave] = enter;
    }
    throw std::runtime_error("simplex iteration limit");
}

/// sup { sum_i s_i psi(x_i) : |psi(x_i) - psi(x_j)| <= |x_i - x_j|, |psi(x_i)| <= d_i }
/// i.e. the Lipschitz-1 dual restricted to the atoms, psi vanishing on the
/// boundary (d_i = distance of atom i to the boundary). Any feasible vector
/// extends to a 1-Lipschitz function vanishing on the boundary, so this is
/// the exact value of the dual problem.
inline double flat_norm_dual(const std::vector<std::vector<double>>& dist, const std::vector<double>& d,
                             const std::vector<int>& sign)
{
    const std::size_t k = d.size();
    // y_i = psi_i + d_i in [0, 2 d_i].
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            if (i == j) continue;
            std::vector<double> row(k, 0.0);
            row[i] = 1.0;
            row[j] = -1.0;
            A.push_back(row);
            b.push_back(dist[i][j] + d[i] - d[j]);
        }
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<double> row(k, 0.0);
        row[i] = 1.0;
        A.push_back(row);
        b.push_back(2.0 * d[i]);
    }
    std::vector<double> c(k);
    double offset = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        c[i] = sign[i];
        offset += sign[i] * d[i];
    }
    if (k == 0) return 0.0;
    return simplex_max(A, b, c) - offset;
}

}  // namespace oracle
