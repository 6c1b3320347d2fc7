#pragma once

#include <Eigen/Dense>

namespace fracjac {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Matrix obtained by deleting row `row` and column `col`.
Mat minor_matrix(const Mat& m, Eigen::Index row, Eigen::Index col);

/// Determinant by Laplace expansion along the first row (closed forms for
/// n <= 3). Exact polynomial in the entries; intended for the small n used
/// here.
double det_expansion(const Mat& m);

/// Determinant by partial-pivot LU. Independent route used to check
/// det_expansion.
double det_lu(const Mat& m);

/// Cofactor matrix, (cof M)_{ij} = (-1)^{i+j} det(minor_{ij}(M)).
/// Satisfies M * cof(M)^T = det(M) * I, including for singular M.
/// The 1x1 case returns [1].
Mat cofactor(const Mat& m);

/// Largest singular value.
double operator_norm(const Mat& m);

/// Rank-deficiency-safe smallest singular value.
double smallest_singular_value(const Mat& m);

/// Volume of the unit ball in R^n, pi^{n/2} / Gamma(n/2 + 1).
double unit_ball_volume(int n);

}  // namespace fracjac
