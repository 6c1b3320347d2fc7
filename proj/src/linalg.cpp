#include "fracjac/linalg.hpp"

#include <cmath>
#include <numbers>

#include "fracjac/errors.hpp"

namespace fracjac {

Mat minor_matrix(const Mat& m, Eigen::Index row, Eigen::Index col)
{
    const Eigen::Index n = m.rows();
    Mat out(n - 1, m.cols() - 1);
    for (Eigen::Index i = 0, oi = 0; i < n; ++i) {
        if (i == row) continue;
        for (Eigen::Index j = 0, oj = 0; j < m.cols(); ++j) {
            if (j == col) continue;
            out(oi, oj++) = m(i, j);
        }
        ++oi;
    }
    return out;
}

double det_expansion(const Mat& m)
{
    if (m.rows() != m.cols()) throw InvalidParameter("det_expansion: matrix is not square");
    switch (m.rows()) {
    case 0:
        return 1.0;
    case 1:
        return m(0, 0);
    case 2:
        return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
        return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
             - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
             + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default:
        break;
    }
    double det = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (m(0, j) == 0.0) continue;
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        det += sign * m(0, j) * det_expansion(minor_matrix(m, 0, j));
    }
    return det;
}

double det_lu(const Mat& m)
{
    if (m.rows() != m.cols()) throw InvalidParameter("det_lu: matrix is not square");
    if (m.rows() == 0) return 1.0;
    return m.partialPivLu().determinant();
}

Mat cofactor(const Mat& m)
{
    if (m.rows() != m.cols()) throw InvalidParameter("cofactor: matrix is not square");
    const Eigen::Index n = m.rows();
    Mat c(n, n);
    if (n == 1) {
        c(0, 0) = 1.0;
        return c;
    }
    if (n == 2) {
        c << m(1, 1), -m(1, 0),
             -m(0, 1), m(0, 0);
        return c;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
            c(i, j) = sign * det_expansion(minor_matrix(m, i, j));
        }
    }
    return c;
}

double operator_norm(const Mat& m)
{
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

double smallest_singular_value(const Mat& m)
{
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

double unit_ball_volume(int n)
{
    if (n < 1) throw InvalidParameter("unit_ball_volume: dimension must be positive");
    const double half = 0.5 * n;
    return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

}  // namespace fracjac
