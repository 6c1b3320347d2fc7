#pragma once

#include <cstddef>
#include <vector>

#include "fracjac/domain.hpp"
#include "fracjac/field.hpp"

namespace fracjac {

struct NormParams {
    double s = 0.5;
    double p = 2.0;
    double alpha = 1.0;
    double delta_cut = 0.0;  // 0 selects one cell diameter
};

/// True when s > (n - 1) / n and s p > n - 1.
bool in_coarea_range(int n, double s, double p);

/// (sum_x w_x |u(x)|^p)^{1/p} over the interior quadrature.
double lp_norm(const VectorField& u, const Domain& omega, double p);
/// max over interior nodes and grid vertices of |u|.
double sup_norm(const VectorField& u, const Domain& omega);

/// [u]^p = sum over node pairs with |x - y| >= delta_cut of
/// w_x w_y |u(x) - u(y)|^p / |x - y|^{n + s p}. The near-diagonal strip is
/// omitted, so at fixed resolution this is a lower estimate. Independent of
/// the worker count.
double fractional_seminorm_power(const VectorField& u, const Domain& omega, double s, double p,
                                 double delta_cut = 0.0, std::size_t workers = 0);
/// Same double sum over explicit samples (points, weights and field values);
/// samples with include[i] == false are left out of the quadrature.
double fractional_seminorm_power(const std::vector<Vec>& points, const std::vector<double>& weights,
                                 const std::vector<Vec>& values, const std::vector<bool>& include, double s,
                                 double p, double delta_cut, std::size_t workers = 0);
/// p-th root of fractional_seminorm_power.
double fractional_seminorm(const VectorField& u, const Domain& omega, double s, double p,
                           double delta_cut = 0.0, std::size_t workers = 0);
/// ||u||_{L^p} + [u]_{W^{s,p}}.
double sobolev_norm(const VectorField& u, const Domain& omega, double s, double p, std::size_t workers = 0);

/// Grid Hölder seminorm max |u(x) - u(y)| / |x - y|^alpha over pairs of
/// interior nodes and grid vertices.
double holder_seminorm(const VectorField& u, const Domain& omega, double alpha, std::size_t workers = 0);
/// sup_norm + holder_seminorm.
double holder_norm(const VectorField& u, const Domain& omega, double alpha, std::size_t workers = 0);

}  // namespace fracjac
