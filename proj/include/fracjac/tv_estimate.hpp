#pragma once

#include <functional>

#include "fracjac/domain.hpp"
#include "fracjac/test_function.hpp"

namespace fracjac {

struct TvEstimate {
    double value = 0.0;       // <T, psi*> for the assembled |psi*| <= 1
    int dictionary_size = 0;  // number of plateau functions
    int cells_per_axis = 0;
    double transition = 0.0;  // smoothing width of the plateaus and cutoff
};

/// Certified lower bound for |T|_TV = sup{<T, psi> : |psi| <= 1} over a
/// dictionary of K smoothed plateau functions: a smooth partition of unity
/// subordinate to an m x m grid over the bounding box of omega (m^2 <= K),
/// multiplied by a boundary cutoff. psi* = cutoff * sum_c sign(<T, phi_c>)
/// phi_c satisfies |psi*| <= 1 and <T, psi*> = sum_c |<T, phi_c>|. Nested
/// grids give nondecreasing estimates.
TvEstimate tv_estimate(const std::function<double(const TestFunction&)>& pairing, const Domain& omega, int K);

}  // namespace fracjac
