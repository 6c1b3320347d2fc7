#pragma once

#include "fracjac/domain.hpp"
#include "fracjac/lipschitz_set.hpp"
#include "fracjac/test_function.hpp"

namespace fracjac {

/// Polygonal approximation of E_t = {psi > t} by marching squares on a
/// `grid` x `grid` lattice over the support box of psi, with linear
/// interpolation along cell edges and normals -grad psi / |grad psi|.
/// Saddle cells are resolved by the cell-centre average.
///
/// Throws InvalidParameter for t <= 0 and CriticalLevel when |grad psi| <=
/// 1e-8 at a contour vertex. Returns an empty set when t >= max psi.
LipschitzSet sublevel_set(const TestFunction& psi, double t, const Domain& omega, int grid = 256);

}  // namespace fracjac
