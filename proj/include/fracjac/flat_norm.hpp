#pragma once

#include <vector>

#include "fracjac/domain.hpp"
#include "fracjac/measures.hpp"

namespace fracjac {

/// Index value standing for the boundary sink.
inline constexpr int kBoundary = -1;

struct MatchPair {
    int positive = kBoundary;  // index into the measure's atoms, or kBoundary
    int negative = kBoundary;
    double cost = 0.0;         // unscaled
};

struct FlatNormResult {
    double value = 0.0;
    std::vector<MatchPair> matching;
    /// Primal cost minus the dual value from the assignment potentials
    /// (unscaled); zero up to rounding at optimality.
    double certificate_gap = 0.0;
};

/// W^{-1,1} norm of an atomic measure: scale times the cheapest way to pair
/// positive with negative atoms (cost |x - y|) or send atoms to the boundary
/// (cost dist(x, dOmega)). Solved exactly as a square assignment problem
/// (positives + one sink per negative) x (negatives + one sink per positive)
/// by the Hungarian method with potentials.
FlatNormResult flat_norm(const AtomicMeasure& mu, const Domain& omega);

/// Value implied by a matching, scale * sum of pair costs recomputed from
/// the atom positions.
double matching_value(const AtomicMeasure& mu, const Domain& omega, const std::vector<MatchPair>& matching);

/// Dense square assignment. Returns the column assigned to each row and
/// fills the row and column potentials (u_i + v_j <= c_ij, equality on the
/// assignment).
std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost, std::vector<double>& row_potential,
                                  std::vector<double>& col_potential);

}  // namespace fracjac
