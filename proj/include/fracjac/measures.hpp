#pragma once

#include <vector>

#include "fracjac/degree.hpp"
#include "fracjac/test_function.hpp"

namespace fracjac {

struct Atom {
    Vec x;
    int sign = 1;
};

/// scale * sum_i sign_i delta_{x_i}.
struct AtomicMeasure {
    std::vector<Atom> atoms;
    double scale = 1.0;

    bool empty() const { return atoms.empty(); }
    int total_sign() const;
    std::size_t positives() const;
    std::size_t negatives() const;
};

/// Atoms at the preimages of a regular value a with signs sgn det grad u and
/// scale omega_n. Throws BoundaryValue or SingularValue.
AtomicMeasure atomic_from_regular_value(const VectorField& u, const Domain& omega, const Vec& a);
AtomicMeasure atomic_from_regular_value(const DegreeSolver& solver, const Vec& a);

/// scale * sum sign psi(x).
double pair_atomic(const AtomicMeasure& mu, const TestFunction& psi);

/// mu - nu. Both measures must share a scale.
AtomicMeasure difference(const AtomicMeasure& mu, const AtomicMeasure& nu);

}  // namespace fracjac
