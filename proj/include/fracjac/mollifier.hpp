#pragma once

#include <vector>

#include "fracjac/linalg.hpp"

namespace fracjac {

/// Standard mollifier eta(x) = c exp(-1 / (1 - |x|^2)) on the unit ball,
/// normalized to unit mass, and eta_t = t^{-n} eta(. / t).
class Mollifier {
public:
    struct Node {
        Vec offset;     // point of the unit ball
        double weight;  // discrete weights sum to 1
    };

    explicit Mollifier(int dim = 2);

    int dimension() const { return dim_; }
    /// Normalizing constant c (n = 2, 3).
    double constant() const { return c_; }
    double profile(const Vec& y) const;
    double scaled(const Vec& y, double t) const;
    /// Symmetric midpoint lattice with `per_axis` points across [-1, 1]^n,
    /// restricted to the unit ball, weights proportional to eta and summing
    /// to 1.
    std::vector<Node> nodes(int per_axis) const;
    /// Midpoint-rule value of int eta_t over its support (per_axis points
    /// across the support), without discrete renormalization.
    double mass(double t, int per_axis = 64) const;

private:
    int dim_;
    double c_;
};

}  // namespace fracjac
