#pragma once

#include <map>
#include <string>

#include "fracjac/field.hpp"

namespace fracjac::fields {

VectorField identity(int n = 2);
VectorField constant(const Vec& c, int n = 2);
/// x -> A x + b.
VectorField affine(const Mat& a, const Vec& b);
/// Winding map w_k(r, theta) = (r cos k theta, r sin k theta); det = k.
VectorField winding(int k);
/// x + eps (sin(pi x2), sin(pi x1)).
VectorField perturbation(double eps);
/// lin * x + amp * (W(x2), W(x1)) with the lacunary series
/// W(s) = sum_{j=0}^{level} 2^{-alpha j} sin(2^j s).
VectorField holder(double alpha, int level, double amp = 0.25, double lin = 1.0);
/// Lacunary series W and its derivative, exposed for tests.
double lacunary(double alpha, int level, double s);
double lacunary_derivative(double alpha, int level, double s);
/// Radial fold c x (1 - |x|^2), c = 3 sqrt(3) / 2; folds along |x| = 1/sqrt(3)
/// and sends the unit circle to 0, so its degree on the unit disk vanishes.
VectorField fold();
/// (x1^2, x2).
VectorField quad();
/// (x1^2, x1 x2).
VectorField quadshear();
/// (sin x1 cos x2, x1 x2).
VectorField sincos();

/// Default-parameter instances keyed by name: identity, affine,
/// winding(-2) ... winding(3), perturbation, holder, fold, quad, quadshear,
/// sincos.
std::map<std::string, VectorField> library();

/// Resolves either a library key ("winding(2)") or a spec string
/// ("winding:k=2", "holder:alpha=0.6:level=8"). Unknown names raise
/// LookupError.
VectorField lookup(const std::string& name);

}  // namespace fracjac::fields
