#pragma once

#include <functional>
#include <memory>
#include <string>

#include "fracjac/linalg.hpp"

namespace fracjac {

class Domain;

enum class Smoothness { smooth, holder, sobolev };

struct SmoothnessTag {
    Smoothness kind = Smoothness::smooth;
    double alpha = 1.0;  // Hölder exponent
    double s = 1.0;      // Sobolev order
    double p = 1.0;      // Sobolev integrability
};

/// A map u: R^n -> R^m with an evaluator and, optionally, an analytic
/// gradient. Evaluators are pure and safe to call concurrently.
///
/// `bandwidth` is the highest angular frequency present in the field (0 when
/// unknown or irrelevant); mollification uses it to size its quadrature.
class VectorField {
public:
    using Evaluator = std::function<Vec(const Vec&)>;
    using GradientEvaluator = std::function<Mat(const Vec&)>;

    VectorField() = default;
    VectorField(std::string name, int input_dim, int output_dim, Evaluator value,
                GradientEvaluator gradient = {}, SmoothnessTag tag = {}, double bandwidth = 0.0);

    Vec operator()(const Vec& x) const { return value_(x); }
    Vec value(const Vec& x) const { return value_(x); }

    bool has_analytic_gradient() const { return static_cast<bool>(gradient_); }
    Mat analytic_gradient(const Vec& x) const;

    const std::string& name() const { return name_; }
    int input_dim() const { return input_dim_; }
    int output_dim() const { return output_dim_; }
    const SmoothnessTag& smoothness() const { return tag_; }
    double bandwidth() const { return bandwidth_; }

    VectorField renamed(std::string name) const;

private:
    std::string name_;
    int input_dim_ = 0;
    int output_dim_ = 0;
    Evaluator value_;
    GradientEvaluator gradient_;
    SmoothnessTag tag_;
    double bandwidth_ = 0.0;
};

struct GradientMode {
    enum class Kind { automatic, analytic, finite_difference };
    Kind kind = Kind::automatic;
    double h = 0.0;  // finite-difference step; 0 selects the default

    static GradientMode analytic() { return {Kind::analytic, 0.0}; }
    static GradientMode fd(double h) { return {Kind::finite_difference, h}; }
};

/// Central-difference Jacobian (m x n) with step h.
Mat fd_gradient(const VectorField& u, const Vec& x, double h);

/// Jacobian d u_i / d x_j. `automatic` uses the analytic gradient when the
/// field provides one and central differences (h = 1e-5) otherwise.
Mat gradient(const VectorField& u, const Vec& x, GradientMode mode = {});

/// As above, but finite differences use the domain's default step and
/// require x to be at distance > h from the boundary (BoundaryProximity).
Mat gradient(const VectorField& u, const Vec& x, GradientMode mode, const Domain& omega);

/// F o u with chain-rule gradient.
VectorField compose(const VectorField& outer, const VectorField& inner);
/// u + v, u - v and c * u.
VectorField add(const VectorField& u, const VectorField& v);
VectorField subtract(const VectorField& u, const VectorField& v);
VectorField scale(const VectorField& u, double c);
/// x -> u(lambda * x).
VectorField rescale_argument(const VectorField& u, double lambda);

/// Diameter of u's range over the interior and boundary nodes of omega.
double range_diameter(const VectorField& u, const Domain& omega);

}  // namespace fracjac
