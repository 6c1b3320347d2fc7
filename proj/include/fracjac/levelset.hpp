#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fracjac/extension.hpp"
#include "fracjac/measures.hpp"
#include "fracjac/preimage.hpp"

namespace fracjac {

enum class EndpointClass { bottom, top, lateral, closed_loop };

std::string to_string(EndpointClass c);

struct Endpoint {
    EndpointClass kind = EndpointClass::closed_loop;
    Vec point;     // (x, t)
    int sign = 0;  // sgn det grad_x U at bottom/top endpoints, 0 otherwise
};

/// A connected piece of U^{-1}(a) in omega x (t_lo, t_hi), stored as a
/// polyline in R^{n+1}.
struct LevelCurve {
    std::vector<Vec> vertices;
    double length = 0.0;
    Endpoint start, end;
    bool closed = false;
};

double curve_length(const LevelCurve& c);

struct TraceOptions {
    double max_step = 0.01;
    double step_scale = 0.2;          // step = min(max_step, step_scale / |grad U|)
    double tolerance_factor = 1e-9;   // tol = factor * range diameter of U
    double min_singular_value = 1e-6;
    std::size_t max_steps = 100000;
    int lateral_cells_per_unit = 0;   // 0 derives it from the domain grid
};

struct TraceResult {
    std::vector<LevelCurve> curves;
    AtomicMeasure bottom;  // Ju_{t_lo}^a
    AtomicMeasure top;     // Ju_{t_hi}^a
    /// Slice atoms that no traced curve ends at.
    std::vector<Vec> unmatched_atoms;
    bool complete = true;
    double total_length() const;
};

/// Predictor-corrector continuation of U^{-1}(a) over omega x [t_lo, t_hi]
/// (n = 2). Tangents are the kernel of the 2 x 3 joint gradient, corrections
/// are Gauss-Newton steps with the pseudo-inverse. Curves are seeded from
/// every preimage of a on both end slices and from a scan of the lateral
/// boundary, traced until they cross a slice (bisected onto it) or leave the
/// domain (bisected onto the boundary), and deduplicated by endpoints.
///
/// The end slices and the lateral surface are sampled once at construction,
/// so one tracer serves many targets. Throws SingularCurve when the joint
/// gradient degenerates along a curve and SingularValue when a slice
/// preimage is singular.
class LevelSetTracer {
public:
    LevelSetTracer(const ExtensionField& U, double t_lo, double t_hi, TraceOptions options = {},
                   std::size_t workers = 0);

    TraceResult trace(const Vec& a) const;
    double t_lo() const { return t_lo_; }
    double t_hi() const { return t_hi_; }
    double tolerance() const { return tol_; }
    const ExtensionField& field() const { return U_; }
    /// Atoms of the slice t_lo (bottom) or t_hi (top).
    AtomicMeasure slice_measure(const Vec& a, bool bottom) const;
    /// Bounding box of U over omega x [t_lo, t_hi] sampled on the grids.
    const Vec& range_lower() const { return range_lo_; }
    const Vec& range_upper() const { return range_hi_; }

private:
    struct Point {
        Vec x;
        double t;
    };
    bool correct(Vec& p, const Vec& a) const;
    LevelCurve follow(const Vec& start, EndpointClass start_kind, const Vec& a) const;
    Vec tangent(const Mat& joint) const;
    void finish_on_slice(Vec& p, double t, const Vec& a) const;

    const ExtensionField& U_;
    double t_lo_, t_hi_;
    TraceOptions options_;
    double tol_ = 0.0;
    std::unique_ptr<PreimageFinder> bottom_, top_, lateral_;
    Vec range_lo_, range_hi_;
};

/// Convenience wrapper around LevelSetTracer.
std::vector<LevelCurve> trace_level_set(const ExtensionField& U, const Vec& a, double t_lo, double t_hi,
                                        TraceOptions options = {});

struct CauchyCheck {
    double lhs = 0.0;  // flat norm of Ju_{t_k}^a - Ju_{t_l}^a
    double rhs = 0.0;  // omega_n * traced length
    TraceResult trace;
};

CauchyCheck cauchy_gap_check(const ExtensionField& U, const Vec& a, double t_k, double t_l,
                             TraceOptions options = {});
CauchyCheck cauchy_gap_check(const LevelSetTracer& tracer, const Vec& a);

struct CoareaCheck {
    double lhs = 0.0;  // box volume * mean traced length
    double rhs = 0.0;  // quadrature of |JU| over the slab
    double standard_error = 0.0;
    std::size_t samples = 0;
    std::size_t skipped = 0;
    double skip_fraction = 0.0;
    bool unreliable = false;  // skip fraction above 10%
    Vec box_lower, box_upper;
};

/// |JU| = sqrt(sum of squared n x n minors of the n x (n + 1) joint gradient).
double coarea_factor(const Mat& joint);

/// Quadrature of |JU| over omega x [t_lo, t_hi] with `levels` midpoint
/// slices in t.
double jacobian_slab_integral(const ExtensionField& U, double t_lo, double t_hi, int levels = 16,
                              std::size_t workers = 0);

/// Monte Carlo estimate of int H^1(U^{-1}(a)) da over a uniform box covering
/// the range of U on the slab (inflated by 20% of its diameter), against the
/// |JU| quadrature. Samples are drawn sequentially from the seed and traced
/// in parallel; singular targets are skipped and counted.
CoareaCheck coarea_extension_check(const ExtensionField& U, double t_lo, double t_hi, std::size_t samples,
                                   std::uint64_t seed, TraceOptions options = {}, std::size_t workers = 0);

}  // namespace fracjac
