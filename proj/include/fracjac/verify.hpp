#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "fracjac/domain.hpp"
#include "fracjac/field.hpp"
#include "fracjac/lipschitz_set.hpp"
#include "fracjac/test_function.hpp"

namespace fracjac {

/// A C^1 change of variables F: R^n -> R^n with a declared global Lipschitz
/// bound.
class ChangeOfVariables {
public:
    ChangeOfVariables(VectorField f, double lipschitz);

    static ChangeOfVariables identity(int n = 2);
    static ChangeOfVariables linear(const Mat& a);

    const VectorField& field() const { return f_; }
    const std::string& name() const { return f_.name(); }
    double lipschitz() const { return lipschitz_; }
    Vec operator()(const Vec& y) const { return f_(y); }
    double det(const Vec& y) const;
    /// Largest |F(x) - F(y)| / |x - y| over `pairs` random pairs in the box
    /// [-extent, extent]^n. Throws InvalidParameter when it exceeds the
    /// declared bound.
    double check_lipschitz(std::size_t pairs = 10000, std::uint64_t seed = 1, double extent = 3.0) const;

private:
    VectorField f_;
    double lipschitz_;
};

/// Parses `identity`, `linear:a11=..:a12=..:a21=..:a22=..`,
/// `sinpert:eps=0.1` (y + eps (sin y2, sin y1)), `shear:c=0.5`
/// ((y1 + c tanh y2, y2)) and `twist:c=0.25`
/// ((y1 + c sin(y1 + y2), y2 - c cos(y1 - y2))).
ChangeOfVariables parse_change_of_variables(const std::string& spec);

struct ExperimentReport {
    std::string experiment;
    std::map<std::string, std::string> inputs;
    std::uint64_t seed = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    /// Upper end of a bracketed left-hand side [lhs, lhs_upper]; NaN when
    /// lhs is a plain value.
    double lhs_upper = std::numeric_limits<double>::quiet_NaN();
    double abs_gap = 0.0;
    double rel_gap = 0.0;
    double standard_error = -1.0;  // negative when not applicable
    std::size_t samples = 0;
    std::size_t skipped = 0;
    double skip_fraction = 0.0;
    double singular_fraction = 0.0;
    double runtime_ms = 0.0;
    /// Declared tolerance: |lhs - rhs| <= tol_sigma * se + tol_rel * |lhs| + tol_abs.
    double tol_rel = 0.0;
    double tol_sigma = 0.0;
    double tol_abs = 0.0;
    bool unreliable = false;
    bool pass = false;
    /// Extra per-item rows (per-epsilon sweeps, per-ratio values).
    std::vector<std::map<std::string, double>> rows;
    std::vector<std::string> notes;
};

/// Recomputes pass/fail from lhs, rhs, standard error and tolerances. For a
/// bracketed lhs the test is overlap of [lhs, lhs_upper] with
/// rhs -+ tol_sigma * se, each widened by tol_rel. Any row carrying an
/// "ok" entry equal to 0 fails the report.
bool gap_within_tolerance(const ExperimentReport& r);
/// Fills abs_gap, rel_gap and pass (from gap_within_tolerance).
void finalize_gap(ExperimentReport& r);

struct SamplerSpec {
    std::uint64_t seed = 42;
    std::size_t samples = 5000;
    double margin = 0.2;  // box inflation relative to the range diameter
};

/// Checks the identity <Ju, psi> = (1/omega_n) int <Ju^a, psi> da by Monte
/// Carlo over a. Rough (non-smooth tag) fields are mollified at the scales
/// in `mollify` and both sides are extrapolated linearly to t = 0 from the
/// two smallest scales.
ExperimentReport weak_coarea_experiment(const VectorField& u, const TestFunction& psi, const Domain& omega,
                                        const SamplerSpec& sampler, std::vector<double> mollify = {0.02, 0.04},
                                        std::size_t workers = 0);

/// <J(F o u), psi> = (1/omega_n) int det grad F(a) <Ju^a, psi> da.
ExperimentReport weak_chain_experiment(const VectorField& u, const ChangeOfVariables& f, const TestFunction& psi,
                                       const Domain& omega, const SamplerSpec& sampler,
                                       std::vector<double> mollify = {0.02, 0.04}, std::size_t workers = 0);

/// <J(F o u), psi> (divergence quadrature) against <Ju, psi det grad F(u)>
/// (direct quadrature); tolerance 1e-3 relative.
ExperimentReport strong_chain_experiment(const VectorField& u, const ChangeOfVariables& f, const TestFunction& psi,
                                         const Domain& omega, std::size_t workers = 0);

/// |Ju|_TV bracket [tv_estimate(K), int |det grad u|] against the area
/// formula int #u^{-1}(a) da by Monte Carlo. Passes when the bracket and the
/// Monte Carlo value overlap within 5% (plus three standard errors).
ExperimentReport strong_coarea_experiment(const VectorField& u, const Domain& omega, const SamplerSpec& sampler,
                                          int K = 256, std::size_t workers = 0);

/// For each epsilon: lhs = <J(F o u_eps), chi_E> by the boundary integral of
/// j(F o u_eps) over dE, rhs = Monte Carlo of det grad F(a) <J u_eps^a,
/// chi_E> / omega_n. Successive differences of lhs are compared with
/// ||u_eps - u_eps'||_{C^{0, alpha_norm}} Per(E) times a constant C fitted
/// in log space (geometric mean of the ratios); every ratio must lie within
/// [C / constant_factor, C * constant_factor].
struct HolderChainOptions {
    std::vector<double> eps = {0.08, 0.04, 0.02, 0.01};
    double alpha_norm = 0.55;
    double tol_rel = 0.03;
    double tol_sigma = 3.0;
    double constant_factor = 2.0;
    int norm_resolution = 24;
};
ExperimentReport holder_chain_experiment(const VectorField& u, const ChangeOfVariables& f, const LipschitzSet& e,
                                         const Domain& omega, const SamplerSpec& sampler,
                                         const HolderChainOptions& options = {}, std::size_t workers = 0);

/// I(eps) = Monte Carlo mean over a in B(0, R) of
/// ||(u + eps w)^a - u^a||^n in W^{(n-1)/n, n}, with the same targets for
/// every eps. Requires s > (n - 1)/n and s p > n - 1. Passes when I is
/// nonincreasing along the decreasing eps sequence and the fitted log-log
/// rate is positive.
ExperimentReport ua_continuity_experiment(const VectorField& u, const VectorField& w, const std::vector<double>& eps,
                                          double s, double p, double radius, const Domain& omega,
                                          const SamplerSpec& sampler, std::size_t workers = 0);

/// Pairing gap |<Ju - Jv, psi>| and the three stability products
///   ||u - v||_{W^{(n-1)/n,n}} (||u|| + ||v||)^{n-1} ||grad psi||_inf,
///   ||u - v||_{W^{n/(n+1),n+1}} (||u|| + ||v||)^{n-1} ||psi||_{W^{n/(n+1),n+1}},
///   ||u - v||_{C^{0,alpha}} (||u|| + ||v||)^{n-1} ||grad psi||_{L^1},
/// reported as rows {gap, product_k, ratio_k}. lhs = gap, rhs = first
/// product.
ExperimentReport stability_experiment(const VectorField& u, const VectorField& v, const TestFunction& psi,
                                      const Domain& omega, double alpha = 0.75, std::size_t workers = 0);

/// Layer-cake route to the weak coarea right-hand side for psi >= 0:
/// int_0^sup (1/omega_n) int <Ju^a, chi_{E_t}> da dt with E_t = {psi > t},
/// using `levels` midpoint levels and the boundary flux for each set.
double layer_cake_rhs(const VectorField& u, const TestFunction& psi, const Domain& omega, const SamplerSpec& sampler,
                      int levels = 50, std::size_t workers = 0);

std::vector<std::string> experiment_names();

}  // namespace fracjac
