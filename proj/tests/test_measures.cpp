#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fracjac/errors.hpp"
#include "fracjac/field_library.hpp"
#include "fracjac/flat_norm.hpp"
#include "fracjac/jacobian.hpp"
#include "fracjac/measures.hpp"
#include "fracjac/sampler.hpp"
#include "fracjac/tv_estimate.hpp"
#include "lp_oracle.hpp"

using namespace fracjac;

namespace {

constexpr double kPi = std::numbers::pi;

Vec v2(double a, double b)
{
    Vec v(2);
    v << a, b;
    return v;
}

Domain unit_square() { return Domain::rectangle(v2(0, 0), v2(1, 1), 16); }

AtomicMeasure random_measure(std::mt19937_64& rng, int count)
{
    AtomicMeasure mu;
    for (int i = 0; i < count; ++i)
        mu.atoms.push_back({v2(0.05 + 0.9 * unit_uniform(rng), 0.05 + 0.9 * unit_uniform(rng)),
                            unit_uniform(rng) < 0.5 ? 1 : -1});
    return mu;
}

double lp_value(const AtomicMeasure& mu)
{
    const std::size_t n = mu.atoms.size();
    std::vector<std::vector<double>> dist(n, std::vector<double>(n));
    std::vector<double> d(n);
    std::vector<int> sign(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec& x = mu.atoms[i].x;
        d[i] = std::min({x(0), x(1), 1 - x(0), 1 - x(1)});
        sign[i] = mu.atoms[i].sign;
        for (std::size_t j = 0; j < n; ++j) dist[i][j] = (x - mu.atoms[j].x).norm();
    }
    return mu.scale * oracle::flat_norm_dual(dist, d, sign);
}

}  // namespace

TEST(AtomicMeasure, FromRegularValue)
{
    const Domain disk = Domain::disk(v2(0, 0), 1.0, 64);
    const AtomicMeasure id = atomic_from_regular_value(fields::identity(), disk, v2(0.3, 0.2));
    ASSERT_EQ(id.atoms.size(), 1u);
    EXPECT_NEAR((id.atoms[0].x - v2(0.3, 0.2)).norm(), 0.0, 1e-12);
    EXPECT_EQ(id.atoms[0].sign, 1);
    EXPECT_DOUBLE_EQ(id.scale, kPi);
    const AtomicMeasure w = atomic_from_regular_value(fields::winding(2), disk, v2(0.5, 0));
    ASSERT_EQ(w.atoms.size(), 2u);
    EXPECT_EQ(w.atoms[0].sign, 1);
    EXPECT_EQ(w.atoms[1].sign, 1);
    EXPECT_TRUE(atomic_from_regular_value(fields::winding(2), disk, v2(5, 5)).empty());
    EXPECT_THROW(atomic_from_regular_value(fields::fold(), disk, v2(1, 0)), SingularValue);
}

TEST(FlatNorm, Examples)
{
    const Domain omega = unit_square();
    AtomicMeasure single;
    single.atoms.push_back({v2(0.3, 0.4), 1});
    EXPECT_NEAR(flat_norm(single, omega).value, 0.3, 1e-15);

    AtomicMeasure dipole;
    dipole.atoms = {{v2(0.4, 0.5), 1}, {v2(0.6, 0.5), -1}};
    EXPECT_NEAR(flat_norm(dipole, omega).value, 0.2, 1e-15);
    AtomicMeasure far_dipole;
    far_dipole.atoms = {{v2(0.05, 0.5), 1}, {v2(0.95, 0.5), -1}};
    EXPECT_NEAR(flat_norm(far_dipole, omega).value, 0.1, 1e-15);
    EXPECT_EQ(flat_norm(AtomicMeasure{}, omega).value, 0.0);
}

TEST(FlatNorm, AgreesWithLpOracle)
{
    const Domain omega = unit_square();
    std::mt19937_64 rng(21);
    for (int inst = 0; inst < 100; ++inst) {
        const AtomicMeasure mu = random_measure(rng, 1 + inst % 6);
        const FlatNormResult r = flat_norm(mu, omega);
        EXPECT_NEAR(r.value, lp_value(mu), 1e-9) << inst;
        EXPECT_NEAR(matching_value(mu, omega, r.matching), r.value, 1e-12);
        EXPECT_NEAR(r.certificate_gap, 0.0, 1e-9);
    }
}

TEST(FlatNorm, IsANorm)
{
    const Domain omega = unit_square();
    std::mt19937_64 rng(22);
    for (int inst = 0; inst < 50; ++inst) {
        const AtomicMeasure mu = random_measure(rng, 6);
        const AtomicMeasure nu = random_measure(rng, 6);
        AtomicMeasure sum = mu;
        sum.atoms.insert(sum.atoms.end(), nu.atoms.begin(), nu.atoms.end());
        EXPECT_LE(flat_norm(sum, omega).value, flat_norm(mu, omega).value + flat_norm(nu, omega).value + 1e-9);
        AtomicMeasure scaled = mu;
        scaled.scale = 2.5;
        EXPECT_NEAR(flat_norm(scaled, omega).value, 2.5 * flat_norm(mu, omega).value, 1e-9);
        AtomicMeasure neg = mu;
        for (auto& a : neg.atoms) a.sign = -a.sign;
        EXPECT_NEAR(flat_norm(neg, omega).value, flat_norm(mu, omega).value, 1e-9);
    }
}

TEST(FlatNorm, AssignmentSolver)
{
    const std::vector<std::vector<double>> cost{{4, 1, 3}, {2, 0, 5}, {3, 2, 2}};
    std::vector<double> u, v;
    const std::vector<int> col = solve_assignment(cost, u, v);
    double total = 0.0;
    for (int i = 0; i < 3; ++i) total += cost[i][col[i]];
    EXPECT_DOUBLE_EQ(total, 5.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_LE(u[i] + v[j], cost[i][j] + 1e-12);
}

TEST(PairAtomic, Examples)
{
    AtomicMeasure mu;
    mu.scale = kPi;
    mu.atoms.push_back({v2(0, 0), 1});
    const TestFunction psi = TestFunction::bump(v2(0, 0), 1.0, 0.7);
    EXPECT_NEAR(pair_atomic(mu, psi), 0.7 * kPi, 1e-15);
    AtomicMeasure dipole;
    dipole.atoms = {{v2(0.1, 0), 1}, {v2(-0.1, 0), -1}};
    EXPECT_NEAR(pair_atomic(dipole, psi), 0.0, 1e-15);
}

TEST(PairAtomic, BoundedByLipschitzTimesFlatNorm)
{
    const Domain omega = unit_square();
    std::mt19937_64 rng(23);
    for (int inst = 0; inst < 100; ++inst) {
        const AtomicMeasure mu = random_measure(rng, 1 + inst % 6);
        const double r = 0.05 + 0.3 * unit_uniform(rng);
        const Vec c = v2(r + (1 - 2 * r) * unit_uniform(rng), r + (1 - 2 * r) * unit_uniform(rng));
        const TestFunction psi = TestFunction::bump(c, r);
        // Lipschitz constant of (1 - s^2/r^2)^3: max of 6 s (1 - s^2)^2 / r at s = 1/sqrt(5).
        const double s = 1.0 / std::sqrt(5.0);
        const double lip = 6.0 * s * std::pow(1.0 - s * s, 2) / r;
        EXPECT_LE(std::abs(pair_atomic(mu, psi)), lip * flat_norm(mu, omega).value + 1e-12);
    }
}

TEST(AtomicMeasure, DifferenceAndCounts)
{
    AtomicMeasure mu, nu;
    mu.atoms = {{v2(0.2, 0.2), 1}, {v2(0.3, 0.3), -1}};
    nu.atoms = {{v2(0.5, 0.5), 1}};
    const AtomicMeasure d = difference(mu, nu);
    EXPECT_EQ(d.atoms.size(), 3u);
    EXPECT_EQ(d.total_sign(), -1);
    EXPECT_EQ(d.positives(), 1u);
    EXPECT_EQ(d.negatives(), 2u);
    nu.scale = 2.0;
    EXPECT_THROW(difference(mu, nu), InvalidParameter);
}

TEST(TvEstimate, IdentityOnUnitSquare)
{
    const Domain omega = Domain::rectangle(v2(0, 0), v2(1, 1), 64);
    const auto pairing = [&](const TestFunction& psi) {
        return jacobian_pairing(fields::identity(), psi, omega, PairingMode::direct);
    };
    const TvEstimate est = tv_estimate(pairing, omega, 256);
    EXPECT_GE(est.value, 0.95);
    EXPECT_LE(est.value, 1.0 + 1e-12);
    EXPECT_LE(est.dictionary_size, 256);
}

TEST(TvEstimate, SignChangingDensity)
{
    const Domain omega = Domain::rectangle(v2(-1, -1), v2(1, 1), 64);
    const auto pairing = [&](const TestFunction& psi) {
        return jacobian_pairing(fields::quad(), psi, omega, PairingMode::direct);
    };
    double previous = 0.0;
    for (int K : {16, 64, 256}) {
        const double v = tv_estimate(pairing, omega, K).value;
        EXPECT_GE(v, previous - 1e-12) << K;
        previous = v;
    }
    // int |2 x1| over [-1, 1]^2.
    EXPECT_GE(previous, 0.95 * 4.0);
    EXPECT_LE(previous, 4.0 + 1e-9);
}

TEST(TvEstimate, AtomicDipole)
{
    const Domain omega = Domain::rectangle(v2(0, 0), v2(1, 1), 64);
    AtomicMeasure dipole;
    dipole.scale = kPi;
    dipole.atoms = {{v2(0.3, 0.4), 1}, {v2(0.7, 0.6), -1}};
    const auto pairing = [&](const TestFunction& psi) { return pair_atomic(dipole, psi); };
    EXPECT_NEAR(tv_estimate(pairing, omega, 256).value, 2 * kPi, 1e-9);
}
