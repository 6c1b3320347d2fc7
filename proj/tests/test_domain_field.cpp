#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fracjac/domain.hpp"
#include "fracjac/errors.hpp"
#include "fracjac/field.hpp"
#include "fracjac/field_library.hpp"
#include "fracjac/linalg.hpp"
#include "fracjac/spec_string.hpp"

using namespace fracjac;

namespace {

constexpr double kPi = std::numbers::pi;

Vec v2(double a, double b)
{
    Vec v(2);
    v << a, b;
    return v;
}

double weight_sum(const Domain& d)
{
    double s = 0.0;
    for (const auto& n : d.interior()) s += n.weight;
    return s;
}

double boundary_sum(const Domain& d)
{
    double s = 0.0;
    for (const auto& n : d.boundary()) s += n.weight;
    return s;
}

}  // namespace

TEST(Domain, RectangleWeightsAndPerimeter)
{
    const Domain d = Domain::rectangle(v2(-1, 0), v2(2, 0.5), 32);
    EXPECT_NEAR(weight_sum(d), 1.5, 1.5e-3);
    EXPECT_NEAR(boundary_sum(d), 7.0, 7e-3);
    EXPECT_DOUBLE_EQ(d.volume(), 1.5);
    EXPECT_DOUBLE_EQ(d.boundary_measure(), 7.0);
}

TEST(Domain, DiskAndAnnulusWeights)
{
    const Domain disk = Domain::disk(v2(0.2, -0.1), 0.7, 48);
    EXPECT_NEAR(weight_sum(disk), kPi * 0.49, kPi * 0.49e-3);
    EXPECT_NEAR(boundary_sum(disk), 2 * kPi * 0.7, 2 * kPi * 0.7e-3);
    const Domain ann = Domain::annulus(v2(0, 0), 0.5, 1.0, 48);
    EXPECT_NEAR(weight_sum(ann), 0.75 * kPi, 0.75e-3 * kPi);
    EXPECT_NEAR(boundary_sum(ann), 3 * kPi, 3e-3 * kPi);
    EXPECT_EQ(ann.boundary_loop_count(), 2);
}

TEST(Domain, BoundaryNormalsAreUnitAndOutward)
{
    for (const Domain& d : {Domain::rectangle(v2(0, 0), v2(1, 1), 16), Domain::disk(v2(0, 0), 1.0, 16),
                            Domain::annulus(v2(0, 0), 0.4, 1.0, 16)}) {
        for (const auto& n : d.boundary()) {
            EXPECT_NEAR(n.normal.norm(), 1.0, 1e-14);
            EXPECT_FALSE(d.contains(n.point + 1e-3 * n.normal));
            EXPECT_TRUE(d.contains(n.point - 1e-3 * n.normal));
        }
    }
}

TEST(Domain, InteriorNodesInside)
{
    const Domain d = Domain::annulus(v2(0, 0), 0.5, 1.0, 16);
    for (const auto& n : d.interior()) EXPECT_TRUE(d.contains(n.point));
    EXPECT_NEAR(d.distance_to_boundary(v2(0.75, 0)), 0.25, 1e-15);
    EXPECT_NEAR(d.distance_to_boundary(v2(0, 0)), 0.5, 1e-15);
}

TEST(Domain, DegenerateGeometryThrows)
{
    EXPECT_THROW(Domain::rectangle(v2(0, 0), v2(1, 0), 8), InvalidGeometry);
    EXPECT_THROW(Domain::rectangle(v2(1, 0), v2(0, 1), 8), InvalidGeometry);
    EXPECT_THROW(Domain::disk(v2(0, 0), 0.0, 8), InvalidGeometry);
    EXPECT_THROW(Domain::annulus(v2(0, 0), 1.0, 0.5, 8), InvalidGeometry);
}

TEST(Domain, ParseSpecStrings)
{
    EXPECT_DOUBLE_EQ(parse_domain("square").volume(), 1.0);
    EXPECT_EQ(parse_domain("disk:r=2:res=20").resolution(), 20);
    EXPECT_DOUBLE_EQ(parse_domain("rect:x0=-1:y0=-1:x1=1:y1=1").volume(), 4.0);
    EXPECT_THROW(parse_domain("disk:radius=2"), ConfigError);
    EXPECT_THROW(parse_domain("hexagon"), ConfigError);
}

TEST(SpecString, KeysAndValues)
{
    const SpecString s = SpecString::parse("holder:alpha=0.6:level=8");
    EXPECT_EQ(s.name(), "holder");
    EXPECT_DOUBLE_EQ(s.number("alpha"), 0.6);
    EXPECT_EQ(s.integer("level", 0), 8);
    EXPECT_DOUBLE_EQ(s.number("amp", 0.25), 0.25);
    try {
        s.only({"alpha"});
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("level"), std::string::npos);
    }
}

TEST(Linalg, CofactorExamples)
{
    Mat a(2, 2);
    a << 1, 2, 3, 4;
    Mat c2(2, 2);
    c2 << 4, -3, -2, 1;
    EXPECT_TRUE(cofactor(a).isApprox(c2, 0.0));
    Mat d = Vec::LinSpaced(3, 2, 4).asDiagonal();
    Mat c3 = Mat::Zero(3, 3);
    c3.diagonal() << 12, 8, 6;
    EXPECT_TRUE(cofactor(d).isApprox(c3, 0.0));
    EXPECT_DOUBLE_EQ(cofactor(Mat::Constant(1, 1, 5.0))(0, 0), 1.0);
}

TEST(Linalg, CofactorIdentityOnSingularMatrices)
{
    Mat s(3, 3);
    s << 1, 2, 3, 2, 4, 6, 0, 1, 1;
    EXPECT_NEAR((s * cofactor(s).transpose()).norm(), 0.0, 1e-13);
    Mat r(3, 3);
    r << 2, -1, 0.5, 0.3, 1.7, -2, 1, 1, 1;
    EXPECT_NEAR((r * cofactor(r).transpose() - det_expansion(r) * Mat::Identity(3, 3)).norm(), 0.0, 1e-13);
}

TEST(Linalg, DeterminantRoutesAgree)
{
    Mat m(3, 3);
    m << 0.2, 1.5, -0.7, 2.2, 0.1, 0.4, -1.0, 0.9, 3.3;
    EXPECT_NEAR(det_expansion(m), det_lu(m), 1e-13);
    EXPECT_NEAR(unit_ball_volume(2), kPi, 1e-15);
    EXPECT_NEAR(unit_ball_volume(3), 4.0 * kPi / 3.0, 1e-15);
}

TEST(Field, FiniteDifferenceConvergesAtSecondOrder)
{
    const VectorField u = fields::sincos();
    const Vec x = v2(0.4, 0.7);
    const Mat exact = u.analytic_gradient(x);
    const double e1 = (fd_gradient(u, x, 1e-2) - exact).norm();
    const double e2 = (fd_gradient(u, x, 5e-3) - exact).norm();
    const double factor = e1 / e2;
    EXPECT_GE(factor, 3.5);
    EXPECT_LE(factor, 4.5);
}

TEST(Field, AnalyticGradientsMatchFiniteDifferences)
{
    for (const auto& [name, u] : fields::library()) {
        if (!u.has_analytic_gradient()) continue;
        for (const Vec& x : {v2(0.31, 0.17), v2(-0.42, 0.55), v2(0.6, -0.25)}) {
            EXPECT_LT((u.analytic_gradient(x) - fd_gradient(u, x, 1e-6)).norm(), 1e-6) << name;
        }
    }
}

TEST(Field, WindingValuesAndDeterminant)
{
    const VectorField w = fields::winding(2);
    const Vec x = v2(std::cos(kPi / 4), std::sin(kPi / 4));
    EXPECT_NEAR((w(x) - v2(0, 1)).norm(), 0.0, 1e-15);
    for (int k = -2; k <= 3; ++k)
        EXPECT_NEAR(det_expansion(gradient(fields::winding(k), v2(0.3, -0.5))), k, 1e-12) << k;
}

TEST(Field, CompositionAndArithmetic)
{
    const VectorField u = fields::quad();
    const VectorField v = fields::identity();
    const Vec x = v2(0.5, -1.5);
    EXPECT_NEAR((add(u, v)(x) - v2(0.75, -3.0)).norm(), 0.0, 1e-15);
    EXPECT_NEAR((subtract(u, v)(x) - v2(-0.25, 0.0)).norm(), 0.0, 1e-15);
    EXPECT_NEAR((scale(u, 2.0)(x) - v2(0.5, -3.0)).norm(), 0.0, 1e-15);
    const VectorField uu = compose(u, u);
    EXPECT_NEAR((uu(x) - v2(0.0625, -1.5)).norm(), 0.0, 1e-15);
    EXPECT_LT((gradient(uu, x) - fd_gradient(uu, x, 1e-6)).norm(), 1e-7);
    EXPECT_NEAR((rescale_argument(u, 2.0)(x) - v2(1.0, -3.0)).norm(), 0.0, 1e-15);
}

TEST(Field, GradientNearBoundaryThrows)
{
    const Domain d = Domain::rectangle(v2(0, 0), v2(1, 1), 8);
    const VectorField u = VectorField("rough", 2, 2, [](const Vec& x) { return x; });
    EXPECT_THROW(gradient(u, v2(1e-6, 0.5), GradientMode::fd(1e-3), d), BoundaryProximity);
    EXPECT_NO_THROW(gradient(u, v2(0.5, 0.5), GradientMode::fd(1e-3), d));
}

TEST(Field, LookupResolvesNamesAndSpecs)
{
    EXPECT_EQ(fields::lookup("winding(2)")(v2(1, 0)), fields::winding(2)(v2(1, 0)));
    EXPECT_EQ(fields::lookup("winding:k=3")(v2(0.3, 0.4)), fields::winding(3)(v2(0.3, 0.4)));
    EXPECT_THROW(fields::lookup("nosuchfield"), LookupError);
}
