#include "fracjac/field_library.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "fracjac/errors.hpp"
#include "fracjac/spec_string.hpp"

namespace fracjac::fields {

namespace {
constexpr double kPi = std::numbers::pi;

Vec vec2(double a, double b)
{
    Vec v(2);
    v << a, b;
    return v;
}

Mat mat2(double a, double b, double c, double d)
{
    Mat m(2, 2);
    m << a, b, c, d;
    return m;
}
}  // namespace

VectorField identity(int n)
{
    return VectorField(
        "identity", n, n, [](const Vec& x) { return x; },
        [n](const Vec&) -> Mat { return Mat::Identity(n, n); });
}

VectorField constant(const Vec& c, int n)
{
    const int m = static_cast<int>(c.size());
    return VectorField(
        "constant", n, m, [c](const Vec&) { return c; }, [m, n](const Vec&) -> Mat { return Mat::Zero(m, n); });
}

VectorField affine(const Mat& a, const Vec& b)
{
    if (a.rows() != b.size()) throw InvalidParameter("affine: A and b dimensions differ");
    return VectorField(
        "affine", static_cast<int>(a.cols()), static_cast<int>(a.rows()),
        [a, b](const Vec& x) -> Vec { return a * x + b; }, [a](const Vec&) -> Mat { return a; });
}

VectorField winding(int k)
{
    auto value = [k](const Vec& x) -> Vec {
        const double r = std::hypot(x(0), x(1));
        const double theta = std::atan2(x(1), x(0));
        return vec2(r * std::cos(k * theta), r * std::sin(k * theta));
    };
    auto grad = [k](const Vec& x) -> Mat {
        const double r2 = x(0) * x(0) + x(1) * x(1);
        if (r2 == 0.0) return k == 1 ? Mat(Mat::Identity(2, 2)) : Mat(Mat::Zero(2, 2));
        const double r = std::sqrt(r2);
        const double theta = std::atan2(x(1), x(0));
        const double c = std::cos(k * theta), s = std::sin(k * theta);
        // d r / dx = x / r, d theta / dx = (-x2, x1) / r^2.
        const double rx = x(0) / r, ry = x(1) / r;
        const double tx = -x(1) / r2, ty = x(0) / r2;
        return mat2(c * rx - r * k * s * tx, c * ry - r * k * s * ty,
                    s * rx + r * k * c * tx, s * ry + r * k * c * ty);
    };
    return VectorField("winding(" + std::to_string(k) + ")", 2, 2, value, grad);
}

VectorField perturbation(double eps)
{
    return VectorField(
        "perturbation", 2, 2,
        [eps](const Vec& x) { return vec2(x(0) + eps * std::sin(kPi * x(1)), x(1) + eps * std::sin(kPi * x(0))); },
        [eps](const Vec& x) {
            return mat2(1.0, eps * kPi * std::cos(kPi * x(1)), eps * kPi * std::cos(kPi * x(0)), 1.0);
        });
}

double lacunary(double alpha, int level, double s)
{
    double sum = 0.0;
    double freq = 1.0;
    for (int j = 0; j <= level; ++j, freq *= 2.0) sum += std::pow(freq, -alpha) * std::sin(freq * s);
    return sum;
}

double lacunary_derivative(double alpha, int level, double s)
{
    double sum = 0.0;
    double freq = 1.0;
    for (int j = 0; j <= level; ++j, freq *= 2.0) sum += std::pow(freq, 1.0 - alpha) * std::cos(freq * s);
    return sum;
}

VectorField holder(double alpha, int level, double amp, double lin)
{
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidParameter("holder field needs 0 < alpha <= 1");
    if (level < 0) throw InvalidParameter("holder field needs level >= 0");
    SmoothnessTag tag{Smoothness::holder, alpha, alpha, 1.0};
    // Per-term amplitudes amp 2^{-alpha j} and derivative amplitudes
    // amp 2^{(1 - alpha) j}.
    std::vector<double> freq, coef, dcoef;
    for (int j = 0; j <= level; ++j) {
        const double f = std::ldexp(1.0, j);
        freq.push_back(f);
        coef.push_back(amp * std::pow(f, -alpha));
        dcoef.push_back(amp * std::pow(f, 1.0 - alpha));
    }
    auto series = [freq, coef](double s) {
        double sum = 0.0;
        for (std::size_t j = 0; j < freq.size(); ++j) sum += coef[j] * std::sin(freq[j] * s);
        return sum;
    };
    auto dseries = [freq, dcoef](double s) {
        double sum = 0.0;
        for (std::size_t j = 0; j < freq.size(); ++j) sum += dcoef[j] * std::cos(freq[j] * s);
        return sum;
    };
    std::ostringstream name;
    name << "holder(" << alpha << ",level=" << level << ")";
    return VectorField(
        name.str(), 2, 2,
        [=](const Vec& x) { return vec2(lin * x(0) + series(x(1)), lin * x(1) + series(x(0))); },
        [=](const Vec& x) { return mat2(lin, dseries(x(1)), dseries(x(0)), lin); }, tag, std::ldexp(1.0, level));
}

VectorField fold()
{
    const double c = 1.5 * std::sqrt(3.0);
    return VectorField(
        "fold", 2, 2, [c](const Vec& x) -> Vec { return c * (1.0 - x.squaredNorm()) * x; },
        [c](const Vec& x) -> Mat {
            return c * ((1.0 - x.squaredNorm()) * Mat::Identity(2, 2) - 2.0 * x * x.transpose());
        });
}

VectorField quad()
{
    return VectorField(
        "quad", 2, 2, [](const Vec& x) { return vec2(x(0) * x(0), x(1)); },
        [](const Vec& x) { return mat2(2.0 * x(0), 0.0, 0.0, 1.0); });
}

VectorField quadshear()
{
    return VectorField(
        "quadshear", 2, 2, [](const Vec& x) { return vec2(x(0) * x(0), x(0) * x(1)); },
        [](const Vec& x) { return mat2(2.0 * x(0), 0.0, x(1), x(0)); });
}

VectorField sincos()
{
    return VectorField(
        "sincos", 2, 2, [](const Vec& x) { return vec2(std::sin(x(0)) * std::cos(x(1)), x(0) * x(1)); },
        [](const Vec& x) {
            return mat2(std::cos(x(0)) * std::cos(x(1)), -std::sin(x(0)) * std::sin(x(1)), x(1), x(0));
        });
}

std::map<std::string, VectorField> library()
{
    std::map<std::string, VectorField> lib;
    lib.emplace("identity", identity(2));
    lib.emplace("affine", affine(mat2(1.2, 0.3, -0.2, 0.9), vec2(0.1, -0.05)).renamed("affine"));
    for (int k = -2; k <= 3; ++k) lib.emplace("winding(" + std::to_string(k) + ")", winding(k));
    lib.emplace("perturbation", perturbation(0.1));
    lib.emplace("holder", holder(0.6, 8));
    lib.emplace("fold", fold());
    lib.emplace("quad", quad());
    lib.emplace("quadshear", quadshear());
    lib.emplace("sincos", sincos());
    return lib;
}

VectorField lookup(const std::string& name)
{
    {
        const auto lib = library();
        const auto it = lib.find(name);
        if (it != lib.end()) return it->second;
    }
    SpecString spec = [&] {
        try {
            return SpecString::parse(name);
        } catch (const ConfigError& e) {
            throw LookupError("unknown field '" + name + "': " + e.what());
        }
    }();
    const std::string& kind = spec.name();
    if (kind == "identity") {
        spec.only({"n"});
        return identity(spec.integer("n", 2));
    }
    if (kind == "winding") {
        spec.only({"k"});
        return winding(spec.integer("k", 1));
    }
    if (kind == "perturbation") {
        spec.only({"eps"});
        return perturbation(spec.number("eps", 0.1));
    }
    if (kind == "holder") {
        spec.only({"alpha", "level", "amp", "lin"});
        return holder(spec.number("alpha", 0.6), spec.integer("level", 8), spec.number("amp", 0.25),
                      spec.number("lin", 1.0));
    }
    if (kind == "affine") {
        spec.only({"a11", "a12", "a21", "a22", "b1", "b2"});
        return affine(mat2(spec.number("a11", 1.0), spec.number("a12", 0.0), spec.number("a21", 0.0),
                           spec.number("a22", 1.0)),
                      vec2(spec.number("b1", 0.0), spec.number("b2", 0.0)));
    }
    if (kind == "constant") {
        spec.only({"c1", "c2"});
        return constant(vec2(spec.number("c1", 0.0), spec.number("c2", 0.0)));
    }
    if (kind == "fold" || kind == "quad" || kind == "quadshear" || kind == "sincos") {
        spec.only({});
        return library().at(kind);
    }
    throw LookupError("unknown field '" + name + "'");
}

}  // namespace fracjac::fields
