#include "fracjac/lipschitz_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fracjac/errors.hpp"
#include "fracjac/spec_string.hpp"

namespace fracjac {

namespace {
constexpr double kPi = std::numbers::pi;

Vec vec2(double a, double b)
{
    Vec v(2);
    v << a, b;
    return v;
}

double signed_area(const std::vector<Vec>& loop)
{
    double a = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const Vec& p = loop[i];
        const Vec& q = loop[(i + 1) % loop.size()];
        a += p(0) * q(1) - q(0) * p(1);
    }
    return 0.5 * a;
}

void add_arc(std::vector<BoundaryNode>& out, const Vec& c, double r, double th0, double th1, int count,
             bool outward)
{
    const double dth = (th1 - th0) / count;
    const double w = r * std::abs(dth);
    for (int k = 0; k < count; ++k) {
        const double th = th0 + (k + 0.5) * dth;
        const Vec dir = vec2(std::cos(th), std::sin(th));
        out.push_back({c + r * dir, outward ? dir : Vec(-dir), w});
    }
}

void add_segment(std::vector<BoundaryNode>& out, const Vec& p, const Vec& q, const Vec& normal, int count)
{
    const double len = (q - p).norm();
    for (int k = 0; k < count; ++k) {
        const double s = (k + 0.5) / count;
        out.push_back({p + s * (q - p), normal, len / count});
    }
}
}  // namespace

LipschitzSet LipschitzSet::circle(const Vec& center, double radius, int nodes)
{
    if (center.size() != 2) throw InvalidGeometry("Lipschitz sets are planar");
    if (!(radius > 0.0)) throw InvalidGeometry("circle radius must be positive");
    if (nodes < 8) throw InvalidParameter("circle needs at least 8 boundary nodes");
    LipschitzSet e;
    e.name_ = "circle";
    const int poly = std::max(nodes, 256);
    std::vector<Vec> loop;
    for (int k = 0; k < poly; ++k) {
        const double th = 2.0 * kPi * k / poly;
        loop.push_back(center + radius * vec2(std::cos(th), std::sin(th)));
    }
    e.loops_.push_back(std::move(loop));
    add_arc(e.boundary_, center, radius, 0.0, 2.0 * kPi, nodes, true);
    e.area_ = kPi * radius * radius;
    e.exact_area_ = true;
    e.finish();
    return e;
}

LipschitzSet LipschitzSet::polygon(const std::vector<Vec>& vertices, int nodes_per_edge)
{
    if (vertices.size() < 3) throw InvalidGeometry("polygon needs at least three vertices");
    std::vector<Vec> loop = vertices;
    const double a = signed_area(loop);
    if (std::abs(a) < 1e-14) throw InvalidGeometry("degenerate polygon");
    if (a < 0) std::reverse(loop.begin(), loop.end());
    LipschitzSet e;
    e.name_ = "polygon";
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const Vec& p = loop[i];
        const Vec& q = loop[(i + 1) % loop.size()];
        const Vec d = q - p;
        add_segment(e.boundary_, p, q, vec2(d(1), -d(0)).normalized(), nodes_per_edge);
    }
    e.loops_.push_back(std::move(loop));
    e.finish();
    return e;
}

LipschitzSet LipschitzSet::annular_sector(const Vec& center, double r_in, double r_out, double theta0,
                                          double theta1, int nodes)
{
    if (!(r_in > 0.0 && r_out > r_in)) throw InvalidGeometry("annular sector needs 0 < r_in < r_out");
    if (!(theta1 > theta0 && theta1 - theta0 < 2.0 * kPi))
        throw InvalidGeometry("annular sector needs 0 < theta1 - theta0 < 2 pi");
    LipschitzSet e;
    e.name_ = "annular_sector";
    const double span = theta1 - theta0;
    const double total = (r_in + r_out) * span + 2.0 * (r_out - r_in);
    const auto share = [&](double len) { return std::max(16, static_cast<int>(std::lround(nodes * len / total))); };
    const Vec dir0 = vec2(std::cos(theta0), std::sin(theta0));
    const Vec dir1 = vec2(std::cos(theta1), std::sin(theta1));
    add_arc(e.boundary_, center, r_out, theta0, theta1, share(r_out * span), true);
    add_segment(e.boundary_, center + r_out * dir1, center + r_in * dir1, vec2(-dir1(1), dir1(0)),
                share(r_out - r_in));
    add_arc(e.boundary_, center, r_in, theta1, theta0, share(r_in * span), false);
    add_segment(e.boundary_, center + r_in * dir0, center + r_out * dir0, vec2(dir0(1), -dir0(0)),
                share(r_out - r_in));
    std::vector<Vec> loop;
    const int arc_poly = 512;
    for (int k = 0; k <= arc_poly; ++k) {
        const double th = theta0 + span * k / arc_poly;
        loop.push_back(center + r_out * vec2(std::cos(th), std::sin(th)));
    }
    for (int k = arc_poly; k >= 0; --k) {
        const double th = theta0 + span * k / arc_poly;
        loop.push_back(center + r_in * vec2(std::cos(th), std::sin(th)));
    }
    e.loops_.push_back(std::move(loop));
    e.area_ = 0.5 * span * (r_out * r_out - r_in * r_in);
    e.exact_area_ = true;
    e.finish();
    return e;
}

LipschitzSet LipschitzSet::from_loops(const std::vector<std::vector<Vec>>& loops,
                                      const std::vector<std::vector<Vec>>& normals)
{
    LipschitzSet e;
    e.name_ = "polyline";
    if (!normals.empty() && normals.size() != loops.size())
        throw InvalidParameter("from_loops: one normal list per loop required");
    double total = 0.0;
    for (std::size_t l = 0; l < loops.size(); ++l) {
        const auto& loop = loops[l];
        if (loop.size() < 3) throw InvalidGeometry("loop needs at least three vertices");
        const double orient = signed_area(loop) >= 0 ? 1.0 : -1.0;
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const Vec& p = loop[i];
            const Vec& q = loop[(i + 1) % loop.size()];
            const Vec d = q - p;
            if (d.norm() == 0.0) continue;
            Vec nrm = normals.empty() ? Vec(orient * vec2(d(1), -d(0)).normalized()) : normals[l][i];
            e.boundary_.push_back({0.5 * (p + q), nrm, d.norm()});
        }
        total += signed_area(loop);
        e.loops_.push_back(loop);
        e.loop_ends_.push_back(e.boundary_.size());
    }
    e.finish();
    // Even-odd area: nested loops alternate sign in a properly oriented
    // contour set, so the absolute signed sum is the enclosed area.
    e.area_ = std::abs(total);
    return e;
}

void LipschitzSet::finish()
{
    if (loop_ends_.empty() && !boundary_.empty()) loop_ends_.push_back(boundary_.size());
    perimeter_ = 0.0;
    max_arc_ = 0.0;
    for (const auto& node : boundary_) {
        perimeter_ += node.weight;
        max_arc_ = std::max(max_arc_, node.weight);
    }
    if (!exact_area_) {
        double a = 0.0;
        for (const auto& loop : loops_) a += signed_area(loop);
        area_ = std::abs(a);
    }
}

bool LipschitzSet::contains(const Vec& x) const
{
    bool inside = false;
    for (const auto& loop : loops_) {
        const std::size_t m = loop.size();
        for (std::size_t i = 0, j = m - 1; i < m; j = i++) {
            const double yi = loop[i](1), yj = loop[j](1);
            if ((yi > x(1)) != (yj > x(1))) {
                const double xc = loop[j](0) + (x(1) - yj) * (loop[i](0) - loop[j](0)) / (yi - yj);
                if (x(0) < xc) inside = !inside;
            }
        }
    }
    return inside;
}

double LipschitzSet::clearance(const Domain& omega) const
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto& node : boundary_) {
        const double d = omega.distance_to_boundary(node.point);
        best = std::min(best, omega.contains(node.point) ? d : -d);
    }
    for (const auto& loop : loops_)
        for (const auto& p : loop) {
            const double d = omega.distance_to_boundary(p);
            best = std::min(best, omega.contains(p) ? d : -d);
        }
    return best;
}

void LipschitzSet::check_inside(const Domain& omega) const
{
    if (!(clearance(omega) > 0.0)) throw InvalidGeometry("Lipschitz set is not compactly contained in the domain");
}

LipschitzSet parse_lipschitz_set(const std::string& text)
{
    const SpecString spec = SpecString::parse(text);
    Vec c(2);
    c << spec.number("cx", 0.0), spec.number("cy", 0.0);
    if (spec.name() == "circle") {
        spec.only({"r", "cx", "cy", "nodes"});
        return LipschitzSet::circle(c, spec.number("r", 0.5), spec.integer("nodes", 2048));
    }
    if (spec.name() == "square") {
        spec.only({"half", "cx", "cy", "nodes"});
        const double h = spec.number("half", 0.25);
        std::vector<Vec> v(4, c);
        v[0] += Vec::Constant(2, -h);
        v[1](0) += h;
        v[1](1) -= h;
        v[2] += Vec::Constant(2, h);
        v[3](0) -= h;
        v[3](1) += h;
        return LipschitzSet::polygon(v, spec.integer("nodes", 256));
    }
    if (spec.name() == "sector") {
        spec.only({"rin", "rout", "th0", "th1", "cx", "cy", "nodes"});
        return LipschitzSet::annular_sector(c, spec.number("rin", 0.3), spec.number("rout", 0.6),
                                            spec.number("th0", 0.0), spec.number("th1", 1.5),
                                            spec.integer("nodes", 2048));
    }
    throw ConfigError("unknown set '" + spec.name() + "'");
}

}  // namespace fracjac
