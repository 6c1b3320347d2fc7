#include "fracjac/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fracjac/errors.hpp"
#include "fracjac/spec_string.hpp"

namespace fracjac {

namespace {

constexpr double kPi = std::numbers::pi;

void check_resolution(int resolution)
{
    if (resolution < 4) throw InvalidParameter("domain resolution must be >= 4");
}

// Advances a mixed-radix counter; returns false after the last index.
bool next_index(std::vector<int>& idx, int radix)
{
    for (std::size_t d = 0; d < idx.size(); ++d) {
        if (++idx[d] < radix) return true;
        idx[d] = 0;
    }
    return false;
}

}  // namespace

Domain Domain::rectangle(const Vec& lower, const Vec& upper, int resolution)
{
    check_resolution(resolution);
    if (lower.size() != upper.size() || lower.size() < 2 || lower.size() > 3) {
        throw InvalidGeometry("rectangle corners must have matching dimension 2 or 3");
    }
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
        if (!(upper(i) > lower(i)) || !std::isfinite(lower(i)) || !std::isfinite(upper(i))) {
            throw InvalidGeometry("rectangle is degenerate or inverted");
        }
    }
    Domain d;
    d.kind_ = DomainKind::rectangle;
    d.dim_ = static_cast<int>(lower.size());
    d.resolution_ = resolution;
    d.lower_ = lower;
    d.upper_ = upper;
    d.center_ = 0.5 * (lower + upper);
    d.build_rectangle();
    return d;
}

Domain Domain::disk(const Vec& center, double radius, int resolution)
{
    return annulus(center, 0.0, radius, resolution);
}

Domain Domain::annulus(const Vec& center, double inner_radius, double outer_radius, int resolution)
{
    check_resolution(resolution);
    if (center.size() != 2) throw InvalidGeometry("disk and annulus domains are two-dimensional");
    if (!(outer_radius > 0.0) || !std::isfinite(outer_radius)) throw InvalidGeometry("radius must be positive");
    if (!(inner_radius >= 0.0) || !(inner_radius < outer_radius)) {
        throw InvalidGeometry("annulus radii must satisfy 0 <= inner < outer");
    }
    Domain d;
    d.kind_ = inner_radius > 0.0 ? DomainKind::annulus : DomainKind::disk;
    d.dim_ = 2;
    d.resolution_ = resolution;
    d.center_ = center;
    d.inner_radius_ = inner_radius;
    d.outer_radius_ = outer_radius;
    d.lower_ = center.array() - outer_radius;
    d.upper_ = center.array() + outer_radius;
    d.build_polar();
    return d;
}

void Domain::build_rectangle()
{
    const int n = dim_;
    const int res = resolution_;
    const Vec h = (upper_ - lower_) / res;
    cell_diameter_ = h.norm();
    const double cell_volume = h.prod();

    // Vertices on the (res+1)^n lattice, x fastest.
    std::vector<int> idx(n, 0);
    do {
        Vec v(n);
        for (int k = 0; k < n; ++k) v(k) = lower_(k) + idx[k] * h(k);
        vertices_.push_back(std::move(v));
    } while (next_index(idx, res + 1));

    auto vertex_id = [&](const std::vector<int>& i) {
        std::size_t id = 0, stride = 1;
        for (int k = 0; k < n; ++k) {
            id += static_cast<std::size_t>(i[k]) * stride;
            stride *= static_cast<std::size_t>(res + 1);
        }
        return id;
    };

    std::fill(idx.begin(), idx.end(), 0);
    do {
        Vec p(n);
        for (int k = 0; k < n; ++k) p(k) = lower_(k) + (idx[k] + 0.5) * h(k);
        interior_.push_back({std::move(p), cell_volume});
        std::vector<std::size_t> corners;
        for (int mask = 0; mask < (1 << n); ++mask) {
            std::vector<int> c = idx;
            for (int k = 0; k < n; ++k) c[k] += (mask >> k) & 1;
            corners.push_back(vertex_id(c));
        }
        if (n == 2) std::swap(corners[2], corners[3]);  // counter-clockwise quad
        cells_.push_back(std::move(corners));
    } while (next_index(idx, res));

    // Boundary: midpoint rule on each face.
    const int per_axis = n == 2 ? 2 * res : res;
    for (int axis = 0; axis < n; ++axis) {
        for (int side = 0; side < 2; ++side) {
            Vec normal = Vec::Zero(n);
            normal(axis) = side == 0 ? -1.0 : 1.0;
            std::vector<int> fidx(n - 1, 0);
            double face_weight = 1.0;
            for (int k = 0, f = 0; k < n; ++k) {
                if (k == axis) continue;
                face_weight *= (upper_(k) - lower_(k)) / per_axis;
                ++f;
            }
            do {
                Vec p(n);
                for (int k = 0, f = 0; k < n; ++k) {
                    if (k == axis) {
                        p(k) = side == 0 ? lower_(k) : upper_(k);
                    } else {
                        p(k) = lower_(k) + (fidx[f] + 0.5) * (upper_(k) - lower_(k)) / per_axis;
                        ++f;
                    }
                }
                boundary_.push_back({std::move(p), normal, face_weight});
            } while (next_index(fidx, per_axis));
        }
    }
}

void Domain::build_polar()
{
    const int res = resolution_;
    const int angular = 4 * res;
    const double dr = (outer_radius_ - inner_radius_) / res;
    const double dtheta = 2.0 * kPi / angular;
    cell_diameter_ = std::hypot(dr, outer_radius_ * dtheta);

    auto polar = [&](double r, double theta) {
        Vec p(2);
        p << center_(0) + r * std::cos(theta), center_(1) + r * std::sin(theta);
        return p;
    };

    const bool has_center = inner_radius_ == 0.0;
    if (has_center) vertices_.push_back(center_);
    const int first_ring = has_center ? 1 : 0;
    for (int i = first_ring; i <= res; ++i) {
        for (int j = 0; j < angular; ++j) vertices_.push_back(polar(inner_radius_ + i * dr, j * dtheta));
    }
    auto ring_vertex = [&](int i, int j) -> std::size_t {
        j %= angular;
        if (has_center) return i == 0 ? 0 : 1 + static_cast<std::size_t>(i - 1) * angular + j;
        return static_cast<std::size_t>(i) * angular + j;
    };

    for (int i = 0; i < res; ++i) {
        const double r_mid = inner_radius_ + (i + 0.5) * dr;
        for (int j = 0; j < angular; ++j) {
            interior_.push_back({polar(r_mid, (j + 0.5) * dtheta), r_mid * dr * dtheta});
            if (has_center && i == 0) {
                cells_.push_back({ring_vertex(0, 0), ring_vertex(1, j), ring_vertex(1, j + 1)});
            } else {
                cells_.push_back({ring_vertex(i, j), ring_vertex(i + 1, j), ring_vertex(i + 1, j + 1),
                                  ring_vertex(i, j + 1)});
            }
        }
    }

    const int outer_nodes = 8 * res;
    for (int j = 0; j < outer_nodes; ++j) {
        const double theta = (j + 0.5) * 2.0 * kPi / outer_nodes;
        Vec normal(2);
        normal << std::cos(theta), std::sin(theta);
        boundary_.push_back({polar(outer_radius_, theta), normal, 2.0 * kPi * outer_radius_ / outer_nodes});
    }
    if (!has_center) {
        const int inner_nodes =
            std::max(8, static_cast<int>(std::lround(outer_nodes * inner_radius_ / outer_radius_)));
        for (int j = 0; j < inner_nodes; ++j) {
            const double theta = (j + 0.5) * 2.0 * kPi / inner_nodes;
            Vec normal(2);
            normal << -std::cos(theta), -std::sin(theta);
            boundary_.push_back({polar(inner_radius_, theta), normal, 2.0 * kPi * inner_radius_ / inner_nodes});
        }
    }
}

bool Domain::contains(const Vec& x) const
{
    if (x.size() != dim_) return false;
    if (kind_ == DomainKind::rectangle) {
        return ((x.array() > lower_.array()) && (x.array() < upper_.array())).all();
    }
    const double r = (x - center_).norm();
    return r < outer_radius_ && (inner_radius_ == 0.0 || r > inner_radius_);
}

double Domain::distance_to_boundary(const Vec& x) const
{
    if (kind_ == DomainKind::rectangle) {
        if (contains(x)) {
            return std::min((x - lower_).minCoeff(), (upper_ - x).minCoeff());
        }
        const Vec clamped = x.cwiseMax(lower_).cwiseMin(upper_);
        const double outside = (x - clamped).norm();
        if (outside > 0.0) return outside;
        // On the boundary itself.
        return 0.0;
    }
    const double r = (x - center_).norm();
    double d = std::abs(outer_radius_ - r);
    if (kind_ == DomainKind::annulus) d = std::min(d, std::abs(r - inner_radius_));
    return d;
}

Vec Domain::distance_gradient(const Vec& x) const
{
    Vec g = Vec::Zero(dim_);
    if (kind_ == DomainKind::rectangle) {
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < dim_; ++k) {
            if (x(k) - lower_(k) < best) {
                best = x(k) - lower_(k);
                g.setZero();
                g(k) = 1.0;
            }
            if (upper_(k) - x(k) < best) {
                best = upper_(k) - x(k);
                g.setZero();
                g(k) = -1.0;
            }
        }
        return g;
    }
    const Vec rel = x - center_;
    const double r = rel.norm();
    if (r == 0.0) return g;
    const Vec radial = rel / r;
    if (kind_ == DomainKind::annulus && r - inner_radius_ < outer_radius_ - r) return radial;
    return -radial;
}

double Domain::volume() const
{
    if (kind_ == DomainKind::rectangle) return (upper_ - lower_).prod();
    return kPi * (outer_radius_ * outer_radius_ - inner_radius_ * inner_radius_);
}

double Domain::boundary_measure() const
{
    if (kind_ == DomainKind::rectangle) {
        const Vec side = upper_ - lower_;
        if (dim_ == 2) return 2.0 * (side(0) + side(1));
        return 2.0 * (side(0) * side(1) + side(1) * side(2) + side(0) * side(2));
    }
    return 2.0 * kPi * (outer_radius_ + inner_radius_);
}

double Domain::diameter() const
{
    if (kind_ == DomainKind::rectangle) return (upper_ - lower_).norm();
    return 2.0 * outer_radius_;
}

int Domain::boundary_loop_count() const
{
    if (dim_ != 2) throw Unsupported("boundary loops are only defined for n = 2");
    return kind_ == DomainKind::annulus ? 2 : 1;
}

double Domain::boundary_loop_length(int loop) const
{
    if (dim_ != 2) throw Unsupported("boundary loops are only defined for n = 2");
    if (kind_ == DomainKind::rectangle) return boundary_measure();
    return 2.0 * kPi * (loop == 0 ? outer_radius_ : inner_radius_);
}

Vec Domain::boundary_loop_point(int loop, double s) const
{
    const double length = boundary_loop_length(loop);
    s = std::fmod(s, length);
    if (s < 0.0) s += length;
    Vec p(2);
    if (kind_ == DomainKind::rectangle) {
        const double w = upper_(0) - lower_(0);
        const double h = upper_(1) - lower_(1);
        if (s < w) {
            p << lower_(0) + s, lower_(1);
        } else if (s < w + h) {
            p << upper_(0), lower_(1) + (s - w);
        } else if (s < 2 * w + h) {
            p << upper_(0) - (s - w - h), upper_(1);
        } else {
            p << lower_(0), upper_(1) - (s - 2 * w - h);
        }
        return p;
    }
    const double r = loop == 0 ? outer_radius_ : inner_radius_;
    const double theta = s / r;
    p << center_(0) + r * std::cos(theta), center_(1) + r * std::sin(theta);
    return p;
}

Domain Domain::with_resolution(int resolution) const
{
    if (kind_ == DomainKind::rectangle) return rectangle(lower_, upper_, resolution);
    return annulus(center_, inner_radius_, outer_radius_, resolution);
}

Domain Domain::scaled(double factor) const
{
    if (!(factor > 0.0)) throw InvalidParameter("domain scale factor must be positive");
    if (kind_ == DomainKind::rectangle) return rectangle(factor * lower_, factor * upper_, resolution_);
    return annulus(factor * center_, factor * inner_radius_, factor * outer_radius_, resolution_);
}

std::string Domain::describe() const
{
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
    case DomainKind::rectangle:
        os << (dim_ == 2 ? "rect" : "box3");
        for (int k = 0; k < dim_; ++k) os << ":lo" << k << "=" << lower_(k);
        for (int k = 0; k < dim_; ++k) os << ":hi" << k << "=" << upper_(k);
        break;
    case DomainKind::disk:
        os << "disk:cx=" << center_(0) << ":cy=" << center_(1) << ":r=" << outer_radius_;
        break;
    case DomainKind::annulus:
        os << "annulus:cx=" << center_(0) << ":cy=" << center_(1) << ":rin=" << inner_radius_
           << ":rout=" << outer_radius_;
        break;
    }
    os << ":res=" << resolution_;
    return os.str();
}

Domain make_domain(DomainKind kind, std::span<const double> params, int resolution)
{
    switch (kind) {
    case DomainKind::rectangle: {
        if (params.size() != 4 && params.size() != 6) {
            throw InvalidGeometry("rectangle needs 2n corner coordinates (n = 2 or 3)");
        }
        const Eigen::Index n = static_cast<Eigen::Index>(params.size() / 2);
        Vec lo(n), hi(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            lo(k) = params[k];
            hi(k) = params[k + n];
        }
        return Domain::rectangle(lo, hi, resolution);
    }
    case DomainKind::disk: {
        if (params.size() != 3) throw InvalidGeometry("disk needs (cx, cy, r)");
        return Domain::disk(Vec::Map(params.data(), 2), params[2], resolution);
    }
    case DomainKind::annulus: {
        if (params.size() != 4) throw InvalidGeometry("annulus needs (cx, cy, r_in, r_out)");
        if (!(params[2] > 0.0)) throw InvalidGeometry("annulus inner radius must be positive");
        return Domain::annulus(Vec::Map(params.data(), 2), params[2], params[3], resolution);
    }
    }
    throw InvalidGeometry("unknown domain kind");
}

Domain parse_domain(const std::string& text, int default_resolution)
{
    const auto spec = SpecString::parse(text);
    const int res = spec.integer("res", default_resolution);
    const std::string& name = spec.name();
    if (name == "square") {
        spec.only({"res", "side"});
        const double side = spec.number("side", 1.0);
        const std::vector<double> p{0.0, 0.0, side, side};
        return make_domain(DomainKind::rectangle, p, res);
    }
    if (name == "rect") {
        spec.only({"res", "x0", "y0", "x1", "y1"});
        const std::vector<double> p{spec.number("x0", 0.0), spec.number("y0", 0.0), spec.number("x1", 1.0),
                                    spec.number("y1", 1.0)};
        return make_domain(DomainKind::rectangle, p, res);
    }
    if (name == "box3") {
        spec.only({"res", "x0", "y0", "z0", "x1", "y1", "z1"});
        const std::vector<double> p{spec.number("x0", 0.0), spec.number("y0", 0.0), spec.number("z0", 0.0),
                                    spec.number("x1", 1.0), spec.number("y1", 1.0), spec.number("z1", 1.0)};
        return make_domain(DomainKind::rectangle, p, res);
    }
    if (name == "disk") {
        spec.only({"res", "r", "cx", "cy"});
        const std::vector<double> p{spec.number("cx", 0.0), spec.number("cy", 0.0), spec.number("r", 1.0)};
        return make_domain(DomainKind::disk, p, res);
    }
    if (name == "annulus") {
        spec.only({"res", "rin", "rout", "cx", "cy"});
        const std::vector<double> p{spec.number("cx", 0.0), spec.number("cy", 0.0), spec.number("rin", 0.5),
                                    spec.number("rout", 1.0)};
        return make_domain(DomainKind::annulus, p, res);
    }
    throw ConfigError("unknown domain '" + name + "'");
}

}  // namespace fracjac
