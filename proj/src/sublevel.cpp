#include "fracjac/sublevel.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

#include "fracjac/errors.hpp"

namespace fracjac {

LipschitzSet sublevel_set(const TestFunction& psi, double t, const Domain& omega, int grid)
{
    if (!(t > 0.0)) throw InvalidParameter("sublevel threshold must be positive");
    if (psi.kind() != TestKind::smooth) throw Unsupported("sublevel sets need a smooth test function");
    if (omega.dimension() != 2) throw Unsupported("sublevel sets are planar");
    if (grid < 4) throw InvalidParameter("sublevel grid needs at least 4 cells per axis");

    const Vec& c = psi.support_center();
    const double r = psi.support_radius();
    const double h0 = 2.0 * r / grid;
    // One padding cell on each side keeps every contour closed.
    const double lo_x = c(0) - r - h0, lo_y = c(1) - r - h0;
    const int g = grid + 2;
    const double h = (2.0 * r + 2.0 * h0) / g;
    const int stride = g + 1;

    std::vector<double> f(static_cast<std::size_t>(stride) * stride);
    Vec x(2);
    double fmax = -std::numeric_limits<double>::infinity();
    for (int j = 0; j <= g; ++j)
        for (int i = 0; i <= g; ++i) {
            x << lo_x + i * h, lo_y + j * h;
            const double v = psi.value(x);
            f[j * stride + i] = v;
            fmax = std::max(fmax, v);
        }
    if (fmax <= t) return LipschitzSet{};

    auto vertex = [&](int i, int j) {
        Vec p(2);
        p << lo_x + i * h, lo_y + j * h;
        return p;
    };
    auto inside = [&](int i, int j) { return f[j * stride + i] > t; };
    // Horizontal edge (i,j)-(i+1,j) has id 2 (j stride + i), vertical edge
    // (i,j)-(i,j+1) has id 2 (j stride + i) + 1.
    auto h_id = [&](int i, int j) { return 2L * (j * stride + i); };
    auto v_id = [&](int i, int j) { return 2L * (j * stride + i) + 1; };

    std::map<long, Vec> points;
    auto crossing = [&](long id, int i0, int j0, int i1, int j1) {
        auto it = points.find(id);
        if (it != points.end()) return;
        const double f0 = f[j0 * stride + i0], f1 = f[j1 * stride + i1];
        const double s = (t - f0) / (f1 - f0);
        points.emplace(id, vertex(i0, j0) + s * (vertex(i1, j1) - vertex(i0, j0)));
    };

    std::map<long, long> next;  // segment start edge -> end edge
    for (int j = 0; j < g; ++j)
        for (int i = 0; i < g; ++i) {
            const std::array<std::pair<int, int>, 4> corner{{{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}}};
            const std::array<long, 4> edge{h_id(i, j), v_id(i + 1, j), h_id(i, j + 1), v_id(i, j)};
            std::vector<std::pair<long, bool>> cross;  // (edge id, is exit) in CCW order
            for (int k = 0; k < 4; ++k) {
                const auto [ia, ja] = corner[k];
                const auto [ib, jb] = corner[(k + 1) % 4];
                const bool a_in = inside(ia, ja), b_in = inside(ib, jb);
                if (a_in == b_in) continue;
                crossing(edge[k], ia, ja, ib, jb);
                cross.emplace_back(edge[k], a_in);
            }
            if (cross.empty()) continue;
            const std::size_t m = cross.size();
            bool join_next = true;
            if (m == 4) {
                double centre = 0.0;
                for (const auto& [ci, cj] : corner) centre += f[cj * stride + ci];
                join_next = 0.25 * centre > t;
            }
            for (std::size_t k = 0; k < m; ++k) {
                if (!cross[k].second) continue;
                const std::size_t partner = join_next ? (k + 1) % m : (k + m - 1) % m;
                next[cross[k].first] = cross[partner].first;
            }
        }

    std::vector<std::vector<Vec>> loops;
    std::vector<std::vector<Vec>> normals;
    while (!next.empty()) {
        const long start = next.begin()->first;
        std::vector<long> chain;
        long cur = start;
        while (true) {
            auto it = next.find(cur);
            if (it == next.end()) throw SingularCurve("sublevel contour failed to close");
            chain.push_back(cur);
            const long nxt = it->second;
            next.erase(it);
            cur = nxt;
            if (cur == start) break;
        }
        std::vector<Vec> loop;
        for (long id : chain) loop.push_back(points.at(id));
        std::vector<Vec> nrm;
        for (std::size_t k = 0; k < loop.size(); ++k) {
            const Vec& p = loop[k];
            const Vec& q = loop[(k + 1) % loop.size()];
            const double g_norm = psi.gradient(p).norm();
            if (g_norm <= 1e-8) {
                std::ostringstream msg;
                msg << "level " << t << " is critical: |grad psi| = " << g_norm;
                throw CriticalLevel(msg.str());
            }
            const Vec gm = psi.gradient(0.5 * (p + q));
            const double gn = gm.norm();
            nrm.push_back(gn > 0.0 ? Vec(-gm / gn) : Vec(Vec::Zero(2)));
        }
        if (loop.size() >= 3) {
            loops.push_back(std::move(loop));
            normals.push_back(std::move(nrm));
        }
    }
    return LipschitzSet::from_loops(loops, normals);
}

}  // namespace fracjac
