#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hardy/atoms.hpp"
#include "hardy/kernels.hpp"
#include "hardy/profile.hpp"
#include "hardy/quadrature/spatial.hpp"
#include "hardy/quadrature/tgrid.hpp"

namespace hardy {

// Sum over three dyadic shells I_1, I_2, I_3 at growing distance; the tail beyond the last shell is
// extrapolated geometrically from the ratio I_3 / I_2 and cross-checked with I_2 / I_1.
struct ShellTail {
    double tail = 0.0;
    double error = 0.0;
    bool bounded = true;
};

inline ShellTail shell_tail(double i1, double i2, double i3, double q_max = 0.95) {
    ShellTail r;
    if (i3 <= 0.0) return r;
    if (i2 <= 0.0) {
        // nothing in the middle shell: treat the last one as the tail scale
        r.tail = i3;
        r.error = i3;
        return r;
    }
    const double q = i3 / i2;
    const double qp = i1 > 0.0 ? i2 / i1 : q;
    if (q >= q_max || qp >= q_max) {
        r.bounded = false;
        r.tail = inf;
        r.error = inf;
        return r;
    }
    r.tail = i3 * q / (1.0 - q);
    const double alt = i3 * qp / (1.0 - qp);
    r.error = std::abs(r.tail - alt);
    return r;
}

struct MaximalOptions {
    double W = 50.0;       // window radius in units of d_Q
    int ppd = 16;          // t points per decade
    double t_lo = 1e-8;    // t range in units of d_Q^2
    double t_hi = 1e4;
    double ratio = 1.25;   // grading ratio of the x grid
    double max_h = 3.0;    // largest x cell in units of d_Q
};

struct MaximalResult {
    double value = 0.0;         // window integral + tail
    double error = 0.0;
    double window_value = 0.0;
    double tail = 0.0;
    bool tail_bounded = true;
    double atom_l1 = 0.0;
    size_t nodes = 0;
};

// || sup_t |T_t a| ||_{L^1(X)} for an atom in one dimension
inline MaximalResult maximal_norm(const Kernel& k, const Atom& a, const MaximalOptions& o = {}) {
    if (k.dim() != 1 || a.host.dim() != 1) throw std::invalid_argument("maximal_norm: one-dimensional kernels only");
    const DomainSpec& X = k.domain();
    const double dq = a.host.diameter(), zc = a.host.center[0];
    const double wlo = std::max(X[0].lo, zc - o.W * dq), whi = std::min(X[0].hi, zc + o.W * dq);
    const auto& g = a.values;
    const double A = g.box.lo[0], B = g.box.hi[0];
    const double cw = g.width(0);
    const double first = g.n[0] > 1 ? cw : (B - A) / 64.0;

    std::vector<double> edges;
    auto append = [&](const std::vector<double>& e) {
        for (double v : e)
            if (edges.empty() || v > edges.back()) edges.push_back(v);
    };
    append(graded_edges(wlo, A, {{A, first}}, o.ratio, o.max_h * dq));
    if (g.n[0] > 1) {
        std::vector<double> mid;
        for (int i = 0; i <= g.n[0]; ++i) mid.push_back(g.edge(0, i));
        append(mid);
    } else {
        append(graded_edges(A, B, {{A, first}, {B, first}}, o.ratio, o.max_h * dq));
    }
    append(graded_edges(B, whi, {{B, first}}, o.ratio, o.max_h * dq));
    TensorRule rule({AxisRule{edges}});

    double tmax = o.t_hi * dq * dq;
    if (std::isfinite(k.t_max())) tmax = std::min(tmax, k.t_max());
    ProfileEngine eng(TGrid(o.t_lo * dq * dq, tmax, o.ppd));
    const AxisRule& ax = rule.axis(0);
    std::vector<double> sup(ax.node_count());
    std::vector<double> prof(eng.grid().size());
    std::vector<double> cells(g.n[0] + 1);
    for (int i = 0; i <= g.n[0]; ++i) cells[i] = g.edge(0, i);
    for (size_t id = 0; id < ax.node_count(); ++id) {
        const double x = ax.node(id);
        eng.profile(
            k,
            [&](const Kernel& kb, double t) {
                double s = 0.0;
                for (int c = 0; c < g.n[0]; ++c)
                    if (g.v[c] != 0.0) s += g.v[c] * kb.cell_integral(t, x, cells[c], cells[c + 1]);
                return s;
            },
            prof.data());
        sup[id] = sup_parabolic(eng.grid(), prof.data(), 0.0).value;
    }
    RuleOptions ro;
    ro.keep_cells = true;
    auto res = rule.integrate([&](const size_t* id, const double*) { return sup[id[0]]; }, ro);

    MaximalResult r;
    r.window_value = res.value;
    r.error = res.error;
    r.nodes = ax.node_count();
    r.atom_l1 = g.l1();
    double sh[3] = {0.0, 0.0, 0.0};
    for (const auto& c : res.cells) {
        const double dist = std::abs(c.center[0] - zc) / dq;
        for (int s = 0; s < 3; ++s)
            if (dist >= o.W / std::ldexp(8.0, -s) && dist < o.W / std::ldexp(4.0, -s)) sh[s] += c.value;
    }
    auto tail = shell_tail(sh[0], sh[1], sh[2]);
    r.tail = tail.tail;
    r.tail_bounded = tail.bounded;
    r.value = r.window_value + tail.tail;
    r.error += tail.error;
    return r;
}

}  // namespace hardy
