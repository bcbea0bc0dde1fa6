#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hardy/boxindex.hpp"
#include "hardy/domain.hpp"
#include "hardy/error.hpp"
#include "hardy/qmc.hpp"

namespace hardy {

// A finite window of a countable cuboid family.
struct AdmissibleCovering {
    std::string id;
    DomainSpec domain;
    std::vector<Cuboid> cuboids;
    std::vector<int> tag;  // generator index of each cuboid (dyadic level n, or the unified Laguerre index)
    Box window;            // region the window is meant to cover
    double C1 = 1.0, C2 = 1.0;
    double kappa = 1.05;
    int win_lo = 0, win_hi = 0;
    std::function<AdmissibleCovering(int, int)> generator;  // same family over another index window

    int dim() const { return domain.dim(); }
    size_t size() const { return cuboids.size(); }
    // Q, Q*, Q**, Q*** inside X
    Box box(size_t i, int level = 0) const {
        if (level == 0) return cuboids[i].box(domain);
        return enlarge(cuboids[i], kappa, level).box(domain);
    }
};

inline AdmissibleCovering widen(const AdmissibleCovering& c, int lo, int hi) {
    if (!c.generator) throw std::invalid_argument("widen: covering has no index generator");
    auto w = c.generator(lo, hi);
    w.kappa = c.kappa;
    return w;
}

// Q_B = {[2^n, 2^{n+1}]}
inline AdmissibleCovering covering_bessel(int lo, int hi, double kappa = 1.05) {
    if (lo > hi) throw std::invalid_argument("covering_bessel: empty window");
    AdmissibleCovering c;
    c.id = "bessel[" + std::to_string(lo) + ".." + std::to_string(hi) + "]";
    c.domain = DomainSpec::half_line();
    for (int n = lo; n <= hi; ++n) {
        c.cuboids.push_back(Cuboid::interval(std::ldexp(1.0, n), std::ldexp(1.0, n + 1)));
        c.tag.push_back(n);
    }
    c.window = Box{{std::ldexp(1.0, lo)}, {std::ldexp(1.0, hi + 1)}};
    c.C1 = 1.0;
    c.C2 = 2.0;
    c.kappa = kappa;
    c.win_lo = lo;
    c.win_hi = hi;
    c.generator = [kappa](int a, int b) { return covering_bessel(a, b, kappa); };
    return c;
}

// Q_L with a unified index m: m = -n <= -1 is [2^{-n}, 2^{-n+1}], m = n >= 0 is the block of
// 2^{2n+1} intervals of length 2^{-n-1} tiling [2^n, 2^{n+1}].
inline AdmissibleCovering covering_laguerre(int lo, int hi, double kappa = 1.05) {
    if (lo > hi) throw std::invalid_argument("covering_laguerre: empty window");
    if (hi > 9) throw budget_error("covering_laguerre: block index above 9 exceeds the enumeration budget");
    AdmissibleCovering c;
    c.id = "laguerre[" + std::to_string(lo) + ".." + std::to_string(hi) + "]";
    c.domain = DomainSpec::half_line();
    double wlo = inf, whi = 0.0;
    for (int m = lo; m <= hi; ++m) {
        if (m < 0) {
            const double a = std::ldexp(1.0, m), b = std::ldexp(1.0, m + 1);
            c.cuboids.push_back(Cuboid::interval(a, b));
            c.tag.push_back(m);
            wlo = std::min(wlo, a);
            whi = std::max(whi, b);
        } else {
            const double a = std::ldexp(1.0, m), h = std::ldexp(1.0, -m - 1);
            const long K = 1L << (2 * m + 1);
            for (long k = 0; k < K; ++k) {
                c.cuboids.push_back(Cuboid::interval(a + k * h, a + (k + 1) * h));
                c.tag.push_back(m);
            }
            wlo = std::min(wlo, a);
            whi = std::max(whi, 2.0 * a);
        }
    }
    c.window = Box{{wlo}, {whi}};
    c.C1 = 1.0;
    c.C2 = 4.0;
    c.kappa = kappa;
    c.win_lo = lo;
    c.win_hi = hi;
    c.generator = [kappa](int a, int b) { return covering_laguerre(a, b, kappa); };
    return c;
}

// Grid of cubes of diameter tau aligned at the origin, restricted to the cells meeting the window.
inline AdmissibleCovering covering_uniform(const DomainSpec& X, double tau, const Box& window, double kappa = 1.05) {
    if (!(tau > 0.0)) throw std::invalid_argument("covering_uniform: tau must be positive");
    const int d = X.dim();
    if (window.dim() != d) throw std::invalid_argument("covering_uniform: window dimension mismatch");
    const double s = tau / std::sqrt(static_cast<double>(d));
    std::vector<long> k0(d), k1(d);
    for (int j = 0; j < d; ++j) {
        k0[j] = static_cast<long>(std::floor(window.lo[j] / s + 1e-9));
        k1[j] = static_cast<long>(std::ceil(window.hi[j] / s - 1e-9));
        if (k1[j] <= k0[j]) k1[j] = k0[j] + 1;
    }
    AdmissibleCovering c;
    std::ostringstream o;
    o << "uniform(tau=" << tau << ")";
    c.id = o.str();
    c.domain = X;
    c.window = Box{std::vector<double>(d), std::vector<double>(d)};
    for (int j = 0; j < d; ++j) {
        c.window.lo[j] = std::max(k0[j] * s, X[j].lo);
        c.window.hi[j] = std::min(k1[j] * s, X[j].hi);
    }
    std::vector<long> k = k0;
    while (true) {
        Box b{std::vector<double>(d), std::vector<double>(d)};
        bool inside = true;
        for (int j = 0; j < d; ++j) {
            b.lo[j] = k[j] * s;
            b.hi[j] = (k[j] + 1) * s;
            if (b.hi[j] <= X[j].lo || b.lo[j] >= X[j].hi) inside = false;
        }
        if (inside) {
            c.cuboids.push_back(Cuboid::from_box(b));
            c.tag.push_back(0);
        }
        int j = 0;
        while (j < d && ++k[j] == k1[j]) {
            k[j] = k0[j];
            ++j;
        }
        if (j == d) break;
    }
    c.C1 = 1.0;
    c.C2 = 1.0;
    c.kappa = kappa;
    return c;
}

namespace detail {

inline Cuboid concat(const Cuboid& a, const Cuboid& b) {
    Cuboid q = a;
    q.center.insert(q.center.end(), b.center.begin(), b.center.end());
    q.half.insert(q.half.end(), b.half.begin(), b.half.end());
    return q;
}

// k congruent pieces per axis
inline std::vector<Cuboid> split(const Cuboid& q, long k) {
    const int d = q.dim();
    std::vector<Cuboid> out;
    std::vector<long> idx(d, 0);
    while (true) {
        Cuboid p = q;
        for (int j = 0; j < d; ++j) {
            p.half[j] = q.half[j] / k;
            p.center[j] = q.center[j] - q.half[j] + (2 * idx[j] + 1) * p.half[j];
        }
        out.push_back(std::move(p));
        int j = 0;
        while (j < d && ++idx[j] == k) idx[j++] = 0;
        if (j == d) break;
    }
    return out;
}

inline Box concat(const Box& a, const Box& b) {
    Box r = a;
    r.lo.insert(r.lo.end(), b.lo.begin(), b.lo.end());
    r.hi.insert(r.hi.end(), b.hi.begin(), b.hi.end());
    return r;
}

}  // namespace detail

// Q1 [x] Q2: every product cell has its longer factor split into ceil(ratio) congruent pieces per axis.
inline AdmissibleCovering box_product(const AdmissibleCovering& a, const AdmissibleCovering& b, long budget = 4096) {
    AdmissibleCovering c;
    c.id = "(" + a.id + ")x(" + b.id + ")";
    c.domain = a.domain * b.domain;
    c.window = detail::concat(a.window, b.window);
    c.kappa = a.kappa;
    c.C1 = 2.0 * std::max(a.C1, b.C1);
    c.C2 = 2.0 * a.C2 * b.C2;
    for (size_t i = 0; i < a.size(); ++i) {
        for (size_t k = 0; k < b.size(); ++k) {
            const Cuboid& q1 = a.cuboids[i];
            const Cuboid& q2 = b.cuboids[k];
            const double d1 = q1.diameter(), d2 = q2.diameter();
            const double ratio = std::max(d1, d2) / std::min(d1, d2);
            long m = 1;
            if (ratio > 1.0 + 1e-9) m = static_cast<long>(std::ceil(ratio * (1.0 - 1e-12)));
            const int dl = d1 >= d2 ? q1.dim() : q2.dim();
            const double pieces = std::pow(static_cast<double>(m), dl);
            if (pieces > static_cast<double>(budget)) {
                char buf[200];
                std::snprintf(buf, sizeof buf, "box_product: diameter ratio %.4g needs %.0f pieces (budget %ld)", ratio,
                              pieces, budget);
                throw budget_error(buf);
            }
            if (d1 >= d2) {
                for (auto& p : detail::split(q1, m)) {
                    c.cuboids.push_back(detail::concat(p, q2));
                    c.tag.push_back(a.tag[i]);
                }
            } else {
                for (auto& p : detail::split(q2, m)) {
                    c.cuboids.push_back(detail::concat(q1, p));
                    c.tag.push_back(a.tag[i]);
                }
            }
        }
    }
    if (a.generator && b.generator) {
        auto ga = a.generator, gb = b.generator;
        c.win_lo = std::min(a.win_lo, b.win_lo);
        c.win_hi = std::max(a.win_hi, b.win_hi);
        c.generator = [ga, gb, budget](int lo, int hi) { return box_product(ga(lo, hi), gb(lo, hi), budget); };
    }
    return c;
}

// R^{d1} [x] Q2: each strip R^{d1} x Q2 split into cubes Q(z_n, d_{Q2}) x Q2, over [-A, A]^{d1}.
// A must be a multiple of 2 d_{Q2} for every Q2 in the window (true for dyadic families when A is).
inline AdmissibleCovering strip_product(int d1, double A, const AdmissibleCovering& b) {
    AdmissibleCovering c;
    std::ostringstream o;
    o << "R" << d1 << "x(" << b.id << ")";
    c.id = o.str();
    c.domain = DomainSpec::real_line(d1) * b.domain;
    c.window = detail::concat(Box{std::vector<double>(d1, -A), std::vector<double>(d1, A)}, b.window);
    c.kappa = b.kappa;
    c.C1 = 2.0 * b.C1 * std::sqrt(static_cast<double>(b.dim()));
    c.C2 = 2.0 * b.C2;
    for (size_t k = 0; k < b.size(); ++k) {
        const Cuboid& q2 = b.cuboids[k];
        const double r = q2.diameter();
        const double n = 2.0 * A / (2.0 * r);
        const long m = std::lround(n);
        if (std::abs(n - m) > 1e-9 * n || m < 1)
            throw std::invalid_argument("strip_product: A is not a multiple of the strip cube side");
        Cuboid strip{std::vector<double>(d1, 0.0), std::vector<double>(d1, A)};
        for (auto& p : detail::split(strip, m)) {
            c.cuboids.push_back(detail::concat(p, q2));
            c.tag.push_back(b.tag[k]);
        }
    }
    return c;
}

// ---------------------------------------------------------------- validation

struct CoveringReport {
    size_t cuboids = 0;
    double C1 = 0.0, C2 = 0.0;  // measured
    int max_overlap = 0;        // max over points of sum_Q chi_{Q***}
    int overlap_bound = 0;
    bool property1 = true, property2 = true, property3 = true, property4 = true;
    bool neighbours = true;
    size_t samples = 0;
    std::vector<std::string> violations;

    bool pass() const { return property1 && property2 && property3 && property4 && neighbours && max_overlap <= overlap_bound; }
};

namespace detail {

inline bool touches(const Box& a, const Box& b, double tol) {
    for (int j = 0; j < a.dim(); ++j)
        if (a.hi[j] < b.lo[j] - tol || b.hi[j] < a.lo[j] - tol) return false;
    return true;
}

inline std::string fmt_box(const Box& b) {
    std::ostringstream o;
    o.precision(10);
    for (int j = 0; j < b.dim(); ++j) o << (j ? "x" : "") << "[" << b.lo[j] << "," << b.hi[j] << "]";
    return o.str();
}

}  // namespace detail

inline CoveringReport validate_covering(const AdmissibleCovering& c, size_t samples = 4096, int overlap_bound = -1) {
    CoveringReport r;
    const int d = c.dim();
    const size_t N = c.size();
    r.cuboids = N;
    r.samples = samples;
    r.overlap_bound = overlap_bound > 0 ? overlap_bound : (2 << d);
    if (N == 0) {
        r.property1 = false;
        r.violations.push_back("property 1: empty covering");
        return r;
    }
    std::vector<Box> q(N), q3(N);
    for (size_t i = 0; i < N; ++i) {
        q[i] = c.box(i);
        q3[i] = c.box(i, 3);
    }
    double scale = 0.0;
    for (int j = 0; j < d; ++j) scale = std::max({scale, std::abs(c.window.lo[j]), std::abs(c.window.hi[j])});
    const double tol = 1e-12 * scale;
    BoxIndex iq(q), iq3(q3);

    // property 3
    for (size_t i = 0; i < N; ++i) {
        const double ratio = c.cuboids[i].max_half() / c.cuboids[i].min_half();
        r.C1 = std::max(r.C1, ratio);
    }
    if (r.C1 > c.C1 * (1.0 + 1e-9)) {
        r.property3 = false;
        r.violations.push_back("property 3: measured C1 " + std::to_string(r.C1) + " exceeds " + std::to_string(c.C1));
    }

    // properties 2, 4 and (neighbours)
    for (size_t i = 0; i < N; ++i) {
        iq.query_box(q[i], [&](size_t k) {
            if (k <= i || !detail::touches(q[i], q[k], tol)) return;
            const double ov = q[i].overlap(q[k]);
            if (ov > 1e-12 * std::min(q[i].volume(), q[k].volume())) {
                if (r.property2) r.violations.push_back("property 2: overlap " + detail::fmt_box(q[i]) + " " + detail::fmt_box(q[k]));
                r.property2 = false;
            }
            const double di = c.cuboids[i].diameter(), dk = c.cuboids[k].diameter();
            r.C2 = std::max(r.C2, std::max(di, dk) / std::min(di, dk));
        });
        iq3.query_box(q3[i], [&](size_t k) {
            if (k <= i) return;
            if (!detail::touches(q[i], q[k], tol)) {
                if (r.neighbours)
                    r.violations.push_back("neighbours: " + detail::fmt_box(q3[i]) + " meets " + detail::fmt_box(q3[k]) +
                                           " but the cuboids are disjoint");
                r.neighbours = false;
            }
        });
    }
    if (r.C2 == 0.0) r.C2 = 1.0;
    if (r.C2 > c.C2 * (1.0 + 1e-9)) {
        r.property4 = false;
        r.violations.push_back("property 4: measured C2 " + std::to_string(r.C2) + " exceeds " + std::to_string(c.C2));
    }

    // property 1: quasi-random points of the window plus probes just outside every face
    auto covered = [&](const double* x) {
        bool hit = false;
        iq.query_point(x, [&](size_t) { hit = true; }, tol);
        return hit;
    };
    Box win = c.window.clip(c.domain);
    auto pts = sobol_points(d, samples);
    std::vector<double> x(d);
    for (size_t s = 0; s < samples && r.property1; ++s) {
        for (int j = 0; j < d; ++j) x[j] = win.lo[j] + (win.hi[j] - win.lo[j]) * pts[s * d + j];
        if (!covered(x.data())) {
            std::ostringstream o;
            o << "property 1: point (";
            for (int j = 0; j < d; ++j) o << (j ? "," : "") << x[j];
            o << ") not covered";
            r.violations.push_back(o.str());
            r.property1 = false;
        }
    }
    for (size_t i = 0; i < N && r.property1; ++i) {
        for (int j = 0; j < d && r.property1; ++j) {
            for (int side = 0; side < 2 && r.property1; ++side) {
                const Box& b = q[i];
                const double eps = 1e-7 * (b.hi[j] - b.lo[j]);
                // face centre and points near the face corners
                for (int probe = 0; probe < (1 << (d - 1)) + 1 && r.property1; ++probe) {
                    int bit = 0;
                    for (int m = 0; m < d; ++m) {
                        if (m == j) {
                            x[m] = side ? b.hi[m] + eps : b.lo[m] - eps;
                            continue;
                        }
                        if (probe == 0)
                            x[m] = 0.5 * (b.lo[m] + b.hi[m]);
                        else
                            x[m] = ((probe - 1) >> bit & 1) ? b.hi[m] - 0.01 * (b.hi[m] - b.lo[m])
                                                           : b.lo[m] + 0.01 * (b.hi[m] - b.lo[m]);
                        ++bit;
                    }
                    if (!win.contains(x.data()) || !c.domain.contains(x.data())) continue;
                    if (!covered(x.data())) {
                        r.violations.push_back("property 1: hole next to " + detail::fmt_box(b));
                        r.property1 = false;
                    }
                }
            }
        }
    }

    // overlap count: the count of a family of closed boxes peaks at the vector of their largest lower ends
    auto count = [&](const double* p) {
        int n = 0;
        iq3.query_point(p, [&](size_t) { ++n; });
        return n;
    };
    for (size_t i = 0; i < N; ++i) {
        std::vector<std::vector<double>> cand(d);
        iq3.query_box(q3[i], [&](size_t k) {
            for (int j = 0; j < d; ++j)
                if (q3[k].lo[j] >= q3[i].lo[j] && q3[k].lo[j] <= q3[i].hi[j]) cand[j].push_back(q3[k].lo[j]);
        });
        size_t total = 1;
        for (auto& v : cand) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
            total *= v.size();
        }
        if (total > 20000) continue;
        std::vector<size_t> id(d, 0);
        for (size_t m = 0; m < total; ++m) {
            size_t rest = m;
            for (int j = 0; j < d; ++j) {
                x[j] = cand[j][rest % cand[j].size()];
                rest /= cand[j].size();
            }
            r.max_overlap = std::max(r.max_overlap, count(x.data()));
        }
    }
    for (size_t s = 0; s < samples; ++s) {
        for (int j = 0; j < d; ++j) x[j] = win.lo[j] + (win.hi[j] - win.lo[j]) * pts[s * d + j];
        r.max_overlap = std::max(r.max_overlap, count(x.data()));
    }
    if (r.max_overlap > r.overlap_bound)
        r.violations.push_back("finite overlap: " + std::to_string(r.max_overlap) + " enlarged cuboids share a point");
    return r;
}

// ---------------------------------------------------------------- partition of unity

// psi_Q = b_Q / sum b, b_Q a product of trapezoids equal to 1 on Q and 0 outside Q*.
class PartitionOfUnity {
public:
    explicit PartitionOfUnity(const AdmissibleCovering& c) : c_(c) {
        std::vector<Box> star(c_.size());
        for (size_t i = 0; i < c_.size(); ++i) star[i] = c_.box(i, 1);
        index_ = BoxIndex(std::move(star));
    }

    const AdmissibleCovering& covering() const { return c_; }
    size_t size() const { return c_.size(); }

    double bump(size_t i, const double* x) const {
        double b = 1.0;
        for (int j = 0; j < c_.dim(); ++j) b *= trap(i, j, x[j], 0);
        return b;
    }
    // sum of all bumps at x
    double total(const double* x) const {
        double s = 0.0;
        index_.query_point(x, [&](size_t k) { s += bump(k, x); });
        return s;
    }
    double value(size_t i, const double* x) const {
        const double b = bump(i, x);
        if (b == 0.0) return 0.0;
        return b / total(x);
    }
    // (index, psi) for every bump not vanishing at x
    std::vector<std::pair<size_t, double>> values(const double* x) const {
        std::vector<std::pair<size_t, double>> v;
        double s = 0.0;
        index_.query_point(x, [&](size_t k) {
            const double b = bump(k, x);
            if (b > 0.0) {
                v.emplace_back(k, b);
                s += b;
            }
        });
        if (s == 0.0) throw std::runtime_error("partition_of_unity: no bump covers the point (covering hole)");
        std::sort(v.begin(), v.end());
        for (auto& p : v) p.second /= s;
        return v;
    }
    double sum(const double* x) const {
        double s = 0.0;
        for (auto& p : values(x)) s += p.second;
        return s;
    }

    // one-sided partial derivative d psi_i / d x_j (side = +1 right, -1 left)
    double partial(size_t i, int j, const double* x, int side) const {
        double S = 0.0, dS = 0.0, b = 0.0, db = 0.0;
        index_.query_point(x, [&](size_t k) {
            double v = 1.0, dv = 1.0;
            for (int m = 0; m < c_.dim(); ++m) {
                const double tm = trap(k, m, x[m], 0);
                v *= tm;
                dv *= m == j ? trap(k, m, x[m], side) : tm;
            }
            S += v;
            dS += dv;
            if (k == i) {
                b = v;
                db = dv;
            }
        });
        if (S == 0.0) return 0.0;
        return (db * S - b * dS) / (S * S);
    }

    // max |grad psi_i| d_Q over a grid of Q* with about `points` nodes plus every breakpoint of the neighbours
    double derivative_constant(size_t i, int points = 1000) const {
        const int d = c_.dim();
        const Box s = c_.box(i, 1);
        const int per_axis = std::max(2, static_cast<int>(std::ceil(std::pow(points, 1.0 / d))));
        std::vector<std::vector<double>> ax(d);
        for (int j = 0; j < d; ++j) {
            for (int k = 0; k < per_axis; ++k) ax[j].push_back(s.lo[j] + (s.hi[j] - s.lo[j]) * k / (per_axis - 1));
            index_.query_box(s, [&](size_t k) {
                const Box q = c_.box(k), qs = c_.box(k, 1);
                for (double v : {q.lo[j], q.hi[j], qs.lo[j], qs.hi[j]})
                    if (v >= s.lo[j] && v <= s.hi[j]) ax[j].push_back(v);
            });
            std::sort(ax[j].begin(), ax[j].end());
            ax[j].erase(std::unique(ax[j].begin(), ax[j].end()), ax[j].end());
        }
        double best = 0.0;
        std::vector<size_t> id(d, 0);
        std::vector<double> x(d);
        while (true) {
            for (int j = 0; j < d; ++j) x[j] = ax[j][id[j]];
            if (c_.domain.contains(x.data())) {
                for (int j = 0; j < d; ++j)
                    for (int side : {-1, 1}) best = std::max(best, std::abs(partial(i, j, x.data(), side)));
            }
            int j = 0;
            while (j < d && ++id[j] == ax[j].size()) id[j++] = 0;
            if (j == d) break;
        }
        return best * c_.cuboids[i].diameter();
    }

private:
    // trapezoid of cuboid i on axis j; side != 0 gives the one-sided derivative
    double trap(size_t i, int j, double x, int side) const {
        const Cuboid& q = c_.cuboids[i];
        const double z = q.center[j], r = q.half[j], R = c_.kappa * r;
        const double lo = z - r, hi = z + r, LO = z - R, HI = z + R;
        const double ramp = R - r;
        if (side == 0) {
            if (x < LO || x > HI) return 0.0;
            if (x < lo) return (x - LO) / ramp;
            if (x > hi) return (HI - x) / ramp;
            return 1.0;
        }
        // derivative on the piece entered from the given side
        const bool right = side > 0;
        if (right ? (x >= LO && x < lo) : (x > LO && x <= lo)) return 1.0 / ramp;
        if (right ? (x >= hi && x < HI) : (x > hi && x <= HI)) return -1.0 / ramp;
        return 0.0;
    }

    AdmissibleCovering c_;
    BoxIndex index_;
};

inline PartitionOfUnity partition_of_unity(const AdmissibleCovering& c) {
    auto rep = validate_covering(c, 1024);
    if (!rep.property1) throw std::runtime_error("partition_of_unity: " + rep.violations.front());
    return PartitionOfUnity(c);
}

// ---------------------------------------------------------------- output

inline void write_covering_csv(std::ostream& os, const AdmissibleCovering& c) {
    const int d = c.dim();
    os << "index";
    for (int j = 0; j < d; ++j) os << ",center" << j;
    for (int j = 0; j < d; ++j) os << ",half" << j;
    os << ",diameter\n";
    char buf[64];
    for (size_t i = 0; i < c.size(); ++i) {
        os << i;
        for (int j = 0; j < d; ++j) {
            std::snprintf(buf, sizeof buf, ",%.17g", c.cuboids[i].center[j]);
            os << buf;
        }
        for (int j = 0; j < d; ++j) {
            std::snprintf(buf, sizeof buf, ",%.17g", c.cuboids[i].half[j]);
            os << buf;
        }
        std::snprintf(buf, sizeof buf, ",%.17g\n", c.cuboids[i].diameter());
        os << buf;
    }
}

// One rect per cuboid of a 2-D covering. Log axes use log2 and need a window inside (0, inf)^2.
inline void write_covering_svg(std::ostream& os, const AdmissibleCovering& c, bool log_axes = false, double size = 800.0) {
    if (c.dim() != 2) throw std::invalid_argument("write_covering_svg: needs a 2-D covering");
    const Box w = c.window.clip(c.domain);
    if (log_axes && (w.lo[0] <= 0.0 || w.lo[1] <= 0.0)) throw std::invalid_argument("write_covering_svg: log axes need a positive window");
    auto map = [&](double v, int j) {
        const double a = log_axes ? std::log2(w.lo[j]) : w.lo[j];
        const double b = log_axes ? std::log2(w.hi[j]) : w.hi[j];
        const double u = log_axes ? std::log2(v) : v;
        return (u - a) / (b - a) * size;
    };
    const double pad = 10.0;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 2 * pad << "\" height=\"" << size + 2 * pad
       << "\" viewBox=\"" << -pad << " " << -pad << " " << size + 2 * pad << " " << size + 2 * pad << "\">\n";
    char buf[256];
    for (size_t i = 0; i < c.size(); ++i) {
        const Box b = c.box(i);
        const double x0 = map(b.lo[0], 0), x1 = map(b.hi[0], 0);
        const double y0 = size - map(b.hi[1], 1), y1 = size - map(b.lo[1], 1);
        std::snprintf(buf, sizeof buf,
                      "<rect x=\"%.6f\" y=\"%.6f\" width=\"%.6f\" height=\"%.6f\" fill=\"none\" stroke=\"black\" "
                      "stroke-width=\"0.5\"/>\n",
                      x0, y0, x1 - x0, y1 - y0);
        os << buf;
    }
    os << "</svg>\n";
}

}  // namespace hardy
