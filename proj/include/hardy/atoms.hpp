#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hardy/coverings.hpp"
#include "hardy/domain.hpp"
#include "hardy/error.hpp"
#include "hardy/quadrature/spatial.hpp"

namespace hardy {

// Piecewise constant function on a uniform cell grid of a box; axis 0 varies fastest.
struct GridFunction {
    Box box;
    std::vector<int> n;
    std::vector<double> v;

    GridFunction() = default;
    GridFunction(Box b, std::vector<int> cells, double fill = 0.0) : box(std::move(b)), n(std::move(cells)) {
        size_t s = 1;
        for (int k : n) s *= static_cast<size_t>(k);
        v.assign(s, fill);
    }
    template <class F>
    static GridFunction sample(const Box& b, const std::vector<int>& cells, F&& f) {
        GridFunction g(b, cells);
        std::vector<double> x(g.dim());
        std::vector<int> id(g.dim(), 0);
        for (size_t c = 0; c < g.v.size(); ++c) {
            g.unflatten(c, id.data());
            for (int j = 0; j < g.dim(); ++j) x[j] = g.center(j, id[j]);
            g.v[c] = f(x.data());
        }
        return g;
    }

    int dim() const { return box.dim(); }
    size_t size() const { return v.size(); }
    double width(int j) const { return (box.hi[j] - box.lo[j]) / n[j]; }
    double edge(int j, int i) const { return i == n[j] ? box.hi[j] : box.lo[j] + i * width(j); }
    double center(int j, int i) const { return box.lo[j] + (i + 0.5) * width(j); }
    double cell_volume() const {
        double s = 1.0;
        for (int j = 0; j < dim(); ++j) s *= width(j);
        return s;
    }
    size_t flatten(const int* id) const {
        size_t c = 0;
        for (int j = dim() - 1; j >= 0; --j) c = c * n[j] + id[j];
        return c;
    }
    void unflatten(size_t c, int* id) const {
        for (int j = 0; j < dim(); ++j) {
            id[j] = static_cast<int>(c % n[j]);
            c /= n[j];
        }
    }
    // value of the cell containing x, 0 outside the box
    double at(const double* x) const {
        std::vector<int> id(dim());
        for (int j = 0; j < dim(); ++j) {
            if (x[j] < box.lo[j] || x[j] > box.hi[j]) return 0.0;
            id[j] = std::min(n[j] - 1, static_cast<int>((x[j] - box.lo[j]) / width(j)));
        }
        return v[flatten(id.data())];
    }
    double integral() const { return pairwise_sum(v) * cell_volume(); }
    double l1() const {
        std::vector<double> a(v.size());
        for (size_t i = 0; i < v.size(); ++i) a[i] = std::abs(v[i]);
        return pairwise_sum(a) * cell_volume();
    }
    double sup_abs() const {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
};

enum class AtomKind { classical, local };

inline const char* to_string(AtomKind k) { return k == AtomKind::classical ? "classical" : "local"; }

struct Atom {
    AtomKind kind = AtomKind::local;
    Cuboid host;         // covering cuboid Q
    Box support;         // K for classical atoms, the support box for local ones
    GridFunction values; // grid box contained in the support
    double at(const double* x) const { return values.at(x); }
};

// |Q|^{-1} chi_Q, Q taken inside X
inline Atom make_local_atom(const Cuboid& q, const DomainSpec& X) {
    Atom a;
    a.kind = AtomKind::local;
    a.host = q;
    a.support = q.box(X);
    a.values = GridFunction(a.support, std::vector<int>(q.dim(), 1), 1.0 / a.support.volume());
    return a;
}

// Random cube K inside Q*, mean-removed uniform noise on `cells` cells per axis, sup norm 0.95 |K|^{-1}.
// K is placed in coordinates relative to Q*, so equal seeds give dilated copies on dilated hosts.
inline Atom random_classical_atom(const Cuboid& q, const DomainSpec& X, double kappa, uint64_t seed, int cells = 256) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Box s = enlarge(q, kappa, 1).box(X);
    const int d = q.dim();
    double side = inf;
    for (int j = 0; j < d; ++j) side = std::min(side, s.hi[j] - s.lo[j]);
    side *= 0.3 + 0.7 * u(rng);
    Box K{std::vector<double>(d), std::vector<double>(d)};
    for (int j = 0; j < d; ++j) {
        K.lo[j] = s.lo[j] + (s.hi[j] - s.lo[j] - side) * u(rng);
        K.hi[j] = K.lo[j] + side;
    }
    GridFunction g(K, std::vector<int>(d, cells));
    for (double& x : g.v) x = 2.0 * u(rng) - 1.0;
    const double mean = pairwise_sum(g.v) / g.v.size();
    for (double& x : g.v) x -= mean;
    // second pass removes the rounding residue of the first
    const double mean2 = pairwise_sum(g.v) / g.v.size();
    for (double& x : g.v) x -= mean2;
    const double scale = 0.95 / (K.volume() * g.sup_abs());
    for (double& x : g.v) x *= scale;
    Atom a;
    a.kind = AtomKind::classical;
    a.host = q;
    a.support = K;
    a.values = std::move(g);
    return a;
}

// Random cube K as above with |a| = |K|^{-1} on every cell and balanced random signs, so ||a||_1 = 1.
// `cells` must be even in total.
inline Atom random_sign_atom(const Cuboid& q, const DomainSpec& X, double kappa, uint64_t seed, int cells = 256) {
    Atom a = random_classical_atom(q, X, kappa, seed, cells);
    auto& v = a.values.v;
    if (v.size() % 2) throw std::invalid_argument("random_sign_atom: odd number of cells");
    const double h = 1.0 / a.support.volume();
    for (size_t i = 0; i < v.size(); ++i) v[i] = i < v.size() / 2 ? h : -h;
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    for (size_t i = v.size() - 1; i > 0; --i) {
        std::uniform_int_distribution<size_t> pick(0, i);
        std::swap(v[i], v[pick(rng)]);
    }
    return a;
}

struct AtomReport {
    bool pass = true;
    bool size_ok = true, cancellation_ok = true, support_ok = true, shape_ok = true;
    double size_ratio = 0.0;    // ||a||_inf |K|
    double cancellation = 0.0;  // |int a|
    std::string message;
};

inline AtomReport validate_atom(const Atom& a, const DomainSpec& X, double kappa) {
    AtomReport r;
    const int d = a.host.dim();
    const double vol = a.support.volume();
    const double scale = a.host.diameter();
    const double tol = 1e-12 * scale;
    auto fail = [&](bool& flag, const std::string& m) {
        flag = false;
        r.pass = false;
        if (!r.message.empty()) r.message += "; ";
        r.message += m;
    };
    if (!a.support.contains_box(a.values.box, tol)) fail(r.support_ok, "grid extends beyond the support box");
    r.size_ratio = a.values.sup_abs() * vol;
    r.cancellation = std::abs(a.values.integral());
    if (a.kind == AtomKind::classical) {
        const Box star = enlarge(a.host, kappa, 1).box(X);
        if (!star.contains_box(a.support, tol)) fail(r.support_ok, "K is not inside Q*");
        for (int j = 1; j < d; ++j)
            if (std::abs((a.support.hi[j] - a.support.lo[j]) - (a.support.hi[0] - a.support.lo[0])) > tol)
                fail(r.shape_ok, "K is not a cube");
        if (r.size_ratio > 1.0 + 1e-12) fail(r.size_ok, "size condition ||a||_inf <= |K|^{-1} violated");
        if (r.cancellation > 1e-10) fail(r.cancellation_ok, "cancellation condition int a = 0 violated");
    } else {
        const Box q = a.host.box(X), qs = enlarge(a.host, kappa, 1).box(X);
        auto same = [&](const Box& b) { return b.contains_box(a.support, tol) && a.support.contains_box(b, tol); };
        if (!same(q) && !same(qs)) fail(r.support_ok, "local atom support is neither Q nor Q*");
        if (!a.support.contains_box(a.values.box, tol) || !a.values.box.contains_box(a.support, tol))
            fail(r.support_ok, "local atom grid does not fill its support");
        for (double v : a.values.v)
            if (std::abs(v * vol - 1.0) > 1e-12) {
                fail(r.size_ok, "local atom is not |Q|^{-1} chi_Q");
                break;
            }
    }
    return r;
}

// ---------------------------------------------------------------- localisation

struct LocalPiece {
    size_t index;     // covering cuboid
    GridFunction fq;  // psi_Q f sampled on the cell centres of Q*
};

inline std::vector<LocalPiece> localize(const std::function<double(const double*)>& f, const PartitionOfUnity& p,
                                        int cells = 256) {
    const auto& c = p.covering();
    std::vector<LocalPiece> out;
    out.reserve(c.size());
    for (size_t i = 0; i < c.size(); ++i) {
        const Box s = c.box(i, 1);
        auto g = GridFunction::sample(s, std::vector<int>(c.dim(), cells), [&](const double* x) {
            const double v = f(x);
            return v == 0.0 ? 0.0 : p.value(i, x) * v;
        });
        out.push_back({i, std::move(g)});
    }
    return out;
}

// ---------------------------------------------------------------- local decomposition

struct Term {
    double lambda;
    Atom atom;
    int level;  // 0 for the mean term, l for a difference piece on a level l-1 dyadic cube
};

struct AtomicDecomposition {
    std::vector<Term> terms;
    double residual_norm = 0.0;         // L1 norm of the part below the depth
    double reconstruction_error = 0.0;  // L1 norm of fq - remainder - sum lambda a on the grid
    double sum_abs_lambda() const {
        std::vector<double> a;
        for (const auto& t : terms) a.push_back(std::abs(t.lambda));
        return pairwise_sum(a);
    }
};

namespace detail {

// cube of side max(side of b) containing b, pushed inside `room`
inline Box enclosing_cube(const Box& b, const Box& room) {
    const int d = b.dim();
    double side = 0.0;
    for (int j = 0; j < d; ++j) side = std::max(side, b.hi[j] - b.lo[j]);
    Box k = b;
    for (int j = 0; j < d; ++j) {
        if (room.hi[j] - room.lo[j] < side * (1.0 - 1e-12))
            throw std::invalid_argument("local_decompose: host Q* is too elongated for a cube around a dyadic piece");
        const double extra = side - (b.hi[j] - b.lo[j]);
        k.lo[j] = std::clamp(b.lo[j] - 0.5 * extra, room.lo[j], room.hi[j] - side);
        k.hi[j] = k.lo[j] + side;
        if (extra == 0.0) {
            k.lo[j] = b.lo[j];
            k.hi[j] = b.hi[j];
        }
    }
    return k;
}

}  // namespace detail

// Haar-type multiscale decomposition of fq on its grid box (the host's Q*).
inline AtomicDecomposition local_decompose(const GridFunction& fq, const Cuboid& host, const DomainSpec& X, double kappa,
                                           int depth) {
    const int d = fq.dim();
    if (depth < 0) throw std::invalid_argument("local_decompose: negative depth");
    const Box B = fq.box;
    const Box star = enlarge(host, kappa, 1).box(X);
    if (!star.contains_box(B, 1e-12 * host.diameter())) throw window_error("local_decompose: fq is not supported in Q*");
    for (int j = 0; j < d; ++j) {
        if (depth >= 31 || (fq.n[j] >> depth) == 0 || (fq.n[j] % (1 << depth)) != 0)
            throw resolution_error("local_decompose: depth " + std::to_string(depth) + " exceeds the grid resolution " +
                                   std::to_string(fq.n[j]));
    }
    // block averages on each level
    std::vector<std::vector<double>> avg(depth + 1);
    std::vector<int> nb(d);
    for (int l = 0; l <= depth; ++l) {
        for (int j = 0; j < d; ++j) nb[j] = 1 << l;
        GridFunction lev(B, nb);
        std::vector<int> cid(d), bid(d);
        std::vector<std::vector<double>> parts(lev.size());
        for (size_t c = 0; c < fq.size(); ++c) {
            fq.unflatten(c, cid.data());
            for (int j = 0; j < d; ++j) bid[j] = cid[j] / (fq.n[j] >> l);
            parts[lev.flatten(bid.data())].push_back(fq.v[c]);
        }
        avg[l].resize(lev.size());
        for (size_t k = 0; k < lev.size(); ++k) avg[l][k] = pairwise_sum(parts[k]) / parts[k].size();
    }

    AtomicDecomposition out;
    // level 0: local atom on Q*
    {
        const double lam = avg[0][0] * B.volume();
        if (lam != 0.0) {
            Atom a;
            a.kind = AtomKind::local;
            a.host = host;
            a.support = B;
            a.values = GridFunction(B, std::vector<int>(d, 1), 1.0 / B.volume());
            out.terms.push_back({lam, std::move(a), 0});
        }
    }
    std::vector<int> pid(d), chid(d);
    for (int l = 0; l < depth; ++l) {
        for (int j = 0; j < d; ++j) nb[j] = 1 << l;
        GridFunction parent(B, nb);
        for (int j = 0; j < d; ++j) nb[j] = 1 << (l + 1);
        GridFunction child(B, nb);
        for (size_t p = 0; p < parent.size(); ++p) {
            parent.unflatten(p, pid.data());
            Box pb{std::vector<double>(d), std::vector<double>(d)};
            for (int j = 0; j < d; ++j) {
                pb.lo[j] = parent.edge(j, pid[j]);
                pb.hi[j] = parent.edge(j, pid[j] + 1);
            }
            GridFunction g(pb, std::vector<int>(d, 2));
            for (size_t k = 0; k < g.size(); ++k) {
                g.unflatten(k, chid.data());
                for (int j = 0; j < d; ++j) chid[j] += 2 * pid[j];
                g.v[k] = avg[l + 1][child.flatten(chid.data())] - avg[l][p];
            }
            const double m = g.sup_abs();
            if (m == 0.0) continue;
            const Box K = detail::enclosing_cube(pb, star);
            const double lam = m * K.volume();
            for (double& x : g.v) x /= lam;
            Atom a;
            a.kind = AtomKind::classical;
            a.host = host;
            a.support = K;
            a.values = std::move(g);
            out.terms.push_back({lam, std::move(a), l + 1});
        }
    }

    // remainder and reconstruction check on the grid
    std::vector<double> rem(fq.size()), err(fq.size());
    std::vector<int> cid(d), bid(d);
    for (int j = 0; j < d; ++j) nb[j] = 1 << depth;
    GridFunction deep(B, nb);
    for (size_t c = 0; c < fq.size(); ++c) {
        fq.unflatten(c, cid.data());
        for (int j = 0; j < d; ++j) bid[j] = cid[j] / (fq.n[j] >> depth);
        rem[c] = std::abs(fq.v[c] - avg[depth][deep.flatten(bid.data())]);
    }
    out.residual_norm = pairwise_sum(rem) * fq.cell_volume();
    std::vector<double> recon(fq.size(), 0.0);
    std::vector<double> x(d);
    for (const auto& t : out.terms) {
        const auto& g = t.atom.values;
        // every fine cell whose centre lies in the term's grid box
        std::vector<int> lo(d), hi(d);
        for (int j = 0; j < d; ++j) {
            lo[j] = static_cast<int>(std::lround((g.box.lo[j] - B.lo[j]) / fq.width(j)));
            hi[j] = static_cast<int>(std::lround((g.box.hi[j] - B.lo[j]) / fq.width(j)));
        }
        std::vector<int> id = lo;
        while (true) {
            for (int j = 0; j < d; ++j) x[j] = fq.center(j, id[j]);
            recon[fq.flatten(id.data())] += t.lambda * g.at(x.data());
            int j = 0;
            while (j < d && ++id[j] == hi[j]) {
                id[j] = lo[j];
                ++j;
            }
            if (j == d) break;
        }
    }
    for (size_t c = 0; c < fq.size(); ++c) {
        fq.unflatten(c, cid.data());
        for (int j = 0; j < d; ++j) bid[j] = cid[j] / (fq.n[j] >> depth);
        const double r = fq.v[c] - avg[depth][deep.flatten(bid.data())];
        err[c] = std::abs(fq.v[c] - r - recon[c]);
    }
    out.reconstruction_error = pairwise_sum(err) * fq.cell_volume();
    return out;
}

// ---------------------------------------------------------------- serialisation

namespace detail {

inline std::string join_numbers(const std::vector<double>& v) {
    std::string s;
    char buf[32];
    for (size_t i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.17g", i ? "," : "", v[i]);
        s += buf;
    }
    return s;
}

inline std::vector<double> split_numbers(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) v.push_back(std::stod(tok));
    return v;
}

inline std::string expect(std::istream& is, const std::string& key) {
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos || line.substr(0, eq) != key)
            throw std::runtime_error("atom parse: expected '" + key + "=', got '" + line + "'");
        return line.substr(eq + 1);
    }
    throw std::runtime_error("atom parse: unexpected end of input, wanted " + key);
}

}  // namespace detail

// kind / host / support / coefficient / grid header lines, then one CSV line of grid values
inline void write_atom(std::ostream& os, const Atom& a, double coefficient = 1.0) {
    char buf[32];
    os << "kind=" << to_string(a.kind) << "\n";
    os << "host_center=" << detail::join_numbers(a.host.center) << "\n";
    os << "host_half=" << detail::join_numbers(a.host.half) << "\n";
    os << "support_lo=" << detail::join_numbers(a.support.lo) << "\n";
    os << "support_hi=" << detail::join_numbers(a.support.hi) << "\n";
    os << "grid_lo=" << detail::join_numbers(a.values.box.lo) << "\n";
    os << "grid_hi=" << detail::join_numbers(a.values.box.hi) << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", coefficient);
    os << "coefficient=" << buf << "\n";
    std::vector<double> n(a.values.n.begin(), a.values.n.end());
    os << "cells=" << detail::join_numbers(n) << "\n";
    os << "values=" << detail::join_numbers(a.values.v) << "\n";
}

inline std::pair<Atom, double> read_atom(std::istream& is) {
    Atom a;
    const std::string k = detail::expect(is, "kind");
    if (k == "classical")
        a.kind = AtomKind::classical;
    else if (k == "local")
        a.kind = AtomKind::local;
    else
        throw std::runtime_error("atom parse: unknown kind " + k);
    a.host.center = detail::split_numbers(detail::expect(is, "host_center"));
    a.host.half = detail::split_numbers(detail::expect(is, "host_half"));
    a.support.lo = detail::split_numbers(detail::expect(is, "support_lo"));
    a.support.hi = detail::split_numbers(detail::expect(is, "support_hi"));
    Box g{detail::split_numbers(detail::expect(is, "grid_lo")), detail::split_numbers(detail::expect(is, "grid_hi"))};
    const double coef = std::stod(detail::expect(is, "coefficient"));
    std::vector<int> n;
    for (double v : detail::split_numbers(detail::expect(is, "cells"))) n.push_back(static_cast<int>(v));
    a.values = GridFunction(g, n);
    auto v = detail::split_numbers(detail::expect(is, "values"));
    if (v.size() != a.values.size()) throw std::runtime_error("atom parse: value count does not match the grid");
    a.values.v = std::move(v);
    return {std::move(a), coef};
}

inline void write_decomposition(std::ostream& os, const AtomicDecomposition& dec) {
    char buf[64];
    os << "terms=" << dec.terms.size() << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", dec.sum_abs_lambda());
    os << "sum_abs_lambda=" << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", dec.residual_norm);
    os << "residual_norm=" << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", dec.reconstruction_error);
    os << "reconstruction_error=" << buf << "\n";
    for (const auto& t : dec.terms) {
        os << "level=" << t.level << "\n";
        write_atom(os, t.atom, t.lambda);
    }
}

}  // namespace hardy
