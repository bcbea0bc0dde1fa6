#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hardy/error.hpp"

namespace hardy {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
    int intervals = 0;
    bool converged = true;
};

struct AdaptiveOptions {
    double abs_tol = 0.0;
    double rel_tol = 1e-10;
    double l1_tol = 0.0;  // accept err <= l1_tol * int|f| (roundoff floor for oscillatory f)
    int max_intervals = 4000;
    bool throw_on_failure = true;
};

namespace detail {

struct Segment {
    double a, b, value, error, l1;
    bool operator<(const Segment& o) const { return error < o.error; }
};

// Kronrod 21 with the embedded Gauss 10 estimate; tables from Boost.Math.
template <class F>
Segment gk21(F& f, double a, double b) {
    using kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
    using gauss = boost::math::quadrature::gauss<double, 10>;
    static const auto& xk = kronrod::abscissa();
    static const auto& wk = kronrod::weights();
    static const auto& wg = gauss::weights();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double f0 = f(c);
    double rk = f0 * wk[0], rg = 0.0, l1 = std::abs(f0) * wk[0];
    for (size_t i = 1; i < xk.size(); ++i) {
        const double fp = f(c + h * xk[i]), fm = f(c - h * xk[i]);
        rk += (fp + fm) * wk[i];
        l1 += (std::abs(fp) + std::abs(fm)) * wk[i];
        if (i & 1) rg += (fp + fm) * wg[i / 2];
    }
    const double err = std::max(std::abs(rk - rg), 2.0 * std::numeric_limits<double>::epsilon() * std::abs(rk));
    return {a, b, rk * h, err * std::abs(h), l1 * std::abs(h)};
}

}  // namespace detail

// Global adaptive Gauss-Kronrod on [a,b] split at the given interior breakpoints.
template <class F>
QuadResult integrate_adaptive(F&& f, std::vector<double> pts, const AdaptiveOptions& opt = {}) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    QuadResult r;
    if (pts.size() < 2) return r;
    std::vector<detail::Segment> heap;
    heap.reserve(64);
    double total = 0.0, err = 0.0, l1 = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        auto s = detail::gk21(f, pts[i], pts[i + 1]);
        total += s.value;
        err += s.error;
        l1 += s.l1;
        heap.push_back(s);
    }
    std::make_heap(heap.begin(), heap.end());
    double stuck = 0.0;
    auto done = [&] { return err + stuck <= std::max({opt.abs_tol, opt.rel_tol * std::abs(total), opt.l1_tol * l1}); };
    while (!done()) {
        if (static_cast<int>(heap.size()) >= opt.max_intervals) break;
        std::pop_heap(heap.begin(), heap.end());
        auto s = heap.back();
        heap.pop_back();
        if (s.error <= 0.0) {
            heap.push_back(s);
            break;
        }
        const double m = 0.5 * (s.a + s.b);
        if (!(m > s.a && m < s.b) || std::abs(s.b - s.a) < 1e-14 * std::max(std::abs(s.a), std::abs(s.b))) {
            // too narrow to split; park its error outside the heap
            err -= s.error;
            stuck += s.error;
            heap.push_back({s.a, s.b, s.value, 0.0, s.l1});
            std::push_heap(heap.begin(), heap.end());
            continue;
        }
        auto left = detail::gk21(f, s.a, m);
        auto right = detail::gk21(f, m, s.b);
        total += left.value + right.value - s.value;
        err += left.error + right.error - s.error;
        l1 += left.l1 + right.l1 - s.l1;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end());
    }
    // recompute sums to shed accumulated cancellation
    total = l1 = 0.0;
    err = stuck;
    for (const auto& s : heap) {
        total += s.value;
        err += s.error;
        l1 += s.l1;
    }
    stuck = 0.0;
    r.value = total;
    r.error = err;
    r.l1 = l1;
    r.intervals = static_cast<int>(heap.size());
    r.converged = done();
    if (!r.converged && opt.throw_on_failure)
    {
        char buf[160];
        std::snprintf(buf, sizeof buf, "adaptive quadrature stopped at %d intervals, error estimate %.3g on value %.6g",
                      r.intervals, err, total);
        throw numerical_failure(buf, err);
    }
    return r;
}

template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, const AdaptiveOptions& opt = {}) {
    return integrate_adaptive(std::forward<F>(f), std::vector<double>{a, b}, opt);
}

}  // namespace hardy
