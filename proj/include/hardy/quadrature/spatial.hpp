#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hardy/domain.hpp"
#include "hardy/error.hpp"

namespace hardy {

// Pairwise summation of a contiguous range.
inline double pairwise_sum(const double* v, size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

struct GradePoint {
    double x;
    double first;  // interval size next to x
};

// Edges on [a, b]: sizes first_p + (ratio - 1)|x - p| near each special point, capped at max_h.
// Special points inside [a, b] become edges.
inline std::vector<double> graded_edges(double a, double b, std::vector<GradePoint> sp, double ratio, double max_h) {
    if (!(b > a)) return {};
    sp.push_back({a, max_h});
    sp.push_back({b, max_h});
    std::vector<double> stops;
    for (const auto& p : sp)
        if (p.x >= a && p.x <= b) stops.push_back(p.x);
    std::sort(stops.begin(), stops.end());
    auto size = [&](double x) {
        double h = max_h;
        for (const auto& p : sp) h = std::min(h, p.first + (ratio - 1.0) * std::abs(x - p.x));
        return h;
    };
    std::vector<double> e{a};
    size_t next = 0;
    double x = a;
    const double eps = 1e-13 * std::max({std::abs(a), std::abs(b), b - a});
    while (x < b - eps) {
        while (next < stops.size() && stops[next] <= x + eps) ++next;
        const double target = next < stops.size() ? stops[next] : b;
        double h = size(x);
        // split the remaining gap evenly instead of leaving a sliver
        if (x + h >= target - 0.25 * h)
            x = target;
        else
            x += h;
        e.push_back(x);
    }
    e.back() = b;
    return e;
}

// Composite 1-D rule: per interval the midpoint (level 1) and the two quarter points (level 2).
struct AxisRule {
    std::vector<double> edges;

    size_t intervals() const { return edges.empty() ? 0 : edges.size() - 1; }
    size_t node_count() const { return 3 * intervals(); }
    // node ids: 3i = midpoint, 3i+1 / 3i+2 = quarter points of interval i
    double node(size_t id) const {
        const size_t i = id / 3;
        const double a = edges[i], h = edges[i + 1] - edges[i];
        switch (id % 3) {
        case 0: return a + 0.5 * h;
        case 1: return a + 0.25 * h;
        default: return a + 0.75 * h;
        }
    }
    std::vector<double> nodes() const {
        std::vector<double> n(node_count());
        for (size_t i = 0; i < n.size(); ++i) n[i] = node(i);
        return n;
    }
};

struct CellValue {
    std::vector<double> center;
    double value;
    double error;
};

struct RuleResult {
    double value = 0.0;   // Richardson value (4 I2 - I1) / 3
    double error = 0.0;   // |I2 - I1| / 3 summed over cells
    double level1 = 0.0;  // coarse midpoint sum
    double level2 = 0.0;  // refined midpoint sum
    std::vector<CellValue> cells;
};

struct RuleOptions {
    double rel_tol = 0.05;
    double abs_tol = 0.0;
    bool throw_on_failure = false;
    bool keep_cells = false;
};

// Product midpoint rule over the cells of the per-axis edge grid, minus the cells inside `excluded`.
class TensorRule {
public:
    TensorRule() = default;
    TensorRule(std::vector<AxisRule> axes, std::optional<Box> excluded = std::nullopt)
        : axes_(std::move(axes)), excl_(std::move(excluded)) {}

    int dim() const { return static_cast<int>(axes_.size()); }
    const AxisRule& axis(int j) const { return axes_[j]; }
    const std::optional<Box>& excluded() const { return excl_; }

    bool cell_included(const size_t* idx) const {
        if (!excl_) return true;
        for (int j = 0; j < dim(); ++j) {
            const double m = 0.5 * (axes_[j].edges[idx[j]] + axes_[j].edges[idx[j] + 1]);
            if (m < excl_->lo[j] || m > excl_->hi[j]) return true;
        }
        return false;
    }

    // sum of included cell volumes
    double volume() const {
        double v = 0.0;
        for_each_cell([&](const size_t* idx) {
            double c = 1.0;
            for (int j = 0; j < dim(); ++j) c *= axes_[j].edges[idx[j] + 1] - axes_[j].edges[idx[j]];
            v += c;
        });
        return v;
    }

    // f(const size_t* node_ids, const double* x)
    template <class F>
    RuleResult integrate(F&& f, const RuleOptions& opt = {}) const {
        const int d = dim();
        std::vector<double> i1, i2, er;
        RuleResult r;
        std::vector<size_t> id(d);
        std::vector<double> x(d);
        for_each_cell([&](const size_t* idx) {
            double vol = 1.0;
            for (int j = 0; j < d; ++j) {
                id[j] = 3 * idx[j];
                x[j] = axes_[j].node(id[j]);
                vol *= axes_[j].edges[idx[j] + 1] - axes_[j].edges[idx[j]];
            }
            const double a = vol * f(id.data(), x.data());
            double b = 0.0;
            for (int m = 0; m < (1 << d); ++m) {
                for (int j = 0; j < d; ++j) {
                    id[j] = 3 * idx[j] + 1 + ((m >> j) & 1);
                    x[j] = axes_[j].node(id[j]);
                }
                b += f(id.data(), x.data());
            }
            b *= vol / (1 << d);
            i1.push_back(a);
            i2.push_back(b);
            er.push_back(std::abs(b - a) / 3.0);
            if (opt.keep_cells) {
                std::vector<double> c(d);
                for (int j = 0; j < d; ++j) c[j] = 0.5 * (axes_[j].edges[idx[j]] + axes_[j].edges[idx[j] + 1]);
                r.cells.push_back({std::move(c), (4.0 * b - a) / 3.0, std::abs(b - a) / 3.0});
            }
        });
        r.level1 = pairwise_sum(i1);
        r.level2 = pairwise_sum(i2);
        r.value = (4.0 * r.level2 - r.level1) / 3.0;
        r.error = pairwise_sum(er);
        if (opt.throw_on_failure && r.error > std::max(opt.abs_tol, opt.rel_tol * std::abs(r.value))) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "spatial rule error %.3g exceeds tolerance on value %.6g", r.error, r.value);
            throw numerical_failure(buf, r.error);
        }
        return r;
    }

    template <class C>
    void for_each_cell(C&& c) const {
        const int d = dim();
        for (int j = 0; j < d; ++j)
            if (axes_[j].intervals() == 0) return;
        std::vector<size_t> idx(d, 0);
        while (true) {
            if (cell_included(idx.data())) c(idx.data());
            int j = 0;
            while (j < d && ++idx[j] == axes_[j].intervals()) idx[j++] = 0;
            if (j == d) break;
        }
    }

private:
    std::vector<AxisRule> axes_;
    std::optional<Box> excl_;
};

// pointwise integrand convenience
template <class F>
RuleResult integrate(const TensorRule& rule, F&& f, const RuleOptions& opt = {}) {
    return rule.integrate([&](const size_t*, const double* x) { return f(x); }, opt);
}

// Uniform rule on a box: n intervals per axis.
inline TensorRule box_rule(const Box& b, int n) {
    std::vector<AxisRule> ax;
    for (int j = 0; j < b.dim(); ++j) {
        AxisRule a;
        for (int i = 0; i <= n; ++i) a.edges.push_back(b.lo[j] + (b.hi[j] - b.lo[j]) * i / n);
        ax.push_back(std::move(a));
    }
    return TensorRule(std::move(ax));
}

}  // namespace hardy
