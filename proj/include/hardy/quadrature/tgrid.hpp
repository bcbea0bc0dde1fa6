#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace hardy {

// Geometric grid t_min = t_0 < ... < t_K = t_max with about points_per_decade nodes per decade.
struct TGrid {
    double t_min = 0.0, t_max = 0.0;
    int points_per_decade = 16;
    std::vector<double> values;

    TGrid() = default;
    TGrid(double tmin, double tmax, int ppd) : t_min(tmin), t_max(tmax), points_per_decade(ppd) {
        if (!(tmin > 0.0) || !(tmax > tmin) || ppd < 1) throw std::invalid_argument("TGrid: need 0 < t_min < t_max");
        const int K = std::max(1, static_cast<int>(std::ceil(ppd * std::log10(tmax / tmin) - 1e-9)));
        const double h = std::log(tmax / tmin) / K;
        values.resize(K + 1);
        for (int k = 0; k <= K; ++k) values[k] = tmin * std::exp(k * h);
        values.front() = tmin;
        values.back() = tmax;
    }
    // per-cuboid default: [1e-8, 1e4] d_Q^2
    static TGrid for_cuboid(double dq, int ppd = 16, double lo = 1e-8, double hi = 1e4) {
        return TGrid(lo * dq * dq, hi * dq * dq, ppd);
    }
    size_t size() const { return values.size(); }
    double log_step() const { return std::log(t_max / t_min) / (values.size() - 1); }
    double operator[](size_t k) const { return values[k]; }
};

struct SupResult {
    double value = 0.0;
    double t_arg = 0.0;
    bool at_lower_end = false;  // maximiser sits at t_min; the true sup may lie below the grid
    bool at_upper_end = false;  // maximiser sits at t_max
};

namespace detail {

// golden-section search for the max of phi on [a, b] (log t)
template <class Phi>
std::pair<double, double> golden_max(Phi&& phi, double a, double b, double tol = 1e-5) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = phi(c), fd = phi(d);
    while (b - a > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = phi(d);
        }
    }
    return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace detail

// max over the grid of t^delta g(t) given samples vals[k] = g(t_k), then one golden-section pass
// in log t around the discrete argmax using g itself.
template <class G>
SupResult sup_from_samples(const TGrid& grid, const double* vals, double delta, G&& g, bool refine = true) {
    SupResult r;
    size_t kmax = 0;
    double best = -1.0;
    for (size_t k = 0; k < grid.size(); ++k) {
        const double v = (delta == 0.0 ? 1.0 : std::pow(grid[k], delta)) * vals[k];
        if (v > best) {
            best = v;
            kmax = k;
        }
    }
    r.value = std::max(best, 0.0);
    r.t_arg = grid[kmax];
    r.at_lower_end = kmax == 0 && best > 0.0;
    r.at_upper_end = kmax + 1 == grid.size() && best > 0.0;
    if (refine && best > 0.0) {
        const double a = std::log(grid[kmax == 0 ? 0 : kmax - 1]);
        const double b = std::log(grid[std::min(kmax + 1, grid.size() - 1)]);
        auto phi = [&](double lt) {
            const double t = std::exp(lt);
            return std::exp(delta * lt) * g(t);
        };
        auto [lt, v] = detail::golden_max(phi, a, b);
        if (v > r.value) {
            r.value = v;
            r.t_arg = std::exp(lt);
        }
    }
    return r;
}

// sup over the grid of t^delta g(t)
template <class G>
SupResult sup_over_t(G&& g, const TGrid& grid, double delta = 0.0, bool refine = true) {
    std::vector<double> vals(grid.size());
    for (size_t k = 0; k < grid.size(); ++k) vals[k] = g(grid[k]);
    return sup_from_samples(grid, vals.data(), delta, g, refine);
}

}  // namespace hardy
