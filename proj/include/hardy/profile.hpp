#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <vector>

#include "hardy/kernels.hpp"
#include "hardy/quadrature/tgrid.hpp"

namespace hardy {

// K(t_k) = int u(t_k s) g_nu(s) ds on a geometric output grid, by the trapezoid rule in log s
// against base values u on a finer geometric grid.
class SubordinationConvolver {
public:
    SubordinationConvolver(const Subordinator& sub, const TGrid& out, double h_target = 0.05, double tail = 1e-10)
        : n_out_(out.size()), t0_(out.t_min) {
        const double H = out.log_step();
        m_ = std::max(1, static_cast<int>(std::ceil(H / h_target)));
        hf_ = H / m_;
        const double nu = sub.nu();
        ilo_ = static_cast<long>(std::floor(std::log(sub.s_lo()) / hf_));
        // P(S > s) ~ s^{-nu}/Gamma(1-nu): stop where that falls below `tail`
        const double c_hi = std::min(std::log(1.0 / tail) / nu, 600.0);
        ihi_ = static_cast<long>(std::ceil(c_hi / hf_));
        w_.resize(ihi_ - ilo_ + 1);
        for (long i = ilo_; i <= ihi_; ++i) w_[i - ilo_] = hf_ * sub.log_weight(i * hf_);
        // trim vanishing ends
        size_t a = 0, b = w_.size();
        while (a < b && w_[a] == 0.0) ++a;
        while (b > a && w_[b - 1] == 0.0) --b;
        w_ = std::vector<double>(w_.begin() + a, w_.begin() + b);
        ilo_ += static_cast<long>(a);
        ihi_ = ilo_ + static_cast<long>(w_.size()) - 1;
    }

    size_t base_size() const { return static_cast<size_t>((n_out_ - 1) * m_ + (ihi_ - ilo_) + 1); }
    double base_time(size_t b) const { return t0_ * std::exp((static_cast<long>(b) + ilo_) * hf_); }

    void apply(const double* base, double* out) const {
        for (size_t k = 0; k < n_out_; ++k) {
            const double* u = base + k * m_;
            double s = 0.0;
            for (size_t i = 0; i < w_.size(); ++i) s += w_[i] * u[i];
            out[k] = s;
        }
    }

private:
    size_t n_out_;
    double t0_;
    int m_;
    double hf_;
    long ilo_, ihi_;
    std::vector<double> w_;
};

// Time profiles t -> Phi(T_t) on a fixed grid, where Phi is linear in the kernel (a point value, a cell
// integral, T_t a(x), ...). f(base_kernel, t) evaluates Phi for kernels that are not subordinated.
class ProfileEngine {
public:
    explicit ProfileEngine(TGrid grid) : grid_(std::move(grid)) {}
    const TGrid& grid() const { return grid_; }

    template <class F>
    void profile(const Kernel& k, F&& f, double* out) {
        if (k.kind() == KernelKind::subordinate || k.kind() == KernelKind::stable) {
            const auto& s = static_cast<const SubordinateKernel&>(k);
            const auto& conv = convolver(s.subordinator());
            buf_.resize(conv.base_size());
            for (size_t b = 0; b < buf_.size(); ++b) buf_[b] = f(*s.base(), conv.base_time(b));
            conv.apply(buf_.data(), out);
            return;
        }
        for (size_t i = 0; i < grid_.size(); ++i) out[i] = f(k, grid_[i]);
    }
    template <class F>
    std::vector<double> profile(const Kernel& k, F&& f) {
        std::vector<double> v(grid_.size());
        profile(k, f, v.data());
        return v;
    }

private:
    const SubordinationConvolver& convolver(const Subordinator& s) {
        auto it = cache_.find(&s);
        if (it == cache_.end()) it = cache_.emplace(&s, std::make_unique<SubordinationConvolver>(s, grid_)).first;
        return *it->second;
    }

    TGrid grid_;
    std::map<const Subordinator*, std::unique_ptr<SubordinationConvolver>> cache_;
    std::vector<double> buf_;
};

// max over k in [k0, k1) of t_k^delta |v_k|, refined by a parabola in log t through the neighbours of the argmax
inline SupResult sup_parabolic(const TGrid& g, const double* v, double delta, size_t k0 = 0, size_t k1 = 0) {
    if (k1 == 0 || k1 > g.size()) k1 = g.size();
    SupResult r;
    size_t km = k0;
    double best = -1.0;
    auto w = [&](size_t k) { return (delta == 0.0 ? 1.0 : std::pow(g[k], delta)) * std::abs(v[k]); };
    for (size_t k = k0; k < k1; ++k) {
        const double x = w(k);
        if (x > best) {
            best = x;
            km = k;
        }
    }
    r.value = std::max(best, 0.0);
    r.t_arg = g[km];
    r.at_lower_end = km == k0 && best > 0.0;
    r.at_upper_end = km + 1 == k1 && best > 0.0;
    if (km > k0 && km + 1 < k1) {
        const double a = w(km - 1), b = best, c = w(km + 1);
        const double den = a - 2.0 * b + c;
        if (den < 0.0) {
            const double p = 0.5 * (a - c) / den;
            const double peak = b - 0.25 * (a - c) * p;
            if (peak > b && std::abs(p) <= 1.0) {
                r.value = peak;
                r.t_arg = g[km] * std::exp(p * g.log_step());
            }
        }
    }
    return r;
}

enum class SupMode { value, difference };

// sup over the grid of t^delta g(t), g = T_t(x,y) or |T_t - comparison_t|(x,y), with a golden-section pass
inline SupResult sup_over_t(const Kernel& k, const TGrid& grid, double delta, const double* x, const double* y,
                            SupMode mode = SupMode::value) {
    const KernelPtr cmp = k.comparison();
    auto g = [&](double t) {
        const double v = k.value(t, x, y);
        if (mode == SupMode::value) return v;
        return std::abs(v - cmp->value(t, x, y));
    };
    return sup_over_t(g, grid, delta, true);
}

}  // namespace hardy
