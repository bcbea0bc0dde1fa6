#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hardy/error.hpp"
#include "hardy/quadrature/adaptive.hpp"

namespace hardy {

// ---------------------------------------------------------------- modified Bessel I_tau

namespace detail {

// e^{-z} I_tau(z) from the ascending series; every term is positive for tau >= -1/2.
inline double bessel_series_scaled(double tau, double z) {
    if (z == 0.0) {
        if (tau == 0.0) return 1.0;
        if (tau > 0.0) return 0.0;
        throw std::overflow_error("bessel_i: I_tau(0) is infinite for tau < 0");
    }
    const double q = 0.25 * z * z;
    double sum = 1.0, term = 1.0, log_scale = 0.0;
    for (int k = 1; k < 100000; ++k) {
        term *= q / (k * (k + tau));
        sum += term;
        if (term < 1e-17 * sum) break;
        if (sum > 1e280) {
            sum *= 1e-280;
            term *= 1e-280;
            log_scale += 280.0 * std::numbers::ln10;
        }
    }
    const double lead = tau * std::log(0.5 * z) - std::lgamma(tau + 1.0) - z + log_scale;
    return std::exp(lead + std::log(sum));
}

// e^{-z} I_tau(z) from the large-argument expansion; empty when the terms start
// growing before reaching full precision.
inline std::optional<double> bessel_asymptotic_scaled(double tau, double z) {
    if (z <= 0.0) return std::nullopt;
    const double mu = 4.0 * tau * tau;
    double sum = 1.0, term = 1.0, prev = 1.0;
    for (int k = 1; k < 400; ++k) {
        const double f = (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (8.0 * k * z);
        term *= -f;
        if (term == 0.0) return sum / std::sqrt(2.0 * std::numbers::pi * z);
        if (std::abs(term) > std::abs(prev) && k > 1) return std::nullopt;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) return sum / std::sqrt(2.0 * std::numbers::pi * z);
        prev = term;
    }
    return std::nullopt;
}

}  // namespace detail

// switch point between the two branches
inline double bessel_crossover(double tau) { return std::max(30.0, tau * tau); }

inline double bessel_i_scaled(double tau, double z) {
    if (!(tau >= -0.5)) throw std::domain_error("bessel_i: tau must be >= -1/2");
    if (!(z >= 0.0) || !std::isfinite(z)) throw std::domain_error("bessel_i: z must be finite and >= 0");
    if (tau == 0.5 && z > 0.0) return -std::expm1(-2.0 * z) / std::sqrt(2.0 * std::numbers::pi * z);
    if (z > bessel_crossover(tau))
        if (auto a = detail::bessel_asymptotic_scaled(tau, z)) return *a;
    return detail::bessel_series_scaled(tau, z);
}

// log(e^{-z} I_tau(z)), finite for tiny z where the scaled value underflows
inline double log_bessel_i_scaled(double tau, double z) {
    if (z > 0.0 && z < 1e-150) return tau * std::log(0.5 * z) - std::lgamma(tau + 1.0) - z;
    return std::log(bessel_i_scaled(tau, z));
}

struct BesselValue {
    double value;
    bool scaled;  // true: value holds e^{-z} I_tau(z)
};

inline BesselValue bessel_i(double tau, double z) {
    const double s = bessel_i_scaled(tau, z);
    if (z > 700.0) return {s, true};
    return {s * std::exp(z), false};
}

inline double bessel_i_unscaled(double tau, double z) {
    const double s = bessel_i_scaled(tau, z);
    const double lg = std::log(s) + z;
    if (lg > std::log(std::numeric_limits<double>::max()))
        throw std::overflow_error("bessel_i: I_tau(z) exceeds double range");
    return s * std::exp(z);
}

// ---------------------------------------------------------------- one-sided stable density

struct StableDensityParams {
    double nu;
    double theta;  // pi / (1 + nu)
    double s1;     // below s1 the series is ill-conditioned and the w-integral is used

    explicit StableDensityParams(double nu_);
};

// 1/pi: the w-integral representation integrates to one only with this prefactor
inline constexpr double stable_density_normalization = std::numbers::inv_pi;

namespace detail {

struct SeriesValue {
    double value;
    double abs_sum;
    bool converged;
};

// pi^{-1} sum_{k>=1} (-1)^{k+1} Gamma(nu k + 1)/k! sin(pi nu k) s^{-nu k - 1}
inline SeriesValue stable_series(double nu, double s) {
    const double ls = std::log(s);
    double sum = 0.0, abs_sum = 0.0;
    for (int k = 1; k <= 2000; ++k) {
        const double lmag = std::lgamma(nu * k + 1.0) - std::lgamma(k + 1.0) - (nu * k + 1.0) * ls;
        const double mag = std::exp(lmag);
        const double t = ((k & 1) ? 1.0 : -1.0) * mag * std::sin(std::numbers::pi * nu * k);
        sum += t;
        abs_sum += std::abs(t);
        if (mag < 1e-14 * std::abs(sum) && k > 2) return {sum * std::numbers::inv_pi, abs_sum * std::numbers::inv_pi, true};
        if (!std::isfinite(abs_sum) || abs_sum > 1e100) break;
    }
    return {sum * std::numbers::inv_pi, abs_sum * std::numbers::inv_pi, false};
}

inline bool series_ok(const SeriesValue& v) {
    return v.converged && v.abs_sum < 1e3 * std::abs(v.value) && v.value > 0.0;
}

// upper end of the w-range: (w s + w^nu)|cos theta| = 36.84, i.e. damping below 1e-16
inline double stable_w_max(double nu, double theta, double s) {
    const double target = 36.84 / std::abs(std::cos(theta));
    auto h = [&](double w) { return w * s + std::pow(w, nu); };
    double lo = 0.0, hi = 1.0;
    while (h(hi) < target) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double m = 0.5 * (lo + hi);
        (h(m) < target ? lo : hi) = m;
    }
    return hi;
}

inline QuadResult stable_integral(double nu, double theta, double s, bool throw_on_failure = true) {
    const double c = std::cos(theta), sn = std::sin(theta);
    auto f = [&](double w) {
        const double wn = std::pow(w, nu);
        return std::exp((w * s + wn) * c) * std::sin((w * s - wn) * sn + theta);
    };
    const double wmax = stable_w_max(nu, theta, s);
    std::vector<double> pts{0.0};
    for (int k = 40; k >= 0; --k) pts.push_back(wmax * std::ldexp(1.0, -k));
    AdaptiveOptions opt;
    opt.abs_tol = 1e-14;
    opt.rel_tol = 1e-9;
    opt.l1_tol = 1e-13;
    opt.max_intervals = 3000;
    opt.throw_on_failure = throw_on_failure;
    auto r = integrate_adaptive(f, pts, opt);
    r.value *= stable_density_normalization;
    r.error *= stable_density_normalization;
    r.l1 *= stable_density_normalization;
    return r;
}

}  // namespace detail

inline StableDensityParams::StableDensityParams(double nu_) : nu(nu_), theta(std::numbers::pi / (1.0 + nu_)), s1(0.0) {
    if (!(nu > 0.0 && nu < 1.0)) throw std::domain_error("stable density: nu must lie in (0,1)");
    // bisection in log s on the conditioning of the series
    double lo = std::log(1e-4), hi = std::log(1e4);
    if (detail::series_ok(detail::stable_series(nu, std::exp(lo)))) {
        s1 = std::exp(lo);
        return;
    }
    for (int i = 0; i < 50; ++i) {
        const double m = 0.5 * (lo + hi);
        (detail::series_ok(detail::stable_series(nu, std::exp(m))) ? hi : lo) = m;
    }
    s1 = std::exp(hi);
}

inline double stable_density_closed_half(double s) {
    return 0.5 / std::sqrt(std::numbers::pi) * std::pow(s, -1.5) * std::exp(-0.25 / s);
}

inline double stable_density(const StableDensityParams& p, double s) {
    if (!(s > 0.0)) throw std::domain_error("stable density: s must be > 0");
    if (p.nu == 0.5) return stable_density_closed_half(s);
    if (s >= p.s1) {
        auto v = detail::stable_series(p.nu, s);
        if (detail::series_ok(v)) return v.value;
    }
    return std::max(0.0, detail::stable_integral(p.nu, p.theta, s).value);
}

// int_0^infty e^{-xs} g_nu(s) ds; should equal exp(-x^nu)
inline double stable_laplace_check(const StableDensityParams& p, double x) {
    if (!(x >= 0.0)) throw std::domain_error("stable_laplace_check: x must be >= 0");
    AdaptiveOptions opt;
    opt.abs_tol = 1e-12;
    opt.rel_tol = 1e-10;
    auto inner = integrate_adaptive([&](double s) { return s > 0.0 ? std::exp(-x * s) * stable_density(p, s) : 0.0; },
                                    std::vector<double>{0.0, 0.05, 0.1, 0.2, 0.4, 0.7, 1.0}, opt);
    const double s_end = x > 0.0 ? std::min(40.0 / x, 1e15) : 1e15;
    const double u_end = std::log(std::max(s_end, 1.0));
    double outer = 0.0;
    if (u_end > 0.0) {
        std::vector<double> pts;
        for (double u = 0.0; u < u_end; u += 2.0) pts.push_back(u);
        pts.push_back(u_end);
        outer = integrate_adaptive(
                    [&](double u) {
                        const double s = std::exp(u);
                        return std::exp(-x * s) * stable_density(p, s) * s;
                    },
                    pts, opt)
                    .value;
    }
    // tail past s_end from the series integrated termwise (exact for x = 0)
    const double S = std::max(s_end, 1.0);
    double tail = 0.0;
    for (int k = 1; k <= 60; ++k) {
        const double c = std::exp(std::lgamma(p.nu * k + 1.0) - std::lgamma(k + 1.0)) *
                         std::sin(std::numbers::pi * p.nu * k) * ((k & 1) ? 1.0 : -1.0);
        const double t = c * std::pow(S, -p.nu * k) / (p.nu * k);
        tail += t;
        if (std::abs(t) < 1e-17) break;
    }
    tail *= std::numbers::inv_pi * std::exp(-x * S);
    return inner.value + outer + tail;
}

}  // namespace hardy
