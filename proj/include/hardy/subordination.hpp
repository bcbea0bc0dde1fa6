#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "hardy/quadrature/adaptive.hpp"
#include "hardy/specfun.hpp"

namespace hardy {

// Averaging against g_nu: int_0^infty f(s) g_nu(s) ds.
class Subordinator {
public:
    explicit Subordinator(double nu) : p_(nu) {
        const double a = nu / (1.0 - nu);
        // g_nu(s) ~ exp(-(1-nu) nu^{a} s^{-a}) as s -> 0; below s_lo the density is under e^{-700}
        s_lo_ = std::pow((1.0 - nu) * std::pow(nu, a) / 700.0, 1.0 / a);
        if (nu != 0.5 && s_lo_ < p_.s1) {
            const double u0 = std::log(s_lo_), u1 = std::log(p_.s1);
            const double h = 0.005;
            const int n = static_cast<int>(std::ceil((u1 - u0) / h)) + 1;
            std::vector<double> lg(n);
            for (int i = 0; i < n; ++i) {
                const double g = stable_density(p_, std::exp(u0 + i * h));
                lg[i] = std::log(std::max(g, 1e-320));
            }
            spline_ = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(lg.begin(), lg.end(),
                                                                                                     u0, h);
            u_spline_end_ = u0 + (n - 1) * h;
        }
    }

    double nu() const { return p_.nu; }
    const StableDensityParams& params() const { return p_; }
    double s_lo() const { return s_lo_; }

    double density(double s) const {
        if (s <= 0.0) return 0.0;
        if (p_.nu == 0.5) return stable_density_closed_half(s);
        if (s < s_lo_) return 0.0;
        if (spline_ && s < p_.s1) {
            const double u = std::min(std::log(s), u_spline_end_);
            return std::exp((*spline_)(u));
        }
        return stable_density(p_, s);
    }

    // g(e^c) e^c, the weight in logarithmic time
    double log_weight(double c) const { return density(std::exp(c)) * std::exp(c); }

    // int_0^infty f(s) g(s) ds for f >= 0 that is nonincreasing once s > s_settle
    template <class F>
    QuadResult integrate(F&& f, double s_settle, double rel_tol = 1e-10, double s_peak = -1.0) const {
        AdaptiveOptions opt;
        opt.rel_tol = rel_tol;
        opt.l1_tol = 1e-14;
        opt.abs_tol = 1e-300;
        opt.max_intervals = 4000;
        QuadResult total;
        const double lo = std::max(s_lo_, 1e-300);
        if (lo < 1.0) {
            std::vector<double> pts{lo, 1.0};
            for (double s = 0.5; s > lo; s *= 0.25) pts.push_back(s);
            if (s_peak > lo && s_peak < 1.0) pts.push_back(s_peak);
            auto in = integrate_adaptive([&](double s) { return f(s) * density(s); }, pts, opt);
            total.value += in.value;
            total.error += in.error;
            total.intervals += in.intervals;
        }
        const double u_settle = std::log(std::max(s_settle, 1.0));
        const double u_peak = s_peak > 1.0 ? std::log(s_peak) : -1.0;
        auto h = [&](double u) {
            const double s = std::exp(u);
            return f(s) * density(s) * s;
        };
        for (double u = std::max(0.0, std::log(lo)); u < 740.0; u += 1.0) {
            std::vector<double> pts{u, u + 1.0};
            if (u_peak > u && u_peak < u + 1.0) pts.push_back(u_peak);
            auto c = integrate_adaptive(h, pts, opt);
            total.value += c.value;
            total.error += c.error;
            total.intervals += c.intervals;
            if (u + 1.0 >= u_settle) {
                // beyond settling the integrand decays at least like e^{-nu u}
                const double tail = h(u + 1.0) / p_.nu;
                if (tail <= 0.1 * rel_tol * total.value || (total.value == 0.0 && tail == 0.0)) {
                    total.error += tail;
                    break;
                }
            }
        }
        return total;
    }

private:
    StableDensityParams p_;
    double s_lo_ = 0.0;
    double u_spline_end_ = 0.0;
    std::shared_ptr<boost::math::interpolators::cardinal_cubic_b_spline<double>> spline_;
};

}  // namespace hardy
