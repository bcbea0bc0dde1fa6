#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "hardy/quadrature/adaptive.hpp"
#include "hardy/specfun.hpp"
#include "hardy/subordination.hpp"

using namespace hardy;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// one-sided stable densities with Laplace transform e^{-x^nu}, in closed form
double g_half(double s) { return 0.5 / std::sqrt(std::numbers::pi) * std::pow(s, -1.5) * std::exp(-0.25 / s); }
double g_third(double s) {
    return 1.0 / (3.0 * std::numbers::pi) * std::pow(s, -1.5) *
           boost::math::cyl_bessel_k(1.0 / 3.0, 2.0 / (std::sqrt(27.0) * std::sqrt(s)));
}

}  // namespace

TEST(BesselI, MatchesBoostAcrossOrdersAndArguments) {
    for (double tau : {-0.4, 0.0, 0.5, 1.0, 1.5, 3.7, 9.0}) {
        for (double z = 1e-3; z < 600.0; z *= 1.7) {
            const double ref = boost::math::cyl_bessel_i(tau, z) * std::exp(-z);
            EXPECT_LT(rel(bessel_i_scaled(tau, z), ref), 1e-11) << "tau=" << tau << " z=" << z;
        }
    }
}

TEST(BesselI, HalfOrderClosedForm) {
    // e^{-z} I_{1/2}(z) = (1 - e^{-2z}) / sqrt(2 pi z)
    for (double z : {1e-6, 1e-2, 0.7, 5.0, 29.0, 31.0, 400.0, 1e5}) {
        const double ref = -std::expm1(-2.0 * z) / std::sqrt(2.0 * std::numbers::pi * z);
        EXPECT_LT(rel(bessel_i_scaled(0.5, z), ref), 1e-12) << z;
    }
}

TEST(BesselI, ContinuousAcrossCrossover) {
    for (double tau : {0.0, 0.5, 2.0, 7.5}) {
        const double zc = bessel_crossover(tau);
        const double below = bessel_i_scaled(tau, zc * (1.0 - 1e-12));
        const double above = bessel_i_scaled(tau, zc * (1.0 + 1e-12));
        EXPECT_LT(rel(below, above), 1e-10) << tau;
    }
}

TEST(BesselI, LogScaledStaysFiniteFarOut) {
    const double z = 1e8;
    const double l = log_bessel_i_scaled(1.0, z);
    EXPECT_TRUE(std::isfinite(l));
    EXPECT_NEAR(l, -0.5 * std::log(2.0 * std::numbers::pi * z), 1e-7);
    EXPECT_THROW(bessel_i_unscaled(0.0, 800.0), std::overflow_error);
    const auto v = bessel_i(0.0, 800.0);
    EXPECT_TRUE(v.scaled);
}

TEST(StableDensity, HalfMatchesLevyDensity) {
    StableDensityParams p(0.5);
    for (double s = 1e-3; s < 1e3; s *= 1.37) EXPECT_LT(rel(stable_density(p, s), g_half(s)), 1e-8) << s;
}

TEST(StableDensity, ThirdMatchesBesselKForm) {
    StableDensityParams p(1.0 / 3.0);
    for (double s = 1e-3; s < 1e3; s *= 1.37) EXPECT_LT(rel(stable_density(p, s), g_third(s)), 1e-7) << s;
}

TEST(StableDensity, UnitMassForSeveralNu) {
    for (double nu : {0.3, 0.5, 0.7, 0.9}) {
        StableDensityParams p(nu);
        // in log s the integrand s g(s) is smooth with light tails on both ends
        auto r = integrate_adaptive([&](double c) { return std::exp(c) * stable_density(p, std::exp(c)); },
                                    std::vector<double>{-40.0, -5.0, 0.0, 5.0, 60.0});
        EXPECT_NEAR(r.value, 1.0, 1e-6) << nu;
    }
}

TEST(StableDensity, LaplaceTransformProperty) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 12; ++i) {
        const double nu = 0.15 + 0.8 * u(rng), x = std::pow(10.0, -1.0 + 2.0 * u(rng));
        EXPECT_NEAR(stable_laplace_check(StableDensityParams(nu), x), std::exp(-std::pow(x, nu)), 1e-6)
            << nu << " " << x;
    }
    EXPECT_THROW(stable_laplace_check(StableDensityParams(0.5), -1.0), std::domain_error);
}

TEST(StableDensity, SGBoundedAndContinuousAtBranchSwitch) {
    for (double nu : {0.3, 0.5, 0.7, 0.9}) {
        StableDensityParams p(nu);
        double m = 0.0;
        for (double s = 1e-3; s < 1e3; s *= 1.05) m = std::max(m, s * stable_density(p, s));
        EXPECT_TRUE(std::isfinite(m));
        EXPECT_LT(m, 10.0);
        if (nu == 0.5) EXPECT_NEAR(m, std::sqrt(0.5 / std::numbers::pi) * std::exp(-0.5), 1e-3);
        if (p.s1 > 0.0) {
            const double a = stable_density(p, p.s1 * (1.0 - 1e-9)), b = stable_density(p, p.s1 * (1.0 + 1e-9));
            EXPECT_LT(rel(a, b), 1e-6) << nu;
        }
    }
}

TEST(Subordinator, IntegratesAgainstDensity) {
    Subordinator sub(0.5);
    // int e^{-s} g(s) ds = e^{-1}
    auto r = sub.integrate([](double s) { return std::exp(-s); }, 1.0);
    EXPECT_NEAR(r.value, std::exp(-1.0), 1e-8);
}
