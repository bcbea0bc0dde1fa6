#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "hardy/config.hpp"
#include "hardy/kernels.hpp"
#include "hardy/quadrature/adaptive.hpp"

using namespace hardy;

namespace {

constexpr double pi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
double v1(const Kernel& k, double t, double x, double y) { return eval(k, t, std::vector<double>{x}, std::vector<double>{y}); }

double heat1(double t, double r) { return std::exp(-r * r / (4.0 * t)) / std::sqrt(4.0 * pi * t); }

double bessel_oracle(double beta, double t, double x, double y) {
    const double z = x * y / (2.0 * t);
    return std::sqrt(x * y) / (2.0 * t) * boost::math::cyl_bessel_i(beta - 0.5, z) * std::exp(-(x * x + y * y) / (4.0 * t));
}

// eigenfunction expansion with generalized Laguerre polynomials in x^2
double laguerre_series(double a, double t, double x, double y, int terms = 200) {
    auto phi = [&](double u, std::vector<double>& out) {
        const double X = u * u;
        double l0 = 1.0, l1 = 1.0 + a - X;
        out.resize(terms);
        for (int n = 0; n < terms; ++n) {
            const double L = n == 0 ? l0 : l1;
            if (n >= 1) {
                const double l2 = ((2.0 * n + 1.0 + a - X) * l1 - (n + a) * l0) / (n + 1.0);
                l0 = l1;
                l1 = l2;
            }
            const double norm = std::exp(0.5 * (std::log(2.0) + std::lgamma(n + 1.0) - std::lgamma(n + a + 1.0)));
            out[n] = norm * L * std::pow(u, a + 0.5) * std::exp(-0.5 * X);
        }
    };
    std::vector<double> px, py;
    phi(x, px);
    phi(y, py);
    double s = 0.0;
    for (int n = 0; n < terms; ++n) s += std::exp(-t * (4.0 * n + 2.0 * a + 2.0)) * px[n] * py[n];
    return s;
}

double mehler(double t, double x, double y) {
    const double s = std::sinh(2.0 * t), c = std::cosh(2.0 * t);
    return std::exp(-((x * x + y * y) * c - 2.0 * x * y) / (2.0 * s)) / std::sqrt(2.0 * pi * s);
}

}  // namespace

TEST(Heat, DiagonalValue) {
    EXPECT_NEAR(v1(*make_heat(1), 1.0, 0.0, 0.0), 0.2820948, 1e-7);
    const auto h2 = make_heat(2);
    EXPECT_NEAR(eval(*h2, 0.5, {0.3, -0.2}, {1.0, 0.4}), heat1(0.5, 0.7) * heat1(0.5, 0.6), 1e-15);
}

TEST(Heat, FullMassIsOne) {
    const auto h = make_heat(1);
    for (double t : {1e-6, 1e-2, 1.0, 1e3}) {
        const double x = 0.3;
        EXPECT_NEAR(mass(*h, t, std::vector<double>{x}, inf), 1.0, 1e-8);
    }
}

TEST(Bessel, BetaOneImageForm) {
    const auto k = make_bessel(1.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double t = std::pow(10.0, -4.0 + 5.0 * u(rng));
        const double x = 0.01 + 19.99 * u(rng), y = 0.01 + 19.99 * u(rng);
        const double ref = heat1(t, x - y) - heat1(t, x + y);
        if (ref < 1e-280) continue;
        EXPECT_LT(rel(v1(*k, t, x, y), ref), 1e-10) << t << " " << x << " " << y;
    }
}

TEST(Bessel, MatchesBoostOracleForGeneralBeta) {
    for (double beta : {0.25, 0.5, 2.0, 3.3}) {
        const auto k = make_bessel(beta);
        for (double t : {1e-2, 0.3, 4.0})
            for (double x : {0.05, 0.8, 3.0})
                for (double y : {0.1, 1.1, 2.5}) {
                    const double ref = bessel_oracle(beta, t, x, y);
                    if (ref < 1e-250) continue;
                    EXPECT_LT(rel(v1(*k, t, x, y), ref), 1e-10) << beta << " " << t << " " << x << " " << y;
                }
    }
}

TEST(Bessel, ChapmanKolmogorov) {
    const auto k = make_bessel(2.0);
    const double s = 0.3, t = 0.7, x = 0.9, y = 1.6;
    auto r = integrate_adaptive([&](double z) { return z > 0.0 ? v1(*k, s, x, z) * v1(*k, t, z, y) : 0.0; },
                                std::vector<double>{0.0, 1.0, 3.0, 30.0});
    EXPECT_LT(rel(r.value, v1(*k, s + t, x, y)), 1e-9);
}

TEST(Bessel, SubMarkovianAndSymmetric) {
    // the potential (beta^2 - beta)/x^2 is nonnegative only for beta >= 1
    for (double beta : {1.0, 2.0, 3.3}) {
        const auto k = make_bessel(beta);
        for (double x : {0.01, 0.5, 3.0})
            for (double t : {1e-3, 0.1, 10.0}) {
                const double m = mass(*k, t, std::vector<double>{x}, inf);
                EXPECT_LE(m, 1.0 + 1e-9);
                EXPECT_GE(m, 0.0);
                EXPECT_NEAR(v1(*k, t, x, 1.3), v1(*k, t, 1.3, x), 1e-14 * v1(*k, t, x, 1.3));
            }
    }
}

TEST(Bessel, HalfMassMatchesOracleIntegral) {
    const auto k = make_bessel(0.5);
    for (double x : {0.5, 1.5})
        for (double t : {0.02, 0.1}) {
            const double w = 40.0 * std::sqrt(t);
            auto r = integrate_adaptive([&](double y) { return y > 0.0 ? bessel_oracle(0.5, t, x, y) : 0.0; },
                                        std::vector<double>{std::max(0.0, x - w), x, x + w});
            EXPECT_LT(rel(mass(*k, t, std::vector<double>{x}, inf), r.value), 1e-7) << x << " " << t;
        }
}

TEST(Laguerre, MatchesEigenfunctionExpansion) {
    for (double a : {-0.3, 0.5, 1.0, 2.5}) {
        const auto k = make_laguerre(a);
        for (double t : {0.2, 0.6, 2.0})
            for (double x : {0.3, 1.0, 2.2})
                for (double y : {0.5, 1.4}) {
                    const double ref = laguerre_series(a, t, x, y);
                    EXPECT_LT(rel(v1(*k, t, x, y), ref), 1e-9) << a << " " << t << " " << x << " " << y;
                }
    }
}

TEST(Laguerre, SmallTimeMatchesHeat) {
    const auto k = make_laguerre(0.5);
    EXPECT_LT(rel(v1(*k, 1e-3, 1.0, 1.0), heat1(1e-3, 0.0)), 0.05);
}

TEST(Laguerre, LogValueFiniteWhereValueUnderflows) {
    const auto& k = static_cast<const LaguerreKernel&>(*make_laguerre(1.0));
    const double lv = k.log_value(500.0, 9.0, 8.0);
    EXPECT_TRUE(std::isfinite(lv));
    EXPECT_LT(lv, -700.0);
    // ground state e^{-t(2 alpha + 2)} phi_0(x) phi_0(y) dominates for large t
    auto phi = [](double u) { return std::sqrt(2.0) * u * std::sqrt(u) * std::exp(-0.5 * u * u); };
    const double phi0 = phi(9.0) * phi(8.0);
    EXPECT_NEAR(lv, -500.0 * 4.0 + std::log(phi0), 1e-8);
}

TEST(Subordinate, HalfOfHeatIsPoisson) {
    const auto k = make_subordinate(make_heat(1), 0.5);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double t = std::pow(10.0, -2.0 + 3.0 * u(rng)), x = 10.0 * u(rng) - 5.0, y = 10.0 * u(rng) - 5.0;
        const double p = t / (pi * (t * t + (x - y) * (x - y)));
        // the library time s gives K at s^nu
        EXPECT_LT(rel(v1(*k, t * t, x, y), p), 1e-6);
    }
}

TEST(Subordinate, ConsistentWithStableComparison) {
    for (double nu : {0.3, 0.7}) {
        const auto k = make_subordinate(make_heat(1), nu);
        for (double t : {0.05, 1.0, 20.0})
            for (double r : {0.0, 0.4, 3.0}) {
                const double a = v1(*k, t, 0.2, 0.2 + r);
                const double b = comparison_eval(*k, t, std::vector<double>{0.2}, std::vector<double>{0.2 + r});
                EXPECT_LT(rel(a, b), 1e-5) << nu << " " << t << " " << r;
            }
    }
}

TEST(Subordinate, OfBesselStaysBelowBase) {
    // both are sub-Markovian; subordination preserves total mass below one
    const auto k = make_subordinate(make_bessel(1.0), 0.5);
    for (double x : {0.2, 2.0}) EXPECT_LE(mass(*k, 1.0, std::vector<double>{x}, inf), 1.0 + 1e-6);
}

TEST(Product, FactorsMultiply) {
    const auto k = make_product({make_bessel(1.0), make_laguerre(0.5)});
    EXPECT_EQ(k->dim(), 2);
    const double t = 0.4;
    const double a = eval(*k, t, {0.7, 1.2}, {1.1, 0.9});
    EXPECT_LT(rel(a, v1(*make_bessel(1.0), t, 0.7, 1.1) * v1(*make_laguerre(0.5), t, 1.2, 0.9)), 1e-14);
    EXPECT_EQ(k->factors().size(), 2u);
}

TEST(Schrodinger, FreeMatchesHeat) {
    const auto k = schrodinger_build(Potential::zero(), 20.0, 2000);
    EXPECT_LT(rel(v1(*k, 0.5, 0.0, 0.0), heat1(0.5, 0.0)), 1e-3);
}

TEST(Schrodinger, HarmonicMatchesMehlerOnGrid) {
    const auto k = schrodinger_build(Potential::harmonic(), 20.0, 2000);
    for (double t : {0.1, 0.5, 2.0})
        for (int i : {900, 1000, 1100})
            for (int j : {950, 1000, 1040, 1150}) {
                const double x = k->node(i), y = k->node(j);
                const double ref = mehler(t, x, y);
                // relative accuracy of the difference scheme is a bulk property
                if (ref < 1e-3 * mehler(t, x, x)) continue;
                EXPECT_LT(rel(k->grid_value(t, i, j), ref), 1e-3) << t << " " << x << " " << y;
            }
}

TEST(Schrodinger, ExtrapolatedBuildIsAccurateOffDiagonal) {
    const auto k = schrodinger_build(Potential::harmonic(), 10.0, 1000, true);
    EXPECT_TRUE(k->extrapolated());
    double worst = 0.0, plain = 0.0;
    for (double t : {0.1, 1.0})
        for (int i = 400; i <= 600; i += 20)
            for (int j = 400; j <= 600; j += 10) {
                const double x = k->node(i), y = k->node(j), ref = mehler(t, x, y);
                if (ref < 1e-3 * mehler(t, x, x)) continue;
                worst = std::max(worst, rel(k->grid_value(t, i, j), ref));
                plain = std::max(plain, rel(k->plain_value(t, i, j), ref));
            }
    EXPECT_LT(worst, 1e-4);
    EXPECT_GT(plain, 10.0 * worst);
    EXPECT_NEAR(k->mass(1.0, std::vector<double>{0.0}.data(), inf), integrate_adaptive([&](double y) {
                    const double x = 0.0;
                    return mehler(1.0, x, y);
                }, -10.0, 10.0).value, 1e-4);
}

TEST(Schrodinger, ConstantPotentialDampsByExpMinusCt) {
    const auto f = schrodinger_build(Potential::zero(), 10.0, 800);
    const auto c = schrodinger_build(Potential::constant(1.5), 10.0, 800);
    for (double t : {0.1, 1.0, 3.0}) EXPECT_LT(rel(c->grid_value(t, 400, 410), std::exp(-1.5 * t) * f->grid_value(t, 400, 410)), 1e-9);
}

TEST(CheckedEval, RejectsBadArguments) {
    const auto k = make_bessel(1.0);
    EXPECT_THROW(v1(*k, 0.0, 1.0, 1.0), std::domain_error);
    EXPECT_THROW(v1(*k, 1.0, -1.0, 1.0), std::domain_error);
    EXPECT_THROW(eval(*k, 1.0, {1.0, 2.0}, {1.0, 2.0}), std::invalid_argument);
    const auto s = schrodinger_build(Potential::zero(), 4.0, 100);
    EXPECT_THROW(v1(*s, 2.0, 0.0, 0.0), std::domain_error);  // beyond t_max = L^2/16
    EXPECT_THROW(make_bessel(0.0), std::domain_error);
    EXPECT_THROW(make_laguerre(-0.5), std::domain_error);
}

TEST(KernelSpec, BuildsEveryFamily) {
    EXPECT_EQ(build_kernel("heat")->kind(), KernelKind::heat);
    EXPECT_EQ(build_kernel("heat(2)")->dim(), 2);
    EXPECT_EQ(build_kernel("stable(0.5)")->kind(), KernelKind::stable);
    EXPECT_EQ(build_kernel("bessel(1)")->kind(), KernelKind::bessel);
    EXPECT_EQ(build_kernel("laguerre(0.5)")->kind(), KernelKind::laguerre);
    EXPECT_EQ(build_kernel("subordinate(bessel(1), 0.5)")->kind(), KernelKind::subordinate);
    EXPECT_EQ(build_kernel("product(bessel(1), laguerre(1))")->dim(), 2);
    EXPECT_EQ(build_kernel("schrodinger(constant:1, 10, 400)")->kind(), KernelKind::schrodinger);
    EXPECT_THROW(build_kernel("bessel(-1)"), config_error);
    EXPECT_THROW(build_kernel("subordinate(heat, 1.5)"), config_error);
    EXPECT_THROW(build_kernel("laguerre(-0.7)"), config_error);
    EXPECT_THROW(build_kernel("wave(1)"), config_error);
    EXPECT_THROW(build_kernel("bessel(1"), config_error);
}
