#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "hardy/boxindex.hpp"
#include "hardy/profile.hpp"
#include "hardy/qmc.hpp"
#include "hardy/quadrature/adaptive.hpp"
#include "hardy/quadrature/spatial.hpp"
#include "hardy/quadrature/tgrid.hpp"

using namespace hardy;

TEST(Adaptive, KnownIntegrals) {
    EXPECT_NEAR(integrate_adaptive([](double x) { return std::exp(-x * x); }, -10.0, 10.0).value, std::sqrt(std::numbers::pi),
                1e-12);
    // endpoint singularity
    EXPECT_NEAR(integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0).value, 2.0, 1e-8);
    // kink placed as a breakpoint
    auto r = integrate_adaptive([](double x) { return std::abs(x - 0.3); }, std::vector<double>{0.0, 0.3, 1.0});
    EXPECT_NEAR(r.value, 0.5 * (0.09 + 0.49), 1e-14);
    EXPECT_TRUE(r.converged);
}

TEST(Adaptive, ThrowsWhenBudgetExhausted) {
    AdaptiveOptions o;
    o.max_intervals = 3;
    o.rel_tol = 1e-14;
    auto f = [](double x) { return std::sin(1.0 / x); };
    EXPECT_THROW(integrate_adaptive(f, 1e-4, 1.0, o), numerical_failure);
    o.throw_on_failure = false;
    EXPECT_FALSE(integrate_adaptive(f, 1e-4, 1.0, o).converged);
}

TEST(PairwiseSum, BeatsNaiveAccumulation) {
    std::vector<double> v(1 << 20, 0.1);
    EXPECT_NEAR(pairwise_sum(v), 0.1 * v.size(), 1e-9);
}

TEST(GradedEdges, GradingProperties) {
    const double ratio = 1.25, max_h = 0.5;
    auto e = graded_edges(-3.0, 7.0, {{0.0, 1e-3}, {2.0, 1e-2}}, ratio, max_h);
    ASSERT_GE(e.size(), 2u);
    EXPECT_EQ(e.front(), -3.0);
    EXPECT_EQ(e.back(), 7.0);
    EXPECT_TRUE(std::find(e.begin(), e.end(), 0.0) != e.end());
    EXPECT_TRUE(std::find(e.begin(), e.end(), 2.0) != e.end());
    for (size_t i = 1; i < e.size(); ++i) {
        const double h = e[i] - e[i - 1];
        EXPECT_GT(h, 0.0);
        EXPECT_LE(h, max_h * (1.0 + 1e-12) * 1.25);
    }
    // smallest cells sit next to the special point
    double hmin = 1e300;
    size_t at = 0;
    for (size_t i = 1; i < e.size(); ++i)
        if (e[i] - e[i - 1] < hmin) {
            hmin = e[i] - e[i - 1];
            at = i;
        }
    EXPECT_TRUE(e[at] == 0.0 || e[at - 1] == 0.0);
    EXPECT_LT(hmin, 2e-3);
}

TEST(TensorRule, ExactForQuadraticsAndConvergentForGaussians) {
    Box b{{0.0, -1.0}, {2.0, 1.0}};
    auto rule = box_rule(b, 8);
    auto r = integrate(rule, [](const double* x) { return x[0] * x[0] + 3.0 * x[1] * x[1] + x[0] * x[1]; });
    // int_0^2 int_-1^1 = 2*8/3 + 3*2*2/3
    EXPECT_NEAR(r.value, 16.0 / 3.0 + 4.0, 1e-12);
    auto g = integrate(box_rule(Box{{-8.0, -8.0}, {8.0, 8.0}}, 64),
                       [](const double* x) { return std::exp(-x[0] * x[0] - x[1] * x[1]); });
    EXPECT_NEAR(g.value, std::numbers::pi, 1e-6);
    // the estimate is conservative: it bounds the actual error
    EXPECT_GE(g.error, std::abs(g.value - std::numbers::pi));
    EXPECT_LT(g.error, 1e-2);
}

TEST(TensorRule, ExcludedBoxRemovesCells) {
    auto full = box_rule(Box{{0.0, 0.0}, {4.0, 4.0}}, 4);
    TensorRule holed({full.axis(0), full.axis(1)}, Box{{1.0, 1.0}, {3.0, 3.0}});
    EXPECT_NEAR(holed.volume(), 12.0, 1e-14);
    auto r = integrate(holed, [](const double*) { return 1.0; });
    EXPECT_NEAR(r.value, 12.0, 1e-13);
}

TEST(TGrid, PointsPerDecade) {
    TGrid g(1e-4, 1e2, 16);
    EXPECT_NEAR(g[0], 1e-4, 1e-18);
    EXPECT_NEAR(g[g.size() - 1], 1e2, 1e-10);
    EXPECT_NEAR(g.log_step(), std::log(10.0) / 16.0, 1e-12);
}

TEST(SupOverT, HeatOffDiagonalClosedForm) {
    // sup_t (4 pi t)^{-1/2} e^{-r^2/4t} = (2 pi e)^{-1/2} / r at t = r^2/2
    for (double r : {0.01, 0.3, 1.0, 7.0}) {
        TGrid g(1e-8, 1e4, 16);
        auto h = [r](double t) { return std::exp(-r * r / (4.0 * t)) / std::sqrt(4.0 * std::numbers::pi * t); };
        auto s = sup_over_t(h, g);
        const double exact = 1.0 / (std::sqrt(2.0 * std::numbers::pi * std::numbers::e) * r);
        EXPECT_LT(std::abs(s.value - exact) / exact, 1e-4) << r;
        EXPECT_NEAR(s.t_arg / (0.5 * r * r), 1.0, 1e-2);
    }
}

TEST(SupOverT, DiagonalIsAttainedAtTmin) {
    TGrid g(1e-6, 1.0, 12);
    auto s = sup_over_t([](double t) { return 1.0 / std::sqrt(4.0 * std::numbers::pi * t); }, g);
    EXPECT_NEAR(s.value, 1.0 / std::sqrt(4.0 * std::numbers::pi * 1e-6), 1e-9);
    EXPECT_TRUE(s.at_lower_end);
}

TEST(SupParabolic, RecoversLogQuadraticPeak) {
    TGrid g(1e-3, 1e3, 8);
    std::vector<double> v(g.size());
    const double c = std::log(0.37);
    for (size_t k = 0; k < g.size(); ++k) v[k] = std::exp(-std::pow(std::log(g[k]) - c, 2));
    auto s = sup_parabolic(g, v.data(), 0.0);
    EXPECT_NEAR(s.t_arg, 0.37, 0.37 * 0.02);
    EXPECT_NEAR(s.value, 1.0, 2e-3);
}

TEST(Sobol, PointsInUnitCubeAndEquidistributed) {
    auto p = sobol_points(3, 4096);
    std::vector<double> mean(3, 0.0);
    for (size_t i = 0; i < 4096; ++i)
        for (int j = 0; j < 3; ++j) {
            const double v = p[3 * i + j];
            ASSERT_GT(v, 0.0);
            ASSERT_LT(v, 1.0);
            mean[j] += v / 4096.0;
        }
    for (double m : mean) EXPECT_NEAR(m, 0.5, 1e-3);
    // skipping continues the sequence
    auto a = sobol_points(2, 10), b = sobol_points(2, 5, 5);
    for (size_t i = 0; i < 10; ++i) EXPECT_EQ(a[10 + i], b[i]);
}

TEST(BoxIndex, MatchesBruteForce) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 10.0), w(0.01, 2.0);
    std::vector<Box> boxes;
    for (int i = 0; i < 300; ++i) {
        Box b{{u(rng), u(rng)}, {0.0, 0.0}};
        b.hi = {b.lo[0] + w(rng), b.lo[1] + w(rng)};
        boxes.push_back(b);
    }
    BoxIndex idx(boxes);
    for (int q = 0; q < 200; ++q) {
        const double x[2] = {u(rng), u(rng)};
        std::set<size_t> got, want;
        idx.query_point(x, [&](size_t k) { got.insert(k); });
        for (size_t k = 0; k < boxes.size(); ++k)
            if (boxes[k].contains(x)) want.insert(k);
        EXPECT_EQ(got, want);
        Box qb{{x[0], x[1]}, {x[0] + 1.0, x[1] + 0.5}};
        got.clear();
        want.clear();
        idx.query_box(qb, [&](size_t k) { got.insert(k); });
        for (size_t k = 0; k < boxes.size(); ++k)
            if (boxes[k].intersects(qb)) want.insert(k);
        EXPECT_EQ(got, want);
    }
}
