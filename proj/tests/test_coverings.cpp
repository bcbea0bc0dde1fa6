#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hardy/config.hpp"
#include "hardy/coverings.hpp"

using namespace hardy;

namespace {

size_t count(const std::string& s, const std::string& what) {
    size_t n = 0;
    for (size_t p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
    return n;
}

}  // namespace

TEST(Covering, BesselDyadicConstants) {
    const auto c = covering_bessel(-5, 5);
    EXPECT_EQ(c.size(), 11u);
    const auto r = validate_covering(c);
    EXPECT_TRUE(r.pass());
    EXPECT_DOUBLE_EQ(r.C1, 1.0);
    EXPECT_DOUBLE_EQ(r.C2, 2.0);
    EXPECT_LE(r.max_overlap, 4);
    for (size_t i = 0; i < c.size(); ++i) {
        const Box b = c.box(i);
        EXPECT_DOUBLE_EQ(b.lo[0], std::ldexp(1.0, -5 + static_cast<int>(i)));
        EXPECT_DOUBLE_EQ(b.hi[0], 2.0 * b.lo[0]);
    }
}

TEST(Covering, LaguerreMeasuredC2WithinNominal) {
    const auto c = covering_laguerre(-3, 3);
    const auto r = validate_covering(c);
    EXPECT_TRUE(r.pass());
    EXPECT_LE(r.C2, 4.0);
    // cuboids shrink toward infinity like 1/x
    double prev = inf;
    for (size_t i = 0; i < c.size(); ++i)
        if (c.cuboids[i].center[0] > 2.0) {
            EXPECT_LE(c.cuboids[i].diameter(), prev * (1.0 + 1e-12));
            prev = c.cuboids[i].diameter();
        }
}

TEST(Covering, UniformAndProducts) {
    EXPECT_TRUE(validate_covering(covering_uniform(DomainSpec::real_line(1), 1.0, Box{{-4.0}, {4.0}})).pass());
    EXPECT_TRUE(validate_covering(covering_uniform(DomainSpec::real_line(2), 0.5, Box{{-1.0, -1.0}, {1.0, 1.0}})).pass());
    for (const auto& c : {box_product(covering_bessel(-3, 3), covering_bessel(-3, 3)),
                          box_product(covering_bessel(-2, 2), covering_laguerre(-2, 2)),
                          strip_product(1, 16.0, covering_bessel(-2, 2))}) {
        const auto r = validate_covering(c, 4096);
        EXPECT_TRUE(r.pass()) << c.id << (r.violations.empty() ? "" : ": " + r.violations.front());
        EXPECT_LE(r.max_overlap, r.overlap_bound);
        EXPECT_LE(r.overlap_bound, 8);
        EXPECT_TRUE(r.neighbours);
    }
}

TEST(Covering, BoxProductPiecesAreComparable) {
    const auto c = box_product(covering_bessel(-3, 3), covering_bessel(-3, 3));
    for (const auto& q : c.cuboids) {
        const double ratio = std::max(q.half[0], q.half[1]) / std::min(q.half[0], q.half[1]);
        EXPECT_LE(ratio, 2.0 + 1e-12);
    }
}

TEST(Covering, DetectsGapsAndOverlaps) {
    const auto gap = build_covering("list(real,0:1,1.5:3)");
    const auto r = validate_covering(gap);
    EXPECT_FALSE(r.pass());
    EXPECT_FALSE(r.property1);
    ASSERT_FALSE(r.violations.empty());
    const auto overlap = build_covering("list(real,0:2,1:3)");
    EXPECT_FALSE(validate_covering(overlap).pass());
}

TEST(Covering, WidenKeepsFamily) {
    const auto c = covering_bessel(-1, 1);
    const auto w = widen(c, -3, 3);
    EXPECT_EQ(w.size(), 7u);
    EXPECT_EQ(w.kappa, c.kappa);
    const auto l = build_covering("list(real,0:1)");
    EXPECT_THROW(widen(l, 0, 1), std::invalid_argument);
}

TEST(Covering, BudgetErrorForExtremeRatios) {
    EXPECT_THROW(box_product(covering_bessel(-12, -12), covering_bessel(12, 12), 64), budget_error);
}

TEST(PartitionOfUnity, SumsToOneOnDenseGrid) {
    const auto c = covering_bessel(-5, 5);
    const auto p = partition_of_unity(c);
    const double a = std::ldexp(1.0, -5), b = std::ldexp(1.0, 6);
    double worst = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        // geometric grid: equal resolution on every dyadic scale
        const double x = a * std::pow(b / a, (i + 0.5) / n);
        worst = std::max(worst, std::abs(p.sum(&x) - 1.0));
    }
    EXPECT_LE(worst, 1e-12);
}

TEST(PartitionOfUnity, SupportAndNonnegativity) {
    const auto c = box_product(covering_bessel(-2, 2), covering_bessel(-2, 2));
    const auto p = partition_of_unity(c);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.3, 7.5);
    for (int i = 0; i < 2000; ++i) {
        const double x[2] = {u(rng), u(rng)};
        double s = 0.0;
        for (const auto& [k, v] : p.values(x)) {
            EXPECT_GE(v, 0.0);
            EXPECT_TRUE(c.box(k, 1).contains(x, 1e-12));
            s += v;
        }
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
}

TEST(PartitionOfUnity, DerivativeConstantScaleInvariant) {
    const auto c = covering_bessel(-5, 5);
    const auto p = partition_of_unity(c);
    // the outermost cuboids lack a neighbour on one side
    const double ref = p.derivative_constant(1);
    EXPECT_GT(ref, 0.0);
    for (size_t i = 2; i + 1 < c.size(); ++i) EXPECT_NEAR(p.derivative_constant(i), ref, 1e-9) << i;
}

TEST(PartitionOfUnity, DerivativeMatchesFiniteDifference) {
    const auto c = covering_bessel(-2, 2);
    const auto p = partition_of_unity(c);
    const double h = 1e-7;
    for (double x : {0.7, 1.01, 1.5, 2.03}) {
        for (size_t i = 0; i < c.size(); ++i) {
            const double xp = x + h, xm = x - h;
            const double fd = (p.value(i, &xp) - p.value(i, &xm)) / (2.0 * h);
            const double an = 0.5 * (p.partial(i, 0, &x, 1) + p.partial(i, 0, &x, -1));
            EXPECT_NEAR(fd, an, 1e-5 * (1.0 + std::abs(an))) << x << " " << i;
        }
    }
}

TEST(CoveringOutput, CsvAndSvg) {
    const auto c = box_product(covering_bessel(-1, 1), covering_bessel(-1, 1));
    std::ostringstream csv, svg;
    write_covering_csv(csv, c);
    write_covering_svg(svg, c, true);
    EXPECT_EQ(count(csv.str(), "\n"), c.size() + 1);
    EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "index,center0,center1,half0,half1,diameter");
    EXPECT_EQ(count(svg.str(), "<rect"), c.size());
    EXPECT_THROW(write_covering_svg(svg, covering_bessel(0, 1)), std::invalid_argument);
}

TEST(CoveringSpec, ParsesFamilies) {
    EXPECT_EQ(build_covering("bessel(-2,2)").size(), 5u);
    EXPECT_EQ(build_covering("box(bessel(-1,1),laguerre(-1,1))").dim(), 2);
    EXPECT_EQ(build_covering("strip(1,16,bessel(-2,2))").dim(), 2);
    EXPECT_EQ(build_covering("uniform(1,-2:2)").size(), 4u);
    EXPECT_EQ(build_covering(covering_shorthand("bessel-box", "-3..3")).id, "(bessel[-3..3])x(bessel[-3..3])");
    EXPECT_THROW(build_covering("uniform(1,2:-2)"), config_error);
    EXPECT_THROW(covering_shorthand("bessel", "-3,3"), config_error);
    const auto s = parse_spec(" box ( bessel(-1, 1) , laguerre(0,2) ) ");
    EXPECT_EQ(s.str(), "box(bessel(-1,1),laguerre(0,2))");
}
