#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "hardy/verifier.hpp"

using namespace hardy;

namespace {

VerifyOptions quick() {
    VerifyOptions o;
    o.y_random = 2;
    return o;
}

}  // namespace

TEST(Verifier, HeatGaussianConstant) {
    const auto k = make_heat(1);
    const auto c = covering_uniform(DomainSpec::real_line(1), 1.0, Box{{-2.0}, {2.0}});
    const auto r = verify_A0(*k, c, quick());
    ASSERT_EQ(r.size(), 1u);
    EXPECT_NEAR(r[0].sup_constant, 1.0 / std::sqrt(4.0 * std::numbers::pi), 1e-3);
    EXPECT_EQ(r[0].get("c"), "4");
}

TEST(Verifier, BesselA1primeFiniteAndScaleInvariant) {
    const auto k = make_bessel(1.0);
    const auto c = covering_bessel(-2, 2);
    const auto r = verify_A1prime(*k, c, quick());
    EXPECT_TRUE(r.finite());
    EXPECT_TRUE(r.within_budget(0.05));
    EXPECT_LT(r.variation(), 0.2);
    EXPECT_EQ(r.per_cuboid.size(), c.size());
}

TEST(Verifier, HeatA1primeDivergesOnUniformCovering) {
    // sup_t H_t(x, y) = (2 pi e)^{-1/2} / |x - y| is not integrable at infinity
    const auto k = make_heat(1);
    const auto c = covering_uniform(DomainSpec::real_line(1), 1.0, Box{{-1.0}, {1.0}});
    EXPECT_FALSE(verify_A1prime(*k, c, quick()).finite());
}

TEST(Verifier, HeatAgainstItselfHasNoRemainder) {
    // comparison of the heat kernel is the heat kernel
    const auto k = make_heat(1);
    const auto c = covering_uniform(DomainSpec::real_line(1), 1.0, Box{{-1.0}, {1.0}});
    const auto r = verify_A2prime(*k, c, quick());
    EXPECT_TRUE(r.finite());
    EXPECT_LT(r.sup_constant, 1e-12);
}

TEST(Verifier, A3StableUnderRefinement) {
    const auto k = make_heat(1);
    const auto c = covering_uniform(DomainSpec::real_line(1), 1.0, Box{{-1.0}, {1.0}});
    auto o = quick();
    const double a = verify_a3(*k, c, o).sup_constant;
    o.ppd = 24;
    const double b = verify_a3(*k, c, o).sup_constant;
    EXPECT_GT(a, 0.0);
    EXPECT_NEAR(a, b, 1e-3 * b);
}

TEST(Verifier, ThreadCountDoesNotChangeResults) {
    const auto k = make_bessel(2.0);
    const auto c = covering_bessel(-2, 2);
    auto o = quick();
    const auto a = verify_A1prime(*k, c, o);
    o.threads = 3;
    const auto b = verify_A1prime(*k, c, o);
    ASSERT_EQ(a.per_cuboid.size(), b.per_cuboid.size());
    for (size_t i = 0; i < a.per_cuboid.size(); ++i) {
        EXPECT_EQ(a.per_cuboid[i].constant, b.per_cuboid[i].constant);
        EXPECT_EQ(a.per_cuboid[i].error, b.per_cuboid[i].error);
    }
}

TEST(Verifier, ReportOutputs) {
    const auto k = make_bessel(1.0);
    const auto c = covering_bessel(-1, 1);
    const auto r = verify_a3(*k, c, quick());
    std::ostringstream csv, txt;
    write_report_csv(csv, r);
    write_report_text(txt, r);
    EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "condition,cuboid_index,constant,error,params_hash");
    EXPECT_NE(txt.str().find("semantics = bounded over the probed window"), std::string::npos);
    EXPECT_NE(txt.str().find("param.ppd = 16"), std::string::npos);
    EXPECT_EQ(params_hash(r.params), params_hash(verify_a3(*k, c, quick()).params));
    auto p = r.params;
    p.back().second += "x";
    EXPECT_NE(params_hash(p), params_hash(r.params));
}

TEST(Schrodinger, PositivePotentialDecays) {
    const auto k = schrodinger_build(Potential::constant(1.0));
    const auto c = covering_uniform(DomainSpec::real_line(1), 1.0, Box{{-2.0}, {2.0}});
    const auto d = verify_schrodinger_D(*k, c, 2.0, quick());
    EXPECT_TRUE(d.target_met);
    EXPECT_GE(std::stod(d.get("rho_min")), 2.0);
    const auto s = verify_schrodinger_K(*k, c, 0.9, quick());
    EXPECT_TRUE(s.target_met);
    for (const auto& e : s.per_cuboid) EXPECT_NEAR(e.constant, 1.0, 0.1);
}

TEST(Schrodinger, ZeroPotentialFailsDecay) {
    const auto k = schrodinger_build(Potential::zero());
    const auto c = covering_uniform(DomainSpec::real_line(1), 1.0, Box{{-2.0}, {2.0}});
    const auto d = verify_schrodinger_D(*k, c, 2.0, quick());
    EXPECT_FALSE(d.target_met);
    EXPECT_NEAR(std::stod(d.get("rho_min")), 1.0, 0.05);
    // K holds vacuously where V vanishes
    const auto s = verify_schrodinger_K(*k, c, 0.9, quick());
    EXPECT_TRUE(s.target_met);
    EXPECT_TRUE(std::isnan(s.per_cuboid[0].constant));
}

TEST(Limits, HoldForHeatBesselLaguerre) {
    for (const auto& k : {make_heat(1), make_bessel(1.0), make_laguerre(0.5)}) {
        const auto r = verify_smalltime_limits(*k, {0.5, 1.0, 2.0}, {0.1, 0.5});
        EXPECT_TRUE(r.pass()) << k->id();
        EXPECT_EQ(r.probes.size(), 3u * 2u * 5u);
    }
    // inner mass converges monotonically toward 1 for the heat kernel
    const auto r = verify_smalltime_limits(*make_heat(1), {0.0}, {0.1});
    for (size_t i = 1; i < r.probes.size(); ++i) EXPECT_GE(r.probes[i].inner, r.probes[i - 1].inner - 1e-15);
}

TEST(Envelope, LaguerreFitGeneralises) {
    const auto k = make_laguerre(0.5);
    const auto r = verify_laguerre_envelope(static_cast<const LaguerreKernel&>(*k), 2000);
    EXPECT_TRUE(std::isfinite(r.C));
    EXPECT_GT(r.c, 0.0);
    EXPECT_LE(r.max_violation, 1.0 + 1e-12);
    EXPECT_LE(r.fresh_violation, 2.0);
    EXPECT_GT(r.branch_power, 0u);
    EXPECT_GT(r.branch_one, 0u);
}

TEST(Verifier, RejectsUnsupportedInputs) {
    const auto c = covering_bessel(-1, 1);
    EXPECT_THROW(verify_A0(*make_subordinate(make_bessel(1.0), 0.5), c), std::invalid_argument);
    EXPECT_THROW(verify_smalltime_limits(*make_heat(2), {0.0}, {0.1}), std::invalid_argument);
}
