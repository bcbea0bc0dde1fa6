#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "hardy/atoms.hpp"
#include "hardy/kernels.hpp"
#include "hardy/maximal.hpp"
#include "hardy/quadrature/adaptive.hpp"

using namespace hardy;

namespace {

double bump(const double* x, double c, double r) {
    const double s = (x[0] - c) * (x[0] - c) / (r * r);
    return s < 1.0 ? std::exp(-1.0 / (1.0 - s)) : 0.0;
}

}  // namespace

TEST(Atom, LocalAtomIsNormalised) {
    const auto X = DomainSpec::half_line();
    const Atom a = make_local_atom(Cuboid::interval(1.0, 2.0), X);
    EXPECT_TRUE(validate_atom(a, X, 1.05).pass);
    EXPECT_NEAR(a.values.l1(), 1.0, 1e-15);
    EXPECT_NEAR(a.values.integral(), 1.0, 1e-15);
}

TEST(Atom, RandomClassicalAtomsValidate) {
    const auto X = DomainSpec::half_line();
    for (int n = -3; n <= 3; ++n) {
        const Cuboid q = Cuboid::interval(std::ldexp(1.0, n), std::ldexp(2.0, n));
        for (uint64_t seed = 0; seed < 20; ++seed) {
            const Atom a = random_classical_atom(q, X, 1.05, seed, 64);
            const auto r = validate_atom(a, X, 1.05);
            EXPECT_TRUE(r.pass) << r.message;
            EXPECT_LE(r.size_ratio, 1.0);
            EXPECT_LT(r.cancellation, 1e-10);
        }
    }
}

TEST(Atom, SignAtomsSaturateTheSizeBound) {
    const auto X = DomainSpec::half_line();
    const Cuboid q = Cuboid::interval(2.0, 4.0);
    for (uint64_t seed = 0; seed < 10; ++seed) {
        const Atom a = random_sign_atom(q, X, 1.05, seed, 64);
        const auto r = validate_atom(a, X, 1.05);
        EXPECT_TRUE(r.pass) << r.message;
        EXPECT_NEAR(r.size_ratio, 1.0, 1e-12);
        EXPECT_NEAR(a.values.l1(), 1.0, 1e-12);
    }
}

TEST(Atom, ScaleCovariantGeneration) {
    const auto X = DomainSpec::half_line();
    const Atom a = random_classical_atom(Cuboid::interval(1.0, 2.0), X, 1.05, 42, 32);
    const Atom b = random_classical_atom(Cuboid::interval(4.0, 8.0), X, 1.05, 42, 32);
    EXPECT_NEAR(b.support.lo[0], 4.0 * a.support.lo[0], 1e-12);
    for (size_t i = 0; i < a.values.size(); ++i) EXPECT_NEAR(b.values.v[i], a.values.v[i] / 4.0, 1e-12);
}

TEST(Atom, ValidationCatchesViolations) {
    const auto X = DomainSpec::half_line();
    Atom a = random_classical_atom(Cuboid::interval(1.0, 2.0), X, 1.05, 1, 16);
    Atom biased = a;
    biased.values.v[0] += 0.1;
    EXPECT_FALSE(validate_atom(biased, X, 1.05).cancellation_ok);
    Atom big = a;
    for (double& v : big.values.v) v *= 2.0;
    EXPECT_FALSE(validate_atom(big, X, 1.05).size_ok);
    Atom away = a;
    away.support = Box{{5.0}, {5.5}};
    away.values.box = away.support;
    EXPECT_FALSE(validate_atom(away, X, 1.05).support_ok);
}

TEST(Atom, SerialisationRoundTrip) {
    const auto X = DomainSpec::half_line();
    const Atom a = random_classical_atom(Cuboid::interval(0.5, 1.0), X, 1.05, 9, 8);
    std::stringstream ss;
    write_atom(ss, a, -0.75);
    auto [b, coef] = read_atom(ss);
    EXPECT_EQ(coef, -0.75);
    EXPECT_EQ(b.kind, a.kind);
    EXPECT_EQ(b.values.v, a.values.v);
    EXPECT_EQ(b.support.lo, a.support.lo);
    EXPECT_EQ(b.host.half, a.host.half);
    std::stringstream bad("kind=weird\n");
    EXPECT_THROW(read_atom(bad), std::runtime_error);
}

TEST(Decompose, ConstantGivesSingleLocalTerm) {
    const auto X = DomainSpec::half_line();
    const Cuboid q = Cuboid::interval(1.0, 2.0);
    const Box s = enlarge(q, 1.05, 1).box(X);
    GridFunction f(s, {64}, 3.0);
    const auto d = local_decompose(f, q, X, 1.05, 5);
    ASSERT_EQ(d.terms.size(), 1u);
    EXPECT_EQ(d.terms[0].atom.kind, AtomKind::local);
    EXPECT_NEAR(d.sum_abs_lambda(), 3.0 * s.volume(), 1e-12);
    EXPECT_NEAR(d.residual_norm, 0.0, 1e-14);
}

TEST(Decompose, BumpRoundTrip) {
    const auto c = covering_bessel(-3, 3);
    const auto p = partition_of_unity(c);
    auto f = [](const double* x) { return bump(x, 1.5, 0.6); };
    double recon = 0.0, lam6 = 0.0, lam10 = 0.0;
    size_t pieces = 0;
    for (const auto& piece : localize(f, p, 1024)) {
        if (piece.fq.l1() == 0.0) continue;
        ++pieces;
        const auto d6 = local_decompose(piece.fq, c.cuboids[piece.index], c.domain, c.kappa, 6);
        const auto d10 = local_decompose(piece.fq, c.cuboids[piece.index], c.domain, c.kappa, 10);
        recon += d6.reconstruction_error + d10.reconstruction_error;
        lam6 += d6.sum_abs_lambda();
        lam10 += d10.sum_abs_lambda();
        for (const auto& t : d6.terms) EXPECT_TRUE(validate_atom(t.atom, c.domain, c.kappa).pass);
        EXPECT_LT(d10.residual_norm, d6.residual_norm);
    }
    EXPECT_EQ(pieces, 3u);
    EXPECT_LT(recon, 1e-10);
    EXPECT_LT(std::abs(lam6 - lam10) / lam10, 0.05);
}

TEST(Decompose, LocalisedPiecesKeepTheIntegral) {
    const auto c = covering_bessel(-3, 3);
    const auto p = partition_of_unity(c);
    auto f = [](const double* x) { return bump(x, 1.5, 0.6); };
    double s = 0.0;
    for (const auto& pc : localize(f, p, 1024)) s += pc.fq.integral();
    const auto ref = integrate_adaptive([&](double x) { return f(&x); }, 0.9, 2.1);
    EXPECT_NEAR(s, ref.value, 1e-6);
}

TEST(Decompose, Errors) {
    const auto X = DomainSpec::half_line();
    const Cuboid q = Cuboid::interval(1.0, 2.0);
    const Box s = enlarge(q, 1.05, 1).box(X);
    GridFunction f(s, {16}, 1.0);
    EXPECT_THROW(local_decompose(f, q, X, 1.05, 5), resolution_error);
    GridFunction outside(Box{{0.5}, {2.0}}, {16}, 1.0);
    EXPECT_THROW(local_decompose(outside, q, X, 1.05, 2), window_error);
}

TEST(ShellTail, GeometricSeriesIsExact) {
    const auto t = shell_tail(8.0, 4.0, 2.0);
    EXPECT_TRUE(t.bounded);
    EXPECT_DOUBLE_EQ(t.tail, 2.0);
    EXPECT_DOUBLE_EQ(t.error, 0.0);
    EXPECT_FALSE(shell_tail(1.0, 1.0, 1.0).bounded);
}

TEST(Maximal, LocalAtomAtLeastItsMass) {
    const auto k = make_bessel(1.0);
    const Atom a = make_local_atom(Cuboid::interval(1.0, 2.0), k->domain());
    const auto r = maximal_norm(*k, a);
    EXPECT_TRUE(r.tail_bounded);
    EXPECT_GE(r.value, 1.0);
    EXPECT_LT(r.value, 5.0);
}

TEST(Maximal, HeatClassicalAtomsScaleInvariant) {
    const auto k = make_heat(1);
    const auto X = DomainSpec::real_line();
    std::vector<double> v;
    for (int n = -2; n <= 2; ++n) {
        const Cuboid q = Cuboid::interval(std::ldexp(1.0, n), std::ldexp(2.0, n));
        const auto r = maximal_norm(*k, random_classical_atom(q, X, 1.05, 17, 64));
        EXPECT_TRUE(r.tail_bounded);
        EXPECT_GE(r.value, r.atom_l1 * (1.0 - 1e-3));
        v.push_back(r.value);
    }
    const double lo = *std::min_element(v.begin(), v.end()), hi = *std::max_element(v.begin(), v.end());
    EXPECT_LT((hi - lo) / hi, 0.25);
}

TEST(Maximal, HeatLocalAtomHasDivergentTail) {
    // sup_t H_t chi(x) ~ |x|^{-1}: the window integral is finite, the tail is not
    const auto k = make_heat(1);
    const auto r = maximal_norm(*k, make_local_atom(Cuboid::interval(1.0, 2.0), k->domain()));
    EXPECT_GE(r.window_value, 1.0);
    EXPECT_FALSE(r.tail_bounded);
}
