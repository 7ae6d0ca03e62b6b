#include <gtest/gtest.h>

#include <random>

#include "canform/algorithms.hpp"
#include "canform/canonical.hpp"
#include "canform/ratfun.hpp"
#include "oracles.hpp"

using namespace canform;

namespace {

LambdaPoly lp(std::initializer_list<Rational> c) { return LambdaPoly(std::vector<Rational>(c)); }
BivarPoly bp(std::initializer_list<LambdaPoly> c) { return BivarPoly(std::vector<LambdaPoly>(c)); }
BivarPoly zc(std::initializer_list<Rational> c) {
    std::vector<LambdaPoly> out;
    for (const auto& v : c) out.push_back(lambda_const(v));
    return BivarPoly(std::move(out));
}

BivarPoly random_bivar(std::mt19937_64& rng, int zdeg, int ldeg) {
    std::vector<LambdaPoly> coeffs;
    for (int i = 0; i <= zdeg; ++i) {
        std::vector<Rational> c;
        for (int j = 0; j <= ldeg; ++j) c.push_back(oracle::random_rational(rng, 4, 3));
        coeffs.emplace_back(std::move(c));
    }
    return BivarPoly(std::move(coeffs));
}

}  // namespace

TEST(Rational, ParsesAndNormalizes) {
    EXPECT_EQ(to_string(parse_rational("4/6")), "2/3");
    EXPECT_EQ(to_string(parse_rational(" -3 ")), "-3");
    EXPECT_EQ(to_string(parse_rational("0/5")), "0");
    EXPECT_EQ(boost::multiprecision::denominator(parse_rational("0/5")), 1);
    EXPECT_EQ(boost::multiprecision::denominator(parse_rational("-2/4")), 2);
    EXPECT_EQ(to_string(parse_rational("123456789012345678901234567890/3")), "41152263004115226300411522630");
}

TEST(Rational, RejectsDecimalsAndZeroDenominators) {
    EXPECT_THROW(parse_rational("0.1"), Error);
    EXPECT_THROW(parse_rational("1/-2"), Error);
    EXPECT_THROW(parse_rational("abc"), Error);
    try {
        parse_rational("1/0");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroDenominator);
    }
}

TEST(Rational, DecimalParsingIsExact) {
    EXPECT_EQ(parse_rational_or_decimal("0.1"), Rational(1, 10));
    EXPECT_EQ(parse_rational_or_decimal("-2.5e-1"), Rational(-1, 4));
    EXPECT_EQ(parse_rational_or_decimal("3e2"), Rational(300));
    EXPECT_EQ(parse_rational_or_decimal("7/3"), Rational(7, 3));
}

TEST(Rational, FieldAxiomsOnRandomValues) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 500; ++t) {
        const Rational a = oracle::random_rational(rng), b = oracle::random_rational(rng),
                       c = oracle::random_rational(rng);
        EXPECT_EQ((a + b) + c, a + (b + c));
        EXPECT_EQ((a * b) * c, a * (b * c));
        EXPECT_EQ(a * (b + c), a * b + a * c);
        EXPECT_EQ(a + (-a), 0);
        if (a != 0) EXPECT_EQ(a * (1 / a), 1);
    }
}

TEST(LambdaPoly, TrimsAndSerializesLowestFirst) {
    const LambdaPoly p = lp({1, Rational(-1, 2), 0, 0});
    EXPECT_EQ(p.degree(), 1);
    EXPECT_EQ(to_string(p), "[1, -1/2]");
    EXPECT_TRUE(lp({0, 0}).is_zero());
    EXPECT_EQ(to_string(LambdaPoly{}), "[]");
}

TEST(LambdaPoly, DivisionAndGcd) {
    const LambdaPoly a = lp({-1, 0, 1});  // l^2 - 1
    const LambdaPoly b = lp({1, 1});      // l + 1
    EXPECT_EQ(divide_exact(a, b), lp({-1, 1}));
    EXPECT_EQ(gcd(a, lp({2, 2})), lp({1, 1}));
    EXPECT_EQ(gcd(a, lp({3})), lp({1}));
}

TEST(BivarGcd, SharedAndCoprimeFactors) {
    const BivarPoly zm1 = zc({-1, 1});
    EXPECT_EQ(poly_gcd_z(zm1 * zm1, zm1), zm1);
    EXPECT_EQ(poly_gcd_z(zm1, zc({1, 1})), zc({1}));
}

TEST(BivarGcd, NidsCommonFactorHasDegreeOne) {
    // Unreduced transfer function of the 3-state NIDS recursion by cofactor expansion.
    const auto r = get_algorithm("nids", Rational(1, 10));
    const auto [num, den] = oracle::unreduced_tf(r);
    ASSERT_EQ(den.degree(), 3);
    const BivarPoly g = poly_gcd_z(num, den);
    EXPECT_EQ(g.degree(), 1);
    // (z - 1)(z - 1 + l) + l/2 = z^2 + (l - 2) z + 1 - l/2
    const BivarPoly expected_den = bp({lp({1, Rational(-1, 2)}), lp({-2, 1}), lp({1})});
    EXPECT_EQ(normalize_primitive(divide_exact(den, g)), expected_den);
}

TEST(BivarGcd, DividesBothArguments) {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 40; ++t) {
        const BivarPoly m = random_bivar(rng, 1, 1);
        const BivarPoly p = random_bivar(rng, 2, 1) * m;
        const BivarPoly q = random_bivar(rng, 1, 2) * m;
        if (p.is_zero() || q.is_zero()) continue;
        const BivarPoly g = poly_gcd_z(p, q);
        EXPECT_TRUE(pseudo_remainder(p, g).is_zero());
        EXPECT_TRUE(pseudo_remainder(q, g).is_zero());
        if (m.degree() > 0) EXPECT_GE(g.degree(), m.degree());
    }
}

TEST(RatFun, ReduceExamples) {
    const Rational alpha(3, 7);
    const BivarPoly zm1 = zc({-1, 1});
    const auto f = ratfun_reduce(zm1 * zc({-alpha}), zm1 * zm1);
    EXPECT_EQ(f.num(), zc({-alpha}));
    EXPECT_EQ(f.den(), zm1);

    const auto g = ratfun_reduce(zc({2}) * zm1, zc({2}) * zm1 * zc({3, 1}));
    EXPECT_EQ(g.num(), zc({1}));
    EXPECT_EQ(g.den(), zc({3, 1}));
}

TEST(RatFun, ZeroDenominatorAndZeroNumerator) {
    try {
        ratfun_reduce(zc({1}), BivarPoly{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroDenominator);
    }
    const auto zero = ratfun_reduce(BivarPoly{}, zc({2, 5}));
    EXPECT_TRUE(zero.num().is_zero());
    EXPECT_EQ(zero.den(), zc({1}));
}

TEST(RatFun, NidsReducedForm) {
    const Rational a(1, 10);
    const auto tf = transfer_function(get_algorithm("nids", a));
    // -a (1 - l/2)(z - 1) / ((z - 1)(z - 1 + l) + l/2)
    const BivarPoly num = bivar_const(lp({-a, a / 2})) * zc({-1, 1});
    const BivarPoly den = bp({lp({1, Rational(-1, 2)}), lp({-2, 1}), lp({1})});
    EXPECT_EQ(tf.num(), num);
    EXPECT_EQ(tf.den(), den);
}

TEST(RatFun, ReductionIsIdempotent) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 30; ++t) {
        const BivarPoly p = random_bivar(rng, 2, 1), q = random_bivar(rng, 2, 2);
        if (q.is_zero()) continue;
        const auto f = ratfun_reduce(p, q);
        EXPECT_EQ(ratfun_reduce(f.num(), f.den()), f);
    }
}

TEST(RatFun, ReductionIsCanonicalUnderCommonFactors) {
    std::mt19937_64 rng(11);
    int checked = 0;
    for (int t = 0; t < 60; ++t) {
        const BivarPoly p = random_bivar(rng, 2, 1), q = random_bivar(rng, 2, 1), m = random_bivar(rng, 1, 1);
        if (q.is_zero() || m.is_zero()) continue;
        EXPECT_EQ(ratfun_reduce(p * m, q * m), ratfun_reduce(p, q));
        ++checked;
    }
    EXPECT_GT(checked, 40);
}

TEST(RatFun, DenominatorMonicInZ) {
    const auto tf = canonical_transfer_function({Rational(2), Rational(1, 3), 1, Rational(-1, 5), Rational(1, 2)});
    EXPECT_EQ(tf.den().leading(), lambda_const(1));
}

TEST(RatFunEval, Examples) {
    const auto nids1 = canonical_transfer_function({1, Rational(1, 2), 1, 0, Rational(1, 2)});
    EXPECT_NEAR(std::abs(ratfun_eval(nids1, {1.0, 0.0}, 1.0)), 0.0, 1e-15);

    const auto integrator = ratfun_reduce(zc({-1}), zc({-1, 1}));
    const auto v = ratfun_eval(integrator, {2.0, 0.0}, 0.0);
    EXPECT_DOUBLE_EQ(v.real(), -1.0);
    EXPECT_DOUBLE_EQ(v.imag(), 0.0);

    // By hand at z = 0, l = 1, alpha = 1: numerator -(1 - 1/2)(0 - 1) = 1/2,
    // denominator (0 - 1)(0 - 1 + 1) + 1 * (1/2 + 0) = 1/2.
    const auto w = ratfun_eval(nids1, {0.0, 0.0}, 1.0);
    EXPECT_NEAR(w.real(), 1.0, 1e-15);
    EXPECT_NEAR(w.imag(), 0.0, 1e-15);
}

TEST(RatFunEval, PoleThrows) {
    const auto integrator = ratfun_reduce(zc({-1}), zc({-1, 1}));
    try {
        ratfun_eval(integrator, {1.0, 0.0}, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::PoleAtEvaluationPoint);
    }
}

TEST(RatFunEval, MatchesDenseSolveOffPoles) {
    const auto r = get_algorithm("extra", Rational(1, 10));
    const auto tf = transfer_function(r);
    for (double lam : {0.3, 1.0, 2.5})
        for (std::complex<double> z : {std::complex<double>(0.2, 0.7), std::complex<double>(-1.5, 0.1)}) {
            const auto a = ratfun_eval(tf, z, lam), b = oracle::tf_numeric(r, z, lam);
            EXPECT_NEAR(std::abs(a - b), 0.0, 1e-12);
        }
}

TEST(BivarPoly, Format) {
    EXPECT_EQ(format(zc({-1, 1}) * zc({-1, 1})), "z^2 - 2*z + 1");
    EXPECT_EQ(to_string(zc({-1, 1})), "[[-1], [1]]");
}
