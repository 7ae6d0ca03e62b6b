#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "canform/algorithms.hpp"
#include "canform/canonical.hpp"
#include "canform/realization.hpp"
#include "canform/realization_io.hpp"
#include "oracles.hpp"

using namespace canform;

namespace {

StructuredRealization random_realization(std::mt19937_64& rng, std::size_t s, bool passthrough = false) {
    auto r = StructuredRealization::zeros(s);
    auto fill = [&](RationalMatrix& m) {
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = oracle::random_rational(rng, 5, 3);
    };
    fill(r.A0);
    fill(r.A1);
    fill(r.B0);
    fill(r.B1);
    fill(r.C0);
    fill(r.C1);
    if (passthrough) {
        r.D0 = oracle::random_rational(rng, 5, 3);
        r.D1 = oracle::random_rational(rng, 5, 3);
    }
    return r;
}

RationalMatrix random_invertible(std::mt19937_64& rng, std::size_t s) {
    for (;;) {
        RationalMatrix t(s, s);
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j) t(i, j) = oracle::random_rational(rng, 4, 3);
        if (oracle::det_cofactor(t) != 0) return t;
    }
}

}  // namespace

TEST(TransferFunction, DgdSkeleton) {
    // x+ = x - L x - a u, y = x:  G = -a / (z - 1 + l)
    auto r = StructuredRealization::zeros(1);
    r.A0 = {{1}};
    r.A1 = {{-1}};
    r.B0 = {{Rational(-1, 10)}};
    r.C0 = {{1}};
    const auto tf = transfer_function(r);
    EXPECT_EQ(format(tf), "(-1/10) / (z + lambda - 1)");
}

TEST(TransferFunction, UnreducedMatchesCofactorExpansion) {
    std::mt19937_64 rng(21);
    for (std::size_t s = 1; s <= 4; ++s)
        for (int t = 0; t < 10; ++t) {
            const auto r = random_realization(rng, s, t % 2 == 1);
            const auto [num, den] = transfer_function_unreduced(r);
            const auto [onum, oden] = oracle::unreduced_tf(r);
            EXPECT_EQ(num, onum) << "s = " << s;
            EXPECT_EQ(den, oden) << "s = " << s;
        }
}

TEST(TransferFunction, MatchesDenseSolve) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        const auto r = random_realization(rng, 3, true);
        const auto tf = transfer_function(r);
        for (double lam : {0.0, 0.7, 2.0}) {
            const std::complex<double> z(1.3, -0.4);
            EXPECT_NEAR(std::abs(ratfun_eval(tf, z, lam) - oracle::tf_numeric(r, z, lam)), 0.0,
                        1e-9 * (1 + std::abs(oracle::tf_numeric(r, z, lam))));
        }
    }
}

TEST(TransferFunction, CanonicalAndAlternateRealizationsAgree) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 50; ++t) {
        const CanonicalParams p{oracle::random_nonzero_rational(rng), oracle::random_rational(rng),
                                oracle::random_rational(rng), oracle::random_rational(rng), oracle::random_rational(rng)};
        EXPECT_EQ(transfer_function(canonical_realization(p)), transfer_function(alternate_canonical_realization(p)));
    }
}

TEST(TransferFunction, InvariantUnderSimilarity) {
    std::mt19937_64 rng(13);
    for (std::size_t s = 1; s <= 3; ++s)
        for (int t = 0; t < 10; ++t) {
            const auto r = random_realization(rng, s);
            const auto tr = similarity_transform(r, random_invertible(rng, s));
            EXPECT_EQ(transfer_function(r), transfer_function(tr));
        }
}

TEST(TransferFunction, SingularTransformRejected) {
    const auto r = canonical_realization({1, 1, 1, 1, 1});
    const RationalMatrix t = {{1, 2}, {2, 4}};
    try {
        similarity_transform(r, t);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularTransform);
    }
}

TEST(TransferFunction, DimensionChecks) {
    auto r = StructuredRealization::zeros(2);
    r.B0 = RationalMatrix(3, 1);
    EXPECT_THROW(transfer_function(r), Error);
    EXPECT_THROW(transfer_function(StructuredRealization{}), Error);
}

TEST(TransferFunction, MuScalingSubstitutesLambda) {
    // Scaling L by mu is the substitution l -> mu*l.
    const Rational mu(1, 3);
    const auto r = get_algorithm("extra", Rational(1, 10));
    const auto scaled = transfer_function(scale_laplacian(r, mu));
    const auto base = transfer_function(r);
    for (double lam : {0.5, 1.5, 3.0}) {
        const std::complex<double> z(0.1, 0.9);
        EXPECT_NEAR(std::abs(ratfun_eval(scaled, z, lam) - ratfun_eval(base, z, lam / 3.0)), 0.0, 1e-12);
    }
}

TEST(ValidateClass, Diagnostics) {
    const auto nids = get_algorithm("nids", Rational(1, 10));
    const auto d = validate_class(nids);
    EXPECT_FALSE(d.state_dim_ok);
    EXPECT_TRUE(d.passthrough_ok);
    EXPECT_TRUE(d.single_comm_ok);
    EXPECT_EQ(d.messages.size(), 1u);

    EXPECT_TRUE(validate_class(get_algorithm("diging", Rational(1, 10))).all_ok());
    EXPECT_TRUE(validate_class(canonical_realization({1, 1, 1, 1, 1})).all_ok());

    const auto dc = read_realization_file(CANFORM_CONFIG_DIR "/double_comm.real");
    EXPECT_FALSE(validate_class(dc).single_comm_ok);

    auto pt = canonical_realization({1, 0, 0, 0, 0});
    pt.D1 = 1;
    EXPECT_FALSE(validate_class(pt).passthrough_ok);
}

TEST(RealizationIo, RoundTripIsExact) {
    std::mt19937_64 rng(17);
    for (std::size_t s = 1; s <= 3; ++s) {
        const auto r = random_realization(rng, s, true);
        const std::string text = to_text(r);
        const auto back = from_text(text);
        EXPECT_EQ(back, r);
        EXPECT_EQ(to_text(back), text);
    }
}

TEST(RealizationIo, ParsesCommentsAndLayout) {
    const auto r = read_realization_file(CANFORM_CONFIG_DIR "/double_comm.real");
    EXPECT_EQ(r.s, 2u);
    EXPECT_EQ(r.A0(0, 1), Rational(1, 2));
    EXPECT_EQ(r.B0(0, 0), Rational(-1, 10));
    EXPECT_EQ(r.C1(0, 0), 1);
    EXPECT_EQ(to_text(r),
              "s = 2\nA0 = 1 1/2; 0 1\nA1 = -1 0; -1 0\nB0 = -1/10 0\nB1 = 1 0\nC0 = 1 0\nC1 = 1 0\nD0 = 0\nD1 = 0\n");
}

TEST(RealizationIo, RejectsMalformedFiles) {
    const std::string good = to_text(canonical_realization({1, 1, 1, 1, 1}));
    auto expect_parse_error = [](const std::string& text) {
        try {
            from_text(text);
            ADD_FAILURE() << text;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::ParseError) << text;
        }
    };
    expect_parse_error("s = 2\n");
    expect_parse_error("s = 0\n");
    std::string ragged = good;
    ragged.replace(ragged.find("A0 = 1 1; 0 1"), 13, "A0 = 1 1; 0");
    expect_parse_error(ragged);
    std::string decimal = good;
    decimal.replace(decimal.find("B0 = -1 0"), 9, "B0 = -0.1 0");
    expect_parse_error(decimal);
    EXPECT_THROW(read_realization_file("/nonexistent/file.real"), Error);
}

TEST(Eta, CanonicalRealizationValues) {
    const CanonicalParams p{Rational(1, 10), Rational(1, 2), 1, 0, Rational(1, 2)};
    const auto e = eta_coefficients(canonical_realization(p));
    EXPECT_EQ(e(1), -p.alpha);
    EXPECT_EQ(e(8), -2);
    EXPECT_EQ(e(10), 1);
    EXPECT_EQ(e(9), p.zeta1);
    EXPECT_EQ(e(12), p.zeta2);
}

TEST(Eta, MatchesCofactorTransferFunction) {
    // Unreduced num = (e1 + e2 l + e3 l^2) z + (e4 + ... + e7 l^3), den = z^2 + (e8 + e9 l) z + (e10 + e11 l + e12 l^2).
    std::mt19937_64 rng(29);
    for (int t = 0; t < 50; ++t) {
        const auto r = random_realization(rng, 2);
        const auto e = eta_coefficients(r);
        const auto [num, den] = oracle::unreduced_tf(r);
        for (int i = 0; i < 3; ++i) EXPECT_EQ(e(1 + i), num.coeff(1).coeff(static_cast<std::size_t>(i)));
        for (int i = 0; i < 4; ++i) EXPECT_EQ(e(4 + i), num.coeff(0).coeff(static_cast<std::size_t>(i)));
        for (int i = 0; i < 2; ++i) EXPECT_EQ(e(8 + i), den.coeff(1).coeff(static_cast<std::size_t>(i)));
        for (int i = 0; i < 3; ++i) EXPECT_EQ(e(10 + i), den.coeff(0).coeff(static_cast<std::size_t>(i)));
    }
}

TEST(Eta, Preconditions) {
    try {
        eta_coefficients(get_algorithm("nids", 1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::WrongStateDimension);
    }
    auto r = canonical_realization({1, 1, 1, 1, 1});
    r.D0 = 1;
    try {
        eta_coefficients(r);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonzeroPassthrough);
    }
}
