#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "canform/algorithms.hpp"
#include "canform/graph.hpp"
#include "canform/spectral.hpp"
#include "oracles.hpp"

using namespace canform;

namespace {

/// Lemma-1 verdict for canonical params from the explicit denominator
/// z^2 + (zeta1 l - 2) z + (1 - zeta1 l + zeta0 l + zeta2 l^2): every nonzero
/// eigenvalue needs both roots strictly inside the unit disk.
bool oracle_verdict(const CanonicalParams& p, const std::vector<double>& eigenvalues, double tol = 1e-9) {
    const double z0 = to_double(p.zeta0), z1 = to_double(p.zeta1), z2 = to_double(p.zeta2);
    for (double lam : eigenvalues) {
        if (lam < 1e-9) continue;
        const auto [r1, r2] = oracle::quadratic_roots(1.0, z1 * lam - 2.0, 1.0 - z1 * lam + z0 * lam + z2 * lam * lam);
        if (std::abs(r1) >= 1.0 - tol || std::abs(r2) >= 1.0 - tol) return false;
    }
    return true;
}

std::vector<double> eigenvalues_of(const LaplacianGraph& g) {
    return {g.eigenvalues().data(), g.eigenvalues().data() + g.eigenvalues().size()};
}

std::vector<CanonicalParams> table_rows(const Rational& alpha) {
    std::vector<CanonicalParams> out;
    for (const auto& row : reproduce_table1(alpha, Rational(1)).rows) out.push_back(*row.params);
    return out;
}

std::vector<std::pair<std::string, CanonicalParams>> named_table_rows(const Rational& alpha) {
    std::vector<std::pair<std::string, CanonicalParams>> out;
    for (const auto& row : reproduce_table1(alpha, Rational(1)).rows) out.emplace_back(row.name, *row.params);
    return out;
}

}  // namespace

TEST(Graph, CompleteFourSpectrum) {
    const auto g = build_laplacian(TopologySpec::complete(4));
    // det(tI - L) = t (t - 4)^3 = t^4 - 12 t^3 + 48 t^2 - 64 t
    EXPECT_EQ(oracle::characteristic_polynomial(*g.exact()), LambdaPoly(std::vector<Rational>{0, -64, 48, -12, 1}));
    const std::vector<double> expected = {0, 4, 4, 4};
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(g.eigenvalues()(k), expected[static_cast<std::size_t>(k)], 1e-12);
}

TEST(Graph, RingFiveMatchesCirculantSpectrum) {
    const auto g = build_laplacian(TopologySpec::ring(5));
    const auto expected = oracle::ring_spectrum(5);
    for (int k = 0; k < 5; ++k) EXPECT_NEAR(g.eigenvalues()(k), expected[static_cast<std::size_t>(k)], 1e-12);
}

TEST(Graph, MuScalesEigenvalues) {
    for (const auto& spec : {TopologySpec::ring(6), TopologySpec::star(5), TopologySpec::path(4),
                             TopologySpec::erdos_renyi(8, 0.5, 3)}) {
        const auto g1 = build_laplacian(spec);
        const auto gh = build_laplacian(spec, Rational(1, 2));
        EXPECT_EQ(*gh.exact(), *g1.exact() * Rational(1, 2));
        EXPECT_NEAR((gh.eigenvalues() - 0.5 * g1.eigenvalues()).cwiseAbs().maxCoeff(), 0.0, 1e-12);
        EXPECT_DOUBLE_EQ(gh.mu(), 0.5);
    }
}

TEST(Graph, EigendecompositionInvariants) {
    for (const auto& spec : {TopologySpec::ring(7), TopologySpec::complete(5), TopologySpec::star(6),
                             TopologySpec::erdos_renyi(10, 0.4, 1)}) {
        const auto g = build_laplacian(spec);
        const auto& v = g.eigenvectors();
        const auto n = static_cast<Eigen::Index>(g.n());
        EXPECT_LE((v.transpose() * v - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LE((v * g.eigenvalues().asDiagonal() * v.transpose() - g.L()).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_EQ(g.eigenvalues()(0), 0.0);
        EXPECT_DOUBLE_EQ(v(0, 0), 1.0 / std::sqrt(static_cast<double>(n)));
        for (Eigen::Index k = 1; k < n; ++k) {
            EXPECT_GE(g.eigenvalues()(k), g.eigenvalues()(k - 1));
            // Sign convention: the first entry within 1e-12 of the largest magnitude is positive.
            const auto col = v.col(k);
            const double max_abs = col.cwiseAbs().maxCoeff();
            Eigen::Index arg = 0;
            while (std::abs(col(arg)) < max_abs - 1e-12) ++arg;
            EXPECT_GT(col(arg), 0.0);
        }
        // Columns of an integer-weight Laplacian sum to zero exactly.
        const RationalMatrix& l = *g.exact();
        for (std::size_t c = 0; c < l.cols(); ++c) {
            Rational sum = 0;
            for (std::size_t r = 0; r < l.rows(); ++r) sum += l(r, c);
            EXPECT_EQ(sum, 0);
        }
    }
}

TEST(Graph, ErdosRenyiIsDeterministic) {
    const auto spec = TopologySpec::erdos_renyi(12, 0.3, 42);
    const auto e1 = topology_edges(spec), e2 = topology_edges(spec);
    ASSERT_EQ(e1.size(), e2.size());
    for (std::size_t k = 0; k < e1.size(); ++k) {
        EXPECT_EQ(e1[k].i, e2[k].i);
        EXPECT_EQ(e1[k].j, e2[k].j);
    }
    // Documented sampler, written out independently.
    std::mt19937_64 rng(42);
    std::vector<std::pair<std::size_t, std::size_t>> expected;
    for (std::size_t i = 0; i < 12; ++i)
        for (std::size_t j = i + 1; j < 12; ++j)
            if (std::ldexp(static_cast<double>(rng() >> 11), -53) < 0.3) expected.emplace_back(i, j);
    ASSERT_EQ(e1.size(), expected.size());
    for (std::size_t k = 0; k < e1.size(); ++k) {
        EXPECT_EQ(e1[k].i, expected[k].first);
        EXPECT_EQ(e1[k].j, expected[k].second);
    }
    EXPECT_EQ(build_laplacian(TopologySpec::erdos_renyi(9, 0.6, 5)).L(),
              build_laplacian(TopologySpec::erdos_renyi(9, 0.6, 5)).L());
}

TEST(Graph, Errors) {
    auto kind_of = [](auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.kind();
        }
        ADD_FAILURE() << "no error";
        return ErrorKind::ParseError;
    };
    EXPECT_EQ(kind_of([] { build_laplacian(TopologySpec::erdos_renyi(8, 0.1, 7)); }), ErrorKind::DisconnectedGraph);
    EXPECT_EQ(kind_of([] { build_laplacian(TopologySpec::explicit_edges(4, {{0, 1, 1}, {2, 3, 1}})); }),
              ErrorKind::DisconnectedGraph);
    EXPECT_EQ(kind_of([] { build_laplacian(TopologySpec::ring(2)); }), ErrorKind::InvalidSpec);
    EXPECT_EQ(kind_of([] { build_laplacian(TopologySpec::ring(5), 0); }), ErrorKind::InvalidSpec);
    EXPECT_EQ(kind_of([] { build_laplacian(TopologySpec::erdos_renyi(5, 1.5, 1)); }), ErrorKind::InvalidSpec);
    EXPECT_EQ(kind_of([] { build_laplacian(TopologySpec::explicit_edges(3, {{0, 1, -1}, {1, 2, 1}})); }),
              ErrorKind::InvalidSpec);
    EXPECT_EQ(kind_of([] { build_laplacian(TopologySpec::explicit_edges(3, {{0, 0, 1}, {1, 2, 1}})); }),
              ErrorKind::InvalidSpec);
    EXPECT_EQ(kind_of([] { build_laplacian(TopologySpec::explicit_edges(3, {{0, 1, 1}, {1, 0, 1}})); }),
              ErrorKind::InvalidSpec);
    EXPECT_EQ(kind_of([] { build_laplacian(TopologySpec::explicit_edges(3, {{0, 5, 1}})); }), ErrorKind::InvalidSpec);
}

TEST(Graph, WeightedExplicitEdges) {
    const auto g = build_laplacian(TopologySpec::explicit_edges(3, {{0, 1, Rational(1, 2)}, {1, 2, 2}}));
    const RationalMatrix expected = {{Rational(1, 2), Rational(-1, 2), 0},
                                     {Rational(-1, 2), Rational(5, 2), -2},
                                     {0, -2, 2}};
    EXPECT_EQ(*g.exact(), expected);
}

TEST(ValidateLaplacian, Clauses) {
    const auto ring = build_laplacian(TopologySpec::ring(5)).L();
    EXPECT_TRUE(validate_laplacian(ring).ok());

    Eigen::MatrixXd asym = ring;
    asym(0, 1) += 1e-3;
    asym(0, 0) -= 1e-3;  // keep the row sum at zero
    const auto rep = validate_laplacian(asym);
    EXPECT_FALSE(rep.symmetric);
    EXPECT_NEAR(rep.symmetry_residual, 1e-3, 1e-12);
    EXPECT_TRUE(rep.zero_row_sums);

    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(4, 4);
    block.topLeftCorner(2, 2) << 1, -1, -1, 1;
    block.bottomRightCorner(2, 2) << 1, -1, -1, 1;
    const auto brep = validate_laplacian(block);
    EXPECT_TRUE(brep.symmetric && brep.zero_row_sums && brep.positive_semidefinite);
    EXPECT_FALSE(brep.simple_zero_eigenvalue);

    Eigen::MatrixXd rows = ring;
    rows(2, 2) += 0.5;
    EXPECT_FALSE(validate_laplacian(rows).zero_row_sums);

    Eigen::MatrixXd neg = -ring;
    EXPECT_FALSE(validate_laplacian(neg).positive_semidefinite);
    EXPECT_FALSE(validate_laplacian(Eigen::MatrixXd::Zero(2, 3)).square);
}

TEST(PoleZero, NidsAtZeroIsMarginal) {
    const auto tf = canonical_transfer_function({Rational(1, 10), Rational(1, 2), 1, 0, Rational(1, 2)});
    const auto rep = pole_zero_report(tf, 0.0);
    ASSERT_EQ(rep.poles.size(), 1u);
    EXPECT_NEAR(std::abs(rep.poles[0].value - 1.0), 0.0, 1e-12);
    EXPECT_EQ(rep.classification, StabilityClass::MarginalWithPoleAtOne);
}

TEST(PoleZero, NidsOnCompleteFourWithUnitMu) {
    // Denominator (z - 1)(z + 3) + 2 = z^2 + 2 z - 1 has roots -1 +- sqrt(2); one lies outside the disk.
    const auto tf = canonical_transfer_function({Rational(1, 10), Rational(1, 2), 1, 0, Rational(1, 2)});
    const auto rep = pole_zero_report(tf, 4.0);
    const auto [r1, r2] = oracle::quadratic_roots(1, 2, -1);
    ASSERT_EQ(rep.poles.size(), 2u);
    EXPECT_NEAR(rep.poles[0].value.real(), std::min(r1.real(), r2.real()), 1e-12);
    EXPECT_NEAR(rep.poles[1].value.real(), std::max(r1.real(), r2.real()), 1e-12);
    EXPECT_GT(std::abs(rep.poles[0].value), 1.0);
    EXPECT_EQ(rep.classification, StabilityClass::Violation);
    // The zero at z = 1 is present regardless of stability.
    ASSERT_EQ(rep.zeros.size(), 1u);
    EXPECT_NEAR(std::abs(rep.zeros[0].value - 1.0), 0.0, 1e-12);
}

TEST(PoleZero, NidsOnCompleteFourWithHalfMu) {
    // lambda = 2: z^2 + 0 z + 0 -> double pole at 0.
    const auto tf = canonical_transfer_function({Rational(1, 10), Rational(1, 2), 1, 0, Rational(1, 2)});
    const auto rep = pole_zero_report(tf, 2.0);
    EXPECT_EQ(rep.classification, StabilityClass::StrictlyStableWithZeroAtOne);
    EXPECT_EQ(rep.pole_count(), 2);
}

TEST(PoleZero, ZeroZetasGiveDoublePoleAtOne) {
    // Reduced form is -1/(z - 1): the (z - 1)^2 denominator loses one factor to the numerator.
    const auto rep = pole_zero_report(canonical_transfer_function({1, 0, 0, 0, 0}), 1.0);
    EXPECT_EQ(rep.classification, StabilityClass::Violation);
    EXPECT_NEAR(std::abs(rep.poles[0].value - 1.0), 0.0, 1e-12);
}

TEST(PoleZero, CountsMatchDegreesAndConjugatePairs) {
    std::mt19937_64 rng(31);
    int complex_seen = 0;
    for (int t = 0; t < 200; ++t) {
        const CanonicalParams p{oracle::random_nonzero_rational(rng), oracle::random_rational(rng),
                                oracle::random_rational(rng), oracle::random_rational(rng), oracle::random_rational(rng)};
        const auto tf = canonical_transfer_function(p);
        const double lam = 0.25 + 0.5 * (t % 7);
        const auto rep = pole_zero_report(tf, lam);
        const auto num = detail::substitute_trimmed(tf.num(), lam);
        const auto den = detail::substitute_trimmed(tf.den(), lam);
        const int cancelled = static_cast<int>(den.size()) - 1 - rep.pole_count();
        EXPECT_GE(cancelled, 0);
        EXPECT_EQ(rep.zero_count() + cancelled, num.empty() ? 0 : static_cast<int>(num.size()) - 1);
        for (const auto& pole : rep.poles) {
            if (pole.value.imag() == 0.0) continue;
            ++complex_seen;
            const bool has_conj = std::any_of(rep.poles.begin(), rep.poles.end(), [&](const Root& q) {
                return std::abs(q.value - std::conj(pole.value)) <= 1e-12;
            });
            EXPECT_TRUE(has_conj);
        }
    }
    EXPECT_GT(complex_seen, 0);
}

TEST(PoleZero, HigherDegreeUsesCompanionMatrix) {
    // (z - 1/2)(z + 1/4)(z - 0.8) has roots well separated; check against the known values.
    const auto roots = polynomial_roots({0.1, 0.075, -1.05, 1.0});
    std::vector<double> re;
    for (const auto& r : roots) {
        EXPECT_NEAR(r.imag(), 0.0, 1e-12);
        re.push_back(r.real());
    }
    std::sort(re.begin(), re.end());
    EXPECT_NEAR(re[0], -0.25, 1e-12);
    EXPECT_NEAR(re[1], 0.5, 1e-12);
    EXPECT_NEAR(re[2], 0.8, 1e-12);
}

TEST(PoleZeroConditions, SymbolicZeroAtOne) {
    std::mt19937_64 rng(37);
    for (int t = 0; t < 50; ++t) {
        const CanonicalParams p{oracle::random_nonzero_rational(rng), oracle::random_rational(rng),
                                oracle::random_rational(rng), oracle::random_rational(rng), oracle::random_rational(rng)};
        EXPECT_TRUE(has_zero_at_one_symbolically(canonical_transfer_function(p)));
    }
    // A realization without the zero: DGD's -a/(z - 1 + l).
    auto r = StructuredRealization::zeros(1);
    r.A0 = {{1}};
    r.A1 = {{-1}};
    r.B0 = {{-1}};
    r.C0 = {{1}};
    EXPECT_FALSE(has_zero_at_one_symbolically(transfer_function(r)));
}

TEST(PoleZeroConditions, TableRowsAgreeWithQuadraticOracle) {
    int passes = 0, fails = 0;
    for (const auto& spec : {TopologySpec::ring(5), TopologySpec::complete(4), TopologySpec::star(5),
                             TopologySpec::path(4), TopologySpec::erdos_renyi(8, 0.5, 3)})
        for (const Rational& mu : {Rational(1), Rational(1, 2), Rational(1, 4)}) {
            const auto g = build_laplacian(spec, mu);
            for (const auto& p : table_rows(Rational(1, 10))) {
                const auto res = lemma1_check(p, g);
                EXPECT_EQ(res.pass, oracle_verdict(p, eigenvalues_of(g))) << to_string(p) << " mu = " << mu;
                (res.pass ? passes : fails)++;
            }
        }
    EXPECT_GT(passes, 0);
    EXPECT_GT(fails, 0);
}

TEST(PoleZeroConditions, RingFive) {
    const auto g1 = build_laplacian(TopologySpec::ring(5));
    const auto gh = build_laplacian(TopologySpec::ring(5), Rational(1, 2));
    for (const auto& [name, p] : named_table_rows(Rational(1, 10))) {
        // lambda_max = 3.618 lies outside every row's stability window at mu = 1.
        const auto r1 = lemma1_check(p, g1);
        EXPECT_FALSE(r1.pass) << name;
        ASSERT_FALSE(r1.failing_eigenvalues().empty());
        EXPECT_NEAR(r1.failing_eigenvalues().back(), oracle::ring_spectrum(5).back(), 1e-9);
        const auto rh = lemma1_check(p, gh);
        EXPECT_EQ(rh.reports.size(), 3u);  // distinct eigenvalues 0, 1.38/2, 3.62/2
        // zeta = (1/10, 2, 9/10, 0) still has a pole at -1.19 for lambda = 1.81.
        EXPECT_EQ(rh.pass, name != "jakovetic_bW") << name;
    }
}

TEST(PoleZeroConditions, VerdictDoesNotDependOnAlpha) {
    // alpha only scales the numerator, so pole locations and the verdict are alpha-free.
    const auto gh = build_laplacian(TopologySpec::ring(5), Rational(1, 2));
    const auto g1 = build_laplacian(TopologySpec::ring(5));
    for (const Rational& a : {Rational(1, 10), Rational(100), Rational(-3)}) {
        EXPECT_TRUE(lemma1_check(CanonicalParams{a, Rational(1, 2), 1, 0, 0}, gh).pass);
        EXPECT_FALSE(lemma1_check(CanonicalParams{a, Rational(1, 2), 1, 0, 0}, g1).pass);
    }
}

TEST(PoleZeroConditions, CompleteFourNeedsSmallerMuForDiging) {
    const CanonicalParams diging{Rational(1, 10), 0, 2, 1, 0};
    // lambda = 2 gives (z + 1)^2: repeated pole on the unit circle.
    EXPECT_FALSE(lemma1_check(diging, build_laplacian(TopologySpec::complete(4), Rational(1, 2))).pass);
    EXPECT_TRUE(lemma1_check(diging, build_laplacian(TopologySpec::complete(4), Rational(1, 4))).pass);
}

TEST(PoleZeroConditions, DisconnectedRawLaplacian) {
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(4, 4);
    block.topLeftCorner(2, 2) << 1, -1, -1, 1;
    block.bottomRightCorner(2, 2) << 1, -1, -1, 1;
    try {
        lemma1_check(CanonicalParams{1, 1, 1, 0, 0}, block);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidLaplacian);
    }
}

TEST(PoleZeroConditions, TolMonotoneWhenPolesAreWellInside) {
    // Strict stability is tested as |z| < 1 - tol, so monotonicity in tol can only
    // hold while tol stays below the stability margin; poles here sit at |z| <= 0.999.
    std::mt19937_64 rng(41);
    const auto g = build_laplacian(TopologySpec::ring(5), Rational(1, 2));
    int checked = 0;
    for (int t = 0; t < 300; ++t) {
        const CanonicalParams p{oracle::random_nonzero_rational(rng), oracle::random_rational(rng, 3, 4),
                                oracle::random_rational(rng, 3, 4), oracle::random_rational(rng, 3, 4), 0};
        if (!oracle_verdict(p, eigenvalues_of(g), 1e-3)) continue;
        ++checked;
        bool prev = true;
        for (double tol : {1e-12, 1e-10, 1e-8, 1e-6, 1e-4}) {
            const bool pass = lemma1_check(p, g, tol).pass;
            if (prev) EXPECT_TRUE(pass) << to_string(p) << " tol = " << tol;
            prev = pass;
        }
    }
    EXPECT_GT(checked, 5);
}
