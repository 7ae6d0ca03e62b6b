#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "canform/error.hpp"
#include "canform/graph.hpp"
#include "canform/realization.hpp"

namespace canform {

/// The five scalars (alpha, zeta0..zeta3) of the canonical two-state algorithm.
struct CanonicalParams {
    Rational alpha = 0;
    Rational zeta0 = 0;
    Rational zeta1 = 0;
    Rational zeta2 = 0;
    Rational zeta3 = 0;

    friend bool operator==(const CanonicalParams&, const CanonicalParams&) = default;
};

inline std::string zeta_string(const CanonicalParams& p) {
    return "(" + to_string(p.zeta0) + ", " + to_string(p.zeta1) + ", " + to_string(p.zeta2) + ", " +
           to_string(p.zeta3) + ")";
}

inline std::string to_string(const CanonicalParams& p) {
    return "alpha = " + to_string(p.alpha) + ", zeta = " + zeta_string(p);
}

/// A0 = [1 z0; 0 1], B0 = [-a; 0], C0 = [1 0],
/// A1 = [-z1 z2; -1 0], B1 = 0, C1 = [-z3 0], D0 = D1 = 0.
inline StructuredRealization canonical_realization(const CanonicalParams& p) {
    StructuredRealization r = StructuredRealization::zeros(2);
    r.A0 = {{1, p.zeta0}, {0, 1}};
    r.B0 = {{-p.alpha}, {0}};
    r.C0 = {{1, 0}};
    r.A1 = {{-p.zeta1, p.zeta2}, {-1, 0}};
    r.C1 = {{-p.zeta3, 0}};
    return r;
}

/// Same transfer function as canonical_realization, with zeta3 moved from the
/// output map into the input map: B1 = [alpha*zeta3; 0], C1 = 0.
inline StructuredRealization alternate_canonical_realization(const CanonicalParams& p) {
    StructuredRealization r = canonical_realization(p);
    r.B1 = {{p.alpha * p.zeta3}, {0}};
    r.C1 = RationalMatrix(1, 2);
    return r;
}

/// -alpha (1 - zeta3 l)(z - 1) / ((z - 1)(z - 1 + zeta1 l) + l (zeta0 + zeta2 l)), reduced.
inline BivarRatFun canonical_transfer_function(const CanonicalParams& p) {
    const LambdaPoly l = lambda_var();
    const BivarPoly zm1 = z_var() - bivar_const(lambda_const(1));
    const BivarPoly num = bivar_const(lambda_const(-p.alpha) * (lambda_const(1) - l * p.zeta3)) * zm1;
    const BivarPoly den = zm1 * (zm1 + bivar_const(l * p.zeta1)) + bivar_const(l * (lambda_const(p.zeta0) + l * p.zeta2));
    return BivarRatFun::reduce(num, den);
}

/// eta_1..eta_12 of a two-state realization without feedthrough. eta(i) is 1-based.
struct EtaCoefficients {
    std::array<Rational, 12> values{};

    const Rational& operator()(int i) const { return values.at(static_cast<std::size_t>(i - 1)); }
    Rational& operator()(int i) { return values.at(static_cast<std::size_t>(i - 1)); }

    friend bool operator==(const EtaCoefficients&, const EtaCoefficients&) = default;
};

/// Closed-form coefficients of
///   G(z) = ((e1 + e2 l + e3 l^2) z + (e4 + e5 l + e6 l^2 + e7 l^3))
///          / (z^2 + (e8 + e9 l) z + (e10 + e11 l + e12 l^2))
/// in terms of the block entries a1..a8, b1..b4, c1..c4.
inline EtaCoefficients eta_coefficients(const StructuredRealization& r) {
    r.check_dimensions();
    if (r.s != 2) throw Error(ErrorKind::WrongStateDimension, "eta coefficients need s = 2, got " + std::to_string(r.s));
    if (r.D0 != 0 || r.D1 != 0) throw Error(ErrorKind::NonzeroPassthrough, "eta coefficients need D0 = D1 = 0");

    const Rational &a1 = r.A0(0, 0), &a2 = r.A0(0, 1), &a3 = r.A0(1, 0), &a4 = r.A0(1, 1);
    const Rational &a5 = r.A1(0, 0), &a6 = r.A1(0, 1), &a7 = r.A1(1, 0), &a8 = r.A1(1, 1);
    const Rational &b1 = r.B0(0, 0), &b2 = r.B0(1, 0), &b3 = r.B1(0, 0), &b4 = r.B1(1, 0);
    const Rational &c1 = r.C0(0, 0), &c2 = r.C0(0, 1), &c3 = r.C1(0, 0), &c4 = r.C1(0, 1);

    EtaCoefficients e;
    e(1) = b1 * c1 + b2 * c2;
    e(2) = b1 * c3 + b3 * c1 + b2 * c4 + b4 * c2;
    e(3) = b3 * c3 + b4 * c4;
    e(4) = -a1 * b2 * c2 + a2 * b2 * c1 + a3 * b1 * c2 - a4 * b1 * c1;
    e(5) = a2 * b2 * c3 - a1 * b4 * c2 - a1 * b2 * c4 + a2 * b4 * c1 + a3 * b1 * c4 + a3 * b3 * c2 - a4 * b1 * c3 -
           a4 * b3 * c1 - a5 * b2 * c2 + a6 * b2 * c1 + a7 * b1 * c2 - a8 * b1 * c1;
    e(6) = a2 * b4 * c3 - a1 * b4 * c4 + a3 * b3 * c4 - a4 * b3 * c3 - a5 * b2 * c4 - a5 * b4 * c2 + a6 * b2 * c3 +
           a6 * b4 * c1 + a7 * b1 * c4 + a7 * b3 * c2 - a8 * b1 * c3 - a8 * b3 * c1;
    e(7) = a6 * b4 * c3 - a5 * b4 * c4 + a7 * b3 * c4 - a8 * b3 * c3;
    e(8) = -(a1 + a4);
    e(9) = -(a5 + a8);
    e(10) = a1 * a4 - a2 * a3;
    e(11) = a1 * a8 - a2 * a7 - a3 * a6 + a4 * a5;
    e(12) = a5 * a8 - a6 * a7;
    return e;
}

// ---------------------------------------------------------------------------
// Canonicalization

enum class CanonicalizationErrorKind {
    NotStrictlyProper,
    DegreeTooHighInZ,
    DegreeTooHighInLambda,
    DoubleCommunication,  // eta3 != 0 or eta7 != 0
    NoPoleAtOne,          // eta8 != -2 or eta10 != 1
    NoZeroAtOne,          // eta1 + eta4 != 0, eta2 + eta5 != 0 or eta6 != 0
    ZeroGain,             // eta1 = 0
};

constexpr std::string_view to_string(CanonicalizationErrorKind k) {
    switch (k) {
    case CanonicalizationErrorKind::NotStrictlyProper: return "NotStrictlyProper";
    case CanonicalizationErrorKind::DegreeTooHighInZ: return "DegreeTooHighInZ";
    case CanonicalizationErrorKind::DegreeTooHighInLambda: return "DegreeTooHighInLambda";
    case CanonicalizationErrorKind::DoubleCommunication: return "DoubleCommunication";
    case CanonicalizationErrorKind::NoPoleAtOne: return "NoPoleAtOne";
    case CanonicalizationErrorKind::NoZeroAtOne: return "NoZeroAtOne";
    case CanonicalizationErrorKind::ZeroGain: return "ZeroGain";
    }
    return "Unknown";
}

struct CanonicalizationError {
    CanonicalizationErrorKind kind;
    std::string detail;
};

using CanonicalizeResult = std::variant<CanonicalParams, CanonicalizationError>;

inline bool succeeded(const CanonicalizeResult& r) { return std::holds_alternative<CanonicalParams>(r); }

/// Reads eta_1..eta_12 off a reduced transfer function, restoring the (z - 1)
/// factors that reduction may have cancelled. Shape violations come back as
/// errors, checked in the order listed in CanonicalizationErrorKind.
inline std::variant<EtaCoefficients, CanonicalizationError> eta_from_transfer_function(const BivarRatFun& tf) {
    using K = CanonicalizationErrorKind;
    BivarPoly num = tf.num();
    BivarPoly den = tf.den();
    if (den.leading().degree() != 0)
        return CanonicalizationError{K::DegreeTooHighInLambda, "denominator is not monic in z"};
    if (!num.is_zero() && num.degree() >= den.degree())
        return CanonicalizationError{K::NotStrictlyProper, "numerator z-degree " + std::to_string(num.degree()) +
                                                               " >= denominator z-degree " +
                                                               std::to_string(den.degree())};
    if (den.degree() > 2)
        return CanonicalizationError{K::DegreeTooHighInZ,
                                     "reduced denominator has z-degree " + std::to_string(den.degree())};

    // Only (z - 1) can have cancelled: any common factor of the canonical
    // numerator (1 - zeta3 l)(z - 1) of positive z-degree is (z - 1).
    const BivarPoly zm1 = z_var() - bivar_const(lambda_const(1));
    for (int k = den.degree(); k < 2; ++k) {
        num *= zm1;
        den *= zm1;
    }

    const LambdaPoly n1 = num.coeff(1), n0 = num.coeff(0);
    const LambdaPoly d1 = den.coeff(1), d0 = den.coeff(0);
    if (n1.degree() > 2 || n0.degree() > 3 || d1.degree() > 1 || d0.degree() > 2)
        return CanonicalizationError{K::DegreeTooHighInLambda,
                                     "lambda-degrees (" + std::to_string(n1.degree()) + ", " +
                                         std::to_string(n0.degree()) + ", " + std::to_string(d1.degree()) + ", " +
                                         std::to_string(d0.degree()) + ") exceed (2, 3, 1, 2)"};

    EtaCoefficients e;
    for (int i = 0; i < 3; ++i) e(1 + i) = n1.coeff(static_cast<std::size_t>(i));
    for (int i = 0; i < 4; ++i) e(4 + i) = n0.coeff(static_cast<std::size_t>(i));
    for (int i = 0; i < 2; ++i) e(8 + i) = d1.coeff(static_cast<std::size_t>(i));
    for (int i = 0; i < 3; ++i) e(10 + i) = d0.coeff(static_cast<std::size_t>(i));
    return e;
}

inline CanonicalizeResult canonicalize_transfer_function(const BivarRatFun& tf) {
    using K = CanonicalizationErrorKind;
    auto extracted = eta_from_transfer_function(tf);
    if (auto* err = std::get_if<CanonicalizationError>(&extracted)) return *err;
    const auto& e = std::get<EtaCoefficients>(extracted);

    if (e(3) != 0 || e(7) != 0)
        return CanonicalizationError{K::DoubleCommunication, "eta3 = " + to_string(e(3)) + ", eta7 = " + to_string(e(7))};
    if (e(8) != -2 || e(10) != 1)
        return CanonicalizationError{K::NoPoleAtOne, "denominator at lambda = 0 is not (z - 1)^2 (eta8 = " +
                                                         to_string(e(8)) + ", eta10 = " + to_string(e(10)) + ")"};
    if (e(1) + e(4) != 0 || e(2) + e(5) != 0 || e(6) != 0)
        return CanonicalizationError{K::NoZeroAtOne, "numerator does not vanish at z = 1 for all lambda"};
    if (e(1) == 0) return CanonicalizationError{K::ZeroGain, "eta1 = 0, the stepsize would be zero"};

    return CanonicalParams{-e(1), e(9) + e(11), e(9), e(12), Rational(-e(2) / e(1))};
}

/// Canonical parameters of any realization, computed through its reduced
/// transfer function (never by matching blocks, which are not unique).
inline CanonicalizeResult canonicalize(const StructuredRealization& r) {
    return canonicalize_transfer_function(transfer_function(r));
}

inline bool equivalent(const StructuredRealization& r1, const StructuredRealization& r2) {
    const BivarRatFun tf1 = transfer_function(r1);
    const BivarRatFun tf2 = transfer_function(r2);
    const auto c1 = canonicalize_transfer_function(tf1);
    const auto c2 = canonicalize_transfer_function(tf2);
    if (succeeded(c1) && succeeded(c2)) return std::get<CanonicalParams>(c1) == std::get<CanonicalParams>(c2);
    return tf1 == tf2;
}

// ---------------------------------------------------------------------------
// Technical conditions and fixed points

struct TechnicalConditionsReport {
    bool t1 = false;
    bool t2 = false;
    bool t3 = false;
    /// Nonzero eigenvalues at which zeta0 + zeta2 * lambda vanishes.
    std::vector<double> t2_failing_eigenvalues;
    double w0_sum_norm = 0.0;
    std::vector<std::string> messages;

    bool all() const { return t1 && t2 && t3; }
};

inline constexpr double kT2Tol = 1e-9;
inline constexpr double kT3Tol = 1e-12;

namespace detail {

inline bool t2_singular_at(const CanonicalParams& p, double lambda) {
    const double z0 = to_double(p.zeta0), z2 = to_double(p.zeta2);
    const double scale = std::max(1.0, std::abs(z0) + std::abs(z2) * std::abs(lambda));
    return std::abs(z0 + z2 * lambda) <= kT2Tol * scale;
}

inline TechnicalConditionsReport t1_t2(const CanonicalParams& p, const LaplacianGraph& g) {
    TechnicalConditionsReport rep;
    rep.t1 = p.alpha != 0;
    if (!rep.t1) rep.messages.push_back("T1 fails: alpha = 0");
    // (zeta0 I + zeta2 L) w = alpha u is solvable for every u with 1'u = 0 iff
    // the operator is invertible on the complement of the consensus direction.
    for (Eigen::Index k = 1; k < g.eigenvalues().size(); ++k) {
        const double lam = g.eigenvalues()(k);
        if (t2_singular_at(p, lam)) rep.t2_failing_eigenvalues.push_back(lam);
    }
    rep.t2 = rep.t2_failing_eigenvalues.empty();
    if (!rep.t2)
        rep.messages.push_back("T2 fails: zeta0 + zeta2*lambda = 0 at lambda = " +
                               std::to_string(rep.t2_failing_eigenvalues.front()));
    return rep;
}

}  // namespace detail

/// T1: alpha != 0. T2: zeta0 + zeta2*lambda != 0 for every nonzero eigenvalue.
/// T3: zeta0 = 0 or the initial w sums to zero (|sum| <= 1e-12).
inline TechnicalConditionsReport check_technical_conditions(const CanonicalParams& p, const LaplacianGraph& g,
                                                            const Eigen::VectorXd& w0_sum) {
    TechnicalConditionsReport rep = detail::t1_t2(p, g);
    rep.w0_sum_norm = w0_sum.norm();
    rep.t3 = p.zeta0 == 0 || rep.w0_sum_norm <= kT3Tol;
    if (!rep.t3) rep.messages.push_back("T3 fails: zeta0 != 0 and sum of w0 has norm " + std::to_string(rep.w0_sum_norm));
    return rep;
}

/// Exact T3 for rational initializations.
inline TechnicalConditionsReport check_technical_conditions(const CanonicalParams& p, const LaplacianGraph& g,
                                                            const std::vector<Rational>& w0_sum) {
    TechnicalConditionsReport rep = detail::t1_t2(p, g);
    bool zero_sum = true;
    double sq = 0.0;
    for (const auto& v : w0_sum) {
        zero_sum = zero_sum && v == 0;
        sq += to_double(v) * to_double(v);
    }
    rep.w0_sum_norm = std::sqrt(sq);
    rep.t3 = p.zeta0 == 0 || zero_sum;
    if (!rep.t3) rep.messages.push_back("T3 fails: zeta0 != 0 and sum of w0 is nonzero");
    return rep;
}

/// Per-agent fixed point; every field is n x d with agent i in row i.
struct FixedPoint {
    Eigen::MatrixXd x, w, v1, v2, y, u;
    double residual = 0.0;  // || zeta0 w + zeta2 L w - alpha u ||_F
};

/// Builds the optimal fixed point: v1 = 0, y = x = x_star, u = gradients at
/// x_star, w the minimum-norm solution of zeta0 w + zeta2 L w = alpha u
/// (no consensus component), and v2 = L w.
inline FixedPoint construct_fixed_point(const CanonicalParams& p, const LaplacianGraph& g,
                                        const Eigen::VectorXd& x_star, const Eigen::MatrixXd& grads_at_xstar) {
    const auto n = static_cast<Eigen::Index>(g.n());
    const Eigen::Index d = x_star.size();
    if (grads_at_xstar.rows() != n || grads_at_xstar.cols() != d)
        throw Error(ErrorKind::DimensionMismatch, "gradients must be n x d");
    const double imbalance = grads_at_xstar.colwise().sum().norm();
    if (imbalance > 1e-9)
        throw Error(ErrorKind::GradientsNotBalanced, "sum of gradients at x_star has norm " + std::to_string(imbalance));
    const auto tc = detail::t1_t2(p, g);
    if (!tc.t1) throw Error(ErrorKind::T1Violated, "alpha = 0");
    if (!tc.t2) throw Error(ErrorKind::T2Violated, tc.messages.back());

    const double alpha = to_double(p.alpha), z0 = to_double(p.zeta0), z2 = to_double(p.zeta2);
    const Eigen::MatrixXd rhs = alpha * grads_at_xstar;
    const Eigen::MatrixXd& v = g.eigenvectors();
    const Eigen::MatrixXd v_perp = v.rightCols(n - 1);
    Eigen::VectorXd inv_diag(n - 1);
    for (Eigen::Index k = 1; k < n; ++k) inv_diag(k - 1) = 1.0 / (z0 + z2 * g.eigenvalues()(k));

    FixedPoint fp;
    fp.w = v_perp * inv_diag.asDiagonal() * (v_perp.transpose() * rhs);
    fp.x = x_star.transpose().replicate(n, 1);
    fp.y = fp.x;
    fp.u = grads_at_xstar;
    fp.v1 = Eigen::MatrixXd::Zero(n, d);
    fp.v2 = g.L() * fp.w;
    fp.residual = (z0 * fp.w + z2 * fp.v2 - rhs).norm();
    return fp;
}

// ---------------------------------------------------------------------------
// Single-state impossibility

struct SingleStateCertificate {
    /// A0 = 1 and B0*C0 != 0: the lambda = 0 system has a pole at z = 1.
    bool pole_condition = false;
    /// (C0 + l C1)(B0 + l B1) vanishes identically: zero at z = 1 for all l != 0.
    bool zero_condition = false;
    LambdaPoly numerator;  // (C0 + l C1)(B0 + l B1)
    std::string detail;

    /// Both conditions can never hold together.
    bool infeasible() const { return !(pole_condition && zero_condition); }
};

inline SingleStateCertificate single_state_infeasible(const StructuredRealization& r) {
    r.check_dimensions();
    if (r.s != 1) throw Error(ErrorKind::WrongStateDimension, "single-state check needs s = 1, got " + std::to_string(r.s));
    if (r.D0 != 0 || r.D1 != 0) throw Error(ErrorKind::NonzeroPassthrough, "single-state check needs D0 = D1 = 0");

    SingleStateCertificate c;
    const Rational &a0 = r.A0(0, 0), &b0 = r.B0(0, 0), &b1 = r.B1(0, 0), &c0 = r.C0(0, 0), &c1 = r.C1(0, 0);
    c.numerator = (lambda_const(c0) + lambda_var() * c1) * (lambda_const(b0) + lambda_var() * b1);
    c.pole_condition = a0 == 1 && b0 * c0 != 0;
    c.zero_condition = c.numerator.is_zero();
    if (c.pole_condition && c.zero_condition) {
        // Unreachable: the pole condition makes B0*C0, the constant term of the numerator, nonzero.
        c.detail = "internal contradiction";
    } else if (!c.pole_condition && !c.zero_condition) {
        c.detail = "both fail: no pole at z = 1 for lambda = 0 and no zero at z = 1 for lambda != 0";
    } else if (c.pole_condition) {
        c.detail = "zero condition fails: numerator " + to_string(c.numerator) +
                   " is not identically zero (B0*C0 != 0 forces a nonzero constant term)";
    } else {
        c.detail = a0 != 1 ? "pole condition fails: A0 = " + to_string(a0) + " != 1"
                           : std::string("pole condition fails: B0*C0 = 0, gain at lambda = 0 vanishes");
    }
    return c;
}

}  // namespace canform
