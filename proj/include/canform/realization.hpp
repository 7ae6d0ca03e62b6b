#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "canform/error.hpp"
#include "canform/matrix.hpp"
#include "canform/poly.hpp"
#include "canform/ratfun.hpp"

namespace canform {

/// Per-agent linear dynamics of a first-order distributed algorithm, d = 1:
///
///   xi_i+  = A0 xi_i + B0 u_i + sum_j L_ij (A1 xi_j + B1 u_j)
///   y_i    = C0 xi_i + D0 u_i + sum_j L_ij (C1 xi_j + D1 u_j)
///
/// The state dimension s is unbounded; membership in the two-state class is a
/// diagnostic (validate_class), not a construction-time restriction.
struct StructuredRealization {
    std::size_t s = 0;
    RationalMatrix A0, A1;  // s x s
    RationalMatrix B0, B1;  // s x 1
    RationalMatrix C0, C1;  // 1 x s
    Rational D0 = 0, D1 = 0;

    static StructuredRealization zeros(std::size_t s) {
        return {s, RationalMatrix(s, s), RationalMatrix(s, s), RationalMatrix(s, 1), RationalMatrix(s, 1),
                RationalMatrix(1, s), RationalMatrix(1, s), 0, 0};
    }

    void check_dimensions() const {
        auto expect = [](const RationalMatrix& m, std::size_t r, std::size_t c, const char* name) {
            if (m.rows() != r || m.cols() != c)
                throw Error(ErrorKind::DimensionMismatch, std::string(name) + " must be " + std::to_string(r) + "x" +
                                                              std::to_string(c));
        };
        if (s == 0) throw Error(ErrorKind::DimensionMismatch, "state dimension must be positive");
        expect(A0, s, s, "A0");
        expect(A1, s, s, "A1");
        expect(B0, s, 1, "B0");
        expect(B1, s, 1, "B1");
        expect(C0, 1, s, "C0");
        expect(C1, 1, s, "C1");
    }

    friend bool operator==(const StructuredRealization&, const StructuredRealization&) = default;
};

namespace detail {

inline Matrix<LambdaPoly> lambda_affine(const RationalMatrix& m0, const RationalMatrix& m1) {
    Matrix<LambdaPoly> m(m0.rows(), m0.cols());
    for (std::size_t r = 0; r < m0.rows(); ++r)
        for (std::size_t c = 0; c < m0.cols(); ++c)
            m(r, c) = lambda_const(m0(r, c)) + lambda_var() * m1(r, c);
    return m;
}

}  // namespace detail

/// det(zI - A(lambda)) and adj(zI - A(lambda)) = sum_k M_k z^(s-k) from the
/// Faddeev-LeVerrier recursion carried out over Q[lambda].
struct CharacteristicData {
    BivarPoly det;                          // monic in z, degree s
    std::vector<Matrix<LambdaPoly>> adj;    // adj[k-1] = M_k, k = 1..s
};

inline CharacteristicData faddeev_leverrier(const Matrix<LambdaPoly>& a) {
    const std::size_t s = a.rows();
    std::vector<LambdaPoly> c(s + 1);
    c[s] = lambda_const(1);
    CharacteristicData out;
    Matrix<LambdaPoly> m(s, s);
    for (std::size_t k = 1; k <= s; ++k) {
        Matrix<LambdaPoly> next = a * m;
        for (std::size_t i = 0; i < s; ++i) next(i, i) = next(i, i) + c[s - k + 1];
        m = std::move(next);
        out.adj.push_back(m);
        // tr(A M_k) / k is always exact over Q.
        c[s - k] = (a * m).trace() * Rational(-1, static_cast<long>(k));
    }
    out.det = BivarPoly(std::move(c));
    return out;
}

/// Unreduced numerator and denominator of C(l) (zI - A(l))^-1 B(l) + D(l).
inline std::pair<BivarPoly, BivarPoly> transfer_function_unreduced(const StructuredRealization& r) {
    r.check_dimensions();
    const auto a = detail::lambda_affine(r.A0, r.A1);
    const auto b = detail::lambda_affine(r.B0, r.B1);
    const auto c = detail::lambda_affine(r.C0, r.C1);
    const LambdaPoly d = lambda_const(r.D0) + lambda_var() * r.D1;

    const CharacteristicData cd = faddeev_leverrier(a);
    std::vector<LambdaPoly> num(r.s + 1);
    for (std::size_t k = 1; k <= r.s; ++k) num[r.s - k] = (c * cd.adj[k - 1] * b)(0, 0);
    BivarPoly numerator = BivarPoly(std::move(num)) + cd.det * bivar_const(d);
    return {std::move(numerator), cd.det};
}

/// Reduced doubly-indexed transfer function G_lambda(z).
inline BivarRatFun transfer_function(const StructuredRealization& r) {
    auto [num, den] = transfer_function_unreduced(r);
    return BivarRatFun::reduce(num, den);
}

/// Change of state coordinates xi -> T xi.
inline StructuredRealization similarity_transform(const StructuredRealization& r, const RationalMatrix& t) {
    r.check_dimensions();
    if (t.rows() != r.s || t.cols() != r.s)
        throw Error(ErrorKind::DimensionMismatch, "transform must be s x s");
    const RationalMatrix ti = inverse(t);  // throws SingularTransform
    return {r.s, t * r.A0 * ti, t * r.A1 * ti, t * r.B0, t * r.B1, r.C0 * ti, r.C1 * ti, r.D0, r.D1};
}

struct ClassDiagnostics {
    bool state_dim_ok = false;   // s <= 2
    bool passthrough_ok = false; // D0 = D1 = 0
    bool single_comm_ok = false; // B1 = 0 or C1 = 0
    std::vector<std::string> messages;

    bool all_ok() const { return state_dim_ok && passthrough_ok && single_comm_ok; }
};

inline ClassDiagnostics validate_class(const StructuredRealization& r) {
    ClassDiagnostics d;
    d.state_dim_ok = r.s <= 2;
    d.passthrough_ok = r.D0 == 0 && r.D1 == 0;
    d.single_comm_ok = r.B1.is_zero() || r.C1.is_zero();
    if (!d.state_dim_ok)
        d.messages.push_back("state dimension " + std::to_string(r.s) +
                             " exceeds 2; canonicalization is still attempted through the transfer function");
    if (!d.passthrough_ok) d.messages.push_back("nonzero feedthrough D0/D1");
    if (!d.single_comm_ok)
        d.messages.push_back("both B1 and C1 are nonzero: two sequential rounds of communication per iteration");
    return d;
}

/// Replaces L by mu*L, i.e. gossip matrix W = I - mu*L.
inline StructuredRealization scale_laplacian(const StructuredRealization& r, const Rational& mu) {
    StructuredRealization out = r;
    out.A1 = r.A1 * mu;
    out.B1 = r.B1 * mu;
    out.C1 = r.C1 * mu;
    out.D1 = r.D1 * mu;
    return out;
}

}  // namespace canform
