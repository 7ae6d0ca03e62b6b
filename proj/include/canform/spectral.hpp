#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include "canform/canonical.hpp"
#include "canform/graph.hpp"
#include "canform/ratfun.hpp"

namespace canform {

using Complex = std::complex<double>;

struct Root {
    Complex value;
    int multiplicity = 1;
};

enum class StabilityClass { MarginalWithPoleAtOne, StrictlyStableWithZeroAtOne, Violation };

constexpr std::string_view to_string(StabilityClass c) {
    switch (c) {
    case StabilityClass::MarginalWithPoleAtOne: return "MarginalWithPoleAtOne";
    case StabilityClass::StrictlyStableWithZeroAtOne: return "StrictlyStableWithZeroAtOne";
    case StabilityClass::Violation: return "Violation";
    }
    return "Unknown";
}

struct PoleZeroReport {
    double lambda = 0.0;
    std::vector<Root> poles;
    std::vector<Root> zeros;
    bool numerator_vanishes = false;  // G is identically zero at this lambda
    StabilityClass classification = StabilityClass::Violation;
    std::string detail;

    int pole_count() const {
        int c = 0;
        for (const auto& r : poles) c += r.multiplicity;
        return c;
    }
    int zero_count() const {
        int c = 0;
        for (const auto& r : zeros) c += r.multiplicity;
        return c;
    }
};

/// Roots of a real polynomial given lowest-degree-first. Degree <= 2 uses the
/// quadratic formula; higher degrees use the eigenvalues of the companion matrix.
inline std::vector<Complex> polynomial_roots(const std::vector<double>& c) {
    const auto deg = static_cast<int>(c.size()) - 1;
    if (deg <= 0) return {};
    if (deg == 1) return {Complex(-c[0] / c[1], 0.0)};
    if (deg == 2) {
        const double a = c[2], b = c[1], cc = c[0];
        const double disc = b * b - 4.0 * a * cc;
        if (disc >= 0.0) {
            const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
            if (q == 0.0) return {Complex(0.0, 0.0), Complex(0.0, 0.0)};
            return {Complex(q / a, 0.0), Complex(cc / q, 0.0)};
        }
        const double re = -b / (2.0 * a);
        const double im = std::sqrt(-disc) / (2.0 * std::abs(a));
        return {Complex(re, im), Complex(re, -im)};
    }
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[static_cast<std::size_t>(i)] / c[static_cast<std::size_t>(deg)];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    std::vector<Complex> out;
    for (int i = 0; i < deg; ++i) out.push_back(es.eigenvalues()(i));
    return out;
}

namespace detail {

/// Coefficients in z after substituting lambda; a coefficient whose value is
/// below 1e-12 of the magnitude of its own terms is treated as zero.
inline std::vector<double> substitute_trimmed(const BivarPoly& p, double lambda) {
    std::vector<double> out;
    for (const auto& coef : p.coefficients()) {
        double value = 0.0, scale = 0.0, pw = 1.0;
        for (const auto& r : coef.coefficients()) {
            const double t = to_double(r) * pw;
            value += t;
            scale += std::abs(t);
            pw *= lambda;
        }
        out.push_back(std::abs(value) <= 1e-12 * scale ? 0.0 : value);
    }
    while (!out.empty() && out.back() == 0.0) out.pop_back();
    return out;
}

inline std::vector<Root> group_roots(std::vector<Complex> roots, double tol) {
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    std::vector<Root> out;
    for (const auto& r : roots) {
        auto it = std::find_if(out.begin(), out.end(), [&](const Root& g) { return std::abs(g.value - r) <= tol; });
        if (it != out.end())
            ++it->multiplicity;
        else
            out.push_back({r, 1});
    }
    return out;
}

}  // namespace detail

/// Poles and zeros of G_lambda(z) at a fixed eigenvalue, classified against the
/// necessary conditions for convergence to an optimal fixed point:
///  - lambda = 0: exactly one pole within tol of z = 1, every pole in
///    |z| <= 1 + tol, and poles on the unit circle simple;
///  - lambda > 0: a zero within tol of z = 1 and every pole in |z| < 1 - tol.
inline PoleZeroReport pole_zero_report(const BivarRatFun& f, double lambda, double tol = 1e-9) {
    PoleZeroReport rep;
    rep.lambda = lambda;
    const auto num = detail::substitute_trimmed(f.num(), lambda);
    const auto den = detail::substitute_trimmed(f.den(), lambda);
    rep.numerator_vanishes = num.empty();

    std::vector<Complex> zeros = polynomial_roots(num);
    std::vector<Complex> poles = polynomial_roots(den);
    // Cancel numerically common roots.
    for (auto zi = zeros.begin(); zi != zeros.end();) {
        auto best = poles.end();
        double best_dist = tol;
        for (auto pi = poles.begin(); pi != poles.end(); ++pi) {
            const double dist = std::abs(*pi - *zi);
            if (dist <= best_dist) {
                best = pi;
                best_dist = dist;
            }
        }
        if (best != poles.end()) {
            poles.erase(best);
            zi = zeros.erase(zi);
        } else {
            ++zi;
        }
    }
    rep.poles = detail::group_roots(poles, tol);
    rep.zeros = detail::group_roots(zeros, tol);

    const bool at_zero = std::abs(lambda) <= tol;
    if (at_zero) {
        int at_one = 0;
        for (const auto& p : rep.poles) {
            if (std::abs(p.value - 1.0) <= tol) at_one += p.multiplicity;
            if (std::abs(p.value) > 1.0 + tol) {
                rep.detail = "unstable pole |z| = " + std::to_string(std::abs(p.value));
                return rep;
            }
            if (std::abs(std::abs(p.value) - 1.0) <= tol && p.multiplicity > 1) {
                rep.detail = "repeated pole on the unit circle";
                return rep;
            }
        }
        if (at_one != 1) {
            rep.detail = "expected exactly one pole at z = 1, found " + std::to_string(at_one);
            return rep;
        }
        rep.classification = StabilityClass::MarginalWithPoleAtOne;
        return rep;
    }

    for (const auto& p : rep.poles)
        if (std::abs(p.value) >= 1.0 - tol) {
            rep.detail = "pole with |z| = " + std::to_string(std::abs(p.value)) + " is not strictly stable";
            return rep;
        }
    const bool zero_at_one =
        rep.numerator_vanishes ||
        std::any_of(rep.zeros.begin(), rep.zeros.end(), [&](const Root& z) { return std::abs(z.value - 1.0) <= tol; });
    if (!zero_at_one) {
        rep.detail = "no zero at z = 1";
        return rep;
    }
    rep.classification = StabilityClass::StrictlyStableWithZeroAtOne;
    return rep;
}

/// True when the numerator vanishes at z = 1 for every lambda (exact check).
inline bool has_zero_at_one_symbolically(const BivarRatFun& f) { return substitute_z(f.num(), Rational(1)).is_zero(); }

struct Lemma1Result {
    std::vector<PoleZeroReport> reports;  // one per distinct eigenvalue, ascending
    bool symbolic_zero_at_one = false;
    bool pass = false;

    std::vector<double> failing_eigenvalues() const {
        std::vector<double> out;
        for (const auto& r : reports)
            if (r.classification == StabilityClass::Violation) out.push_back(r.lambda);
        return out;
    }
};

/// Distinct eigenvalues (ascending), merging values within 1e-9.
inline std::vector<double> distinct_eigenvalues(const LaplacianGraph& g) {
    std::vector<double> out;
    for (Eigen::Index k = 0; k < g.eigenvalues().size(); ++k) {
        const double v = g.eigenvalues()(k);
        if (out.empty() || v - out.back() > 1e-9) out.push_back(v);
    }
    return out;
}

/// Checks every eigenvalue: lambda_1 = 0 must be MarginalWithPoleAtOne and all
/// others StrictlyStableWithZeroAtOne.
inline Lemma1Result lemma1_check(const BivarRatFun& tf, const LaplacianGraph& g, double tol = 1e-9) {
    Lemma1Result res;
    res.symbolic_zero_at_one = has_zero_at_one_symbolically(tf);
    res.pass = true;
    for (double lam : distinct_eigenvalues(g)) {
        res.reports.push_back(pole_zero_report(tf, lam, tol));
        const auto want = res.reports.size() == 1 ? StabilityClass::MarginalWithPoleAtOne
                                                  : StabilityClass::StrictlyStableWithZeroAtOne;
        res.pass = res.pass && res.reports.back().classification == want;
    }
    return res;
}

inline Lemma1Result lemma1_check(const CanonicalParams& p, const LaplacianGraph& g, double tol = 1e-9) {
    return lemma1_check(canonical_transfer_function(p), g, tol);
}

/// Validates a raw Laplacian first; InvalidLaplacian when it fails.
inline Lemma1Result lemma1_check(const CanonicalParams& p, const Eigen::MatrixXd& l, double tol = 1e-9) {
    return lemma1_check(p, LaplacianGraph::from_matrix(l), tol);
}

inline std::string format(const Complex& c) {
    char buf[64];
    if (c.imag() == 0.0)
        std::snprintf(buf, sizeof buf, "%.6g", c.real());
    else
        std::snprintf(buf, sizeof buf, "%.6g%+.6gi", c.real(), c.imag());
    return buf;
}

inline std::string format(const std::vector<Root>& roots) {
    std::string out = "{";
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (i) out += ", ";
        out += format(roots[i].value);
        if (roots[i].multiplicity > 1) out += " (x" + std::to_string(roots[i].multiplicity) + ")";
    }
    return out + "}";
}

}  // namespace canform
