#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "canform/error.hpp"
#include "canform/rational.hpp"

namespace canform {

template <class T>
struct RingTraits {
    static T one() { return T(1); }
};

/// Dense univariate polynomial with coefficients in a commutative ring T.
/// Coefficient i multiplies x^i. The highest stored coefficient is never zero,
/// so the zero polynomial is the empty list.
template <class T>
class Poly {
public:
    using coefficient_type = T;

    Poly() = default;
    explicit Poly(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }

    static Poly constant(T value) { return Poly(std::vector<T>{std::move(value)}); }

    static Poly monomial(T value, std::size_t degree) {
        std::vector<T> c(degree + 1);
        c[degree] = std::move(value);
        return Poly(std::move(c));
    }

    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    std::size_t size() const { return c_.size(); }

    const T& leading() const { return c_.back(); }
    T coeff(std::size_t i) const { return i < c_.size() ? c_[i] : T{}; }
    std::span<const T> coefficients() const { return c_; }

    friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }

    Poly operator-() const {
        std::vector<T> c(c_.size());
        for (std::size_t i = 0; i < c_.size(); ++i) c[i] = -c_[i];
        return Poly(std::move(c));
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<T> c(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) + b.coeff(i);
        return Poly(std::move(c));
    }

    friend Poly operator-(const Poly& a, const Poly& b) {
        std::vector<T> c(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) - b.coeff(i);
        return Poly(std::move(c));
    }

    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<T> c(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i] == T{}) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] = c[i + j] + a.c_[i] * b.c_[j];
        }
        return Poly(std::move(c));
    }

    /// Multiplies every coefficient by a ring element.
    friend Poly operator*(const Poly& a, const T& s) {
        std::vector<T> c(a.c_.size());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.c_[i] * s;
        return Poly(std::move(c));
    }
    friend Poly operator*(const T& s, const Poly& a) { return a * s; }

    Poly& operator+=(const Poly& o) { return *this = *this + o; }
    Poly& operator-=(const Poly& o) { return *this = *this - o; }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    /// Horner evaluation at a point of any type that T multiplies into.
    template <class U, class Convert>
    U evaluate(const U& x, Convert convert) const {
        U acc{};
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + convert(*it);
        return acc;
    }

    /// Applies f to every coefficient, building a polynomial over the result type.
    template <class F>
    auto map(F f) const -> Poly<decltype(f(std::declval<const T&>()))> {
        using R = decltype(f(std::declval<const T&>()));
        std::vector<R> c;
        c.reserve(c_.size());
        for (const auto& v : c_) c.push_back(f(v));
        return Poly<R>(std::move(c));
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == T{}) c_.pop_back();
    }

    std::vector<T> c_;
};

template <class U>
struct RingTraits<Poly<U>> {
    static Poly<U> one() { return Poly<U>::constant(RingTraits<U>::one()); }
};

template <class T>
Poly<T> pow(const Poly<T>& base, unsigned exponent) {
    Poly<T> result = RingTraits<Poly<T>>::one();
    for (unsigned i = 0; i < exponent; ++i) result *= base;
    return result;
}

/// Polynomial in the Laplacian eigenvalue with exact rational coefficients.
using LambdaPoly = Poly<Rational>;

/// Polynomial in the shift variable z whose coefficients are LambdaPolys.
using BivarPoly = Poly<LambdaPoly>;

inline LambdaPoly lambda_var() { return LambdaPoly::monomial(Rational(1), 1); }

inline LambdaPoly lambda_const(const Rational& r) { return LambdaPoly::constant(r); }

inline BivarPoly z_var() { return BivarPoly::monomial(lambda_const(1), 1); }

inline BivarPoly bivar_const(const LambdaPoly& p) { return BivarPoly::constant(p); }

// ---------------------------------------------------------------------------
// Q[lambda]: Euclidean domain operations.

inline LambdaPoly scale(const LambdaPoly& p, const Rational& s) { return p * s; }

inline LambdaPoly make_monic(const LambdaPoly& p) {
    if (p.is_zero()) return p;
    return p * Rational(1 / p.leading());
}

/// Returns {q, r} with a = q*b + r and deg r < deg b.
inline std::pair<LambdaPoly, LambdaPoly> divmod(const LambdaPoly& a, const LambdaPoly& b) {
    if (b.is_zero()) throw Error(ErrorKind::ZeroDenominator, "polynomial division by zero");
    std::vector<Rational> rem(a.coefficients().begin(), a.coefficients().end());
    const int db = b.degree();
    const int da = a.degree();
    if (da < db) return {LambdaPoly{}, a};
    std::vector<Rational> quo(static_cast<std::size_t>(da - db + 1));
    const Rational inv_lead = 1 / b.leading();
    for (int k = da - db; k >= 0; --k) {
        const Rational q = rem[static_cast<std::size_t>(k + db)] * inv_lead;
        quo[static_cast<std::size_t>(k)] = q;
        if (q == 0) continue;
        for (int j = 0; j <= db; ++j) rem[static_cast<std::size_t>(k + j)] -= q * b.coeff(static_cast<std::size_t>(j));
    }
    rem.resize(static_cast<std::size_t>(db));
    return {LambdaPoly(std::move(quo)), LambdaPoly(std::move(rem))};
}

/// a / b, which must divide exactly.
inline LambdaPoly divide_exact(const LambdaPoly& a, const LambdaPoly& b) {
    auto [q, r] = divmod(a, b);
    if (!r.is_zero()) throw Error(ErrorKind::ZeroDenominator, "inexact polynomial division in Q[lambda]");
    return q;
}

/// Monic gcd; zero only when both inputs are zero.
inline LambdaPoly gcd(LambdaPoly a, LambdaPoly b) {
    while (!b.is_zero()) {
        auto r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return make_monic(a);
}

inline Rational evaluate(const LambdaPoly& p, const Rational& x) {
    return p.evaluate(x, [](const Rational& c) { return c; });
}

inline double evaluate(const LambdaPoly& p, double x) {
    return p.evaluate(x, [](const Rational& c) { return to_double(c); });
}

// ---------------------------------------------------------------------------
// Q[lambda][z]

/// gcd of all z-coefficients in Q[lambda], monic; zero for the zero polynomial.
inline LambdaPoly content(const BivarPoly& p) {
    LambdaPoly g;
    for (const auto& c : p.coefficients()) {
        g = gcd(g, c);
        if (g.degree() == 0) break;
    }
    return g;
}

inline int lambda_degree(const BivarPoly& p) {
    int d = -1;
    for (const auto& c : p.coefficients()) d = std::max(d, c.degree());
    return d;
}

inline BivarPoly divide_coefficients(const BivarPoly& p, const LambdaPoly& d) {
    return p.map([&](const LambdaPoly& c) { return divide_exact(c, d); });
}

inline BivarPoly scale(const BivarPoly& p, const Rational& s) {
    return p.map([&](const LambdaPoly& c) { return c * s; });
}

/// Pseudo-division: lc(b)^(deg a - deg b + 1) * a = q*b + r with deg r < deg b.
inline std::pair<BivarPoly, BivarPoly> pseudo_divmod(const BivarPoly& a, const BivarPoly& b) {
    if (b.is_zero()) throw Error(ErrorKind::ZeroDenominator, "pseudo-division by zero");
    const int db = b.degree();
    if (a.degree() < db) return {BivarPoly{}, a};
    const LambdaPoly& lb = b.leading();
    BivarPoly r = a;
    BivarPoly q;
    int e = a.degree() - db + 1;
    while (!r.is_zero() && r.degree() >= db) {
        const auto shift = static_cast<std::size_t>(r.degree() - db);
        const BivarPoly t = BivarPoly::monomial(r.leading(), shift);
        q = q * bivar_const(lb) + t;
        r = r * bivar_const(lb) - t * b;
        --e;
    }
    const BivarPoly factor = bivar_const(pow(lb, static_cast<unsigned>(e)));
    return {q * factor, r * factor};
}

inline BivarPoly pseudo_remainder(const BivarPoly& a, const BivarPoly& b) { return pseudo_divmod(a, b).second; }

/// a / b in Q[lambda][z]; the division must be exact with a polynomial quotient.
inline BivarPoly divide_exact(const BivarPoly& a, const BivarPoly& b) {
    if (b.is_zero()) throw Error(ErrorKind::ZeroDenominator, "division by the zero polynomial");
    const int db = b.degree();
    BivarPoly r = a;
    BivarPoly q;
    while (!r.is_zero()) {
        if (r.degree() < db) throw Error(ErrorKind::ZeroDenominator, "inexact polynomial division in z");
        const LambdaPoly lead = divide_exact(r.leading(), b.leading());
        const BivarPoly t = BivarPoly::monomial(lead, static_cast<std::size_t>(r.degree() - db));
        q += t;
        r -= t * b;
    }
    return q;
}

/// Removes the lambda-content and scales so that the leading z-coefficient is
/// monic in lambda. Unique representative of p up to units of Q(lambda).
inline BivarPoly normalize_primitive(const BivarPoly& p) {
    if (p.is_zero()) return p;
    BivarPoly q = divide_coefficients(p, content(p));
    return scale(q, Rational(1 / q.leading().leading()));
}

/// gcd in Q(lambda)[z] via the subresultant pseudo-remainder sequence, returned
/// as a primitive element of Q[lambda][z] (see normalize_primitive).
inline BivarPoly gcd_z(BivarPoly a, BivarPoly b) {
    if (a.is_zero() && b.is_zero()) throw Error(ErrorKind::ZeroDenominator, "gcd of two zero polynomials");
    if (a.degree() < b.degree()) std::swap(a, b);
    if (b.is_zero()) return normalize_primitive(a);
    if (b.degree() == 0) return bivar_const(lambda_const(1));

    a = normalize_primitive(a);
    b = normalize_primitive(b);
    LambdaPoly g = lambda_const(1);
    LambdaPoly h = lambda_const(1);
    for (;;) {
        const int delta = a.degree() - b.degree();
        BivarPoly r = pseudo_remainder(a, b);
        if (r.is_zero()) return normalize_primitive(b);
        if (r.degree() == 0) return bivar_const(lambda_const(1));
        const LambdaPoly divisor = g * pow(h, static_cast<unsigned>(delta));
        a = std::move(b);
        b = divide_coefficients(r, divisor);
        g = a.leading();
        if (delta == 0) continue;
        h = divide_exact(pow(g, static_cast<unsigned>(delta)), pow(h, static_cast<unsigned>(delta - 1)));
    }
}

/// Substitutes lambda, leaving a polynomial in z.
inline LambdaPoly substitute_lambda(const BivarPoly& p, const Rational& lambda) {
    return p.map([&](const LambdaPoly& c) { return evaluate(c, lambda); });
}

inline Poly<double> substitute_lambda(const BivarPoly& p, double lambda) {
    std::vector<double> c;
    for (const auto& coef : p.coefficients()) c.push_back(evaluate(coef, lambda));
    // Poly<double> trims exact zeros only; callers handle near-zero leading terms.
    return Poly<double>(std::move(c));
}

/// Substitutes z, leaving a polynomial in lambda.
inline LambdaPoly substitute_z(const BivarPoly& p, const Rational& z) {
    LambdaPoly acc;
    for (int i = p.degree(); i >= 0; --i) acc = acc * z + p.coeff(static_cast<std::size_t>(i));
    return acc;
}

inline std::complex<double> evaluate(const BivarPoly& p, std::complex<double> z, double lambda) {
    std::complex<double> acc{};
    for (int i = p.degree(); i >= 0; --i) acc = acc * z + evaluate(p.coeff(static_cast<std::size_t>(i)), lambda);
    return acc;
}

// ---------------------------------------------------------------------------
// Serialization: coefficient lists, lowest degree first.

inline std::string to_string(const LambdaPoly& p) {
    std::string out = "[";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += ", ";
        out += to_string(p.coefficients()[i]);
    }
    return out + "]";
}

inline std::string to_string(const BivarPoly& p) {
    std::string out = "[";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += ", ";
        out += to_string(p.coefficients()[i]);
    }
    return out + "]";
}

namespace detail {

inline std::string format_term(const Rational& c, const std::string& var_part, bool first) {
    std::string out;
    Rational mag = c;
    if (c < 0) {
        out += first ? "-" : " - ";
        mag = -c;
    } else if (!first) {
        out += " + ";
    }
    if (var_part.empty()) return out + to_string(mag);
    if (mag != 1) out += to_string(mag) + "*";
    return out + var_part;
}

inline std::string power(const char* var, std::size_t k) {
    if (k == 0) return "";
    if (k == 1) return var;
    return std::string(var) + "^" + std::to_string(k);
}

}  // namespace detail

/// Human-readable expansion, e.g. "z^2 - 2*z + lambda*z + 1".
inline std::string format(const BivarPoly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (int i = p.degree(); i >= 0; --i) {
        const auto& c = p.coefficients()[static_cast<std::size_t>(i)];
        for (int j = c.degree(); j >= 0; --j) {
            const Rational& v = c.coefficients()[static_cast<std::size_t>(j)];
            if (v == 0) continue;
            std::string vars = detail::power("z", static_cast<std::size_t>(i));
            const std::string lam = detail::power("lambda", static_cast<std::size_t>(j));
            if (!lam.empty()) vars = vars.empty() ? lam : vars + "*" + lam;
            out += detail::format_term(v, vars, first);
            first = false;
        }
    }
    return out;
}

}  // namespace canform
