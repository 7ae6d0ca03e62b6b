#pragma once

#include <complex>
#include <string>

#include "canform/error.hpp"
#include "canform/poly.hpp"

namespace canform {

/// Reduced rational function num(z, lambda) / den(z, lambda).
///
/// Representation invariants, established by reduce():
///  - num and den are coprime in Q(lambda)[z];
///  - the pair carries no common lambda-polynomial content;
///  - the leading z-coefficient of den is monic in lambda. For every transfer
///    function of a state-space realization this makes den monic in z, since
///    det(zI - A(lambda)) is monic in z.
/// Under these invariants two equal rational functions have identical fields.
class BivarRatFun {
public:
    BivarRatFun() : num_(), den_(bivar_const(lambda_const(1))) {}

    static BivarRatFun reduce(const BivarPoly& num, const BivarPoly& den);

    const BivarPoly& num() const { return num_; }
    const BivarPoly& den() const { return den_; }

    friend bool operator==(const BivarRatFun&, const BivarRatFun&) = default;

private:
    BivarRatFun(BivarPoly num, BivarPoly den) : num_(std::move(num)), den_(std::move(den)) {}

    BivarPoly num_;
    BivarPoly den_;
};

inline BivarRatFun BivarRatFun::reduce(const BivarPoly& num, const BivarPoly& den) {
    if (den.is_zero()) throw Error(ErrorKind::ZeroDenominator, "rational function with zero denominator");
    if (num.is_zero()) return BivarRatFun{};

    const BivarPoly g = gcd_z(num, den);
    BivarPoly n = divide_exact(num, g);
    BivarPoly d = divide_exact(den, g);

    const LambdaPoly c = gcd(content(n), content(d));
    n = divide_coefficients(n, c);
    d = divide_coefficients(d, c);

    const Rational s = 1 / d.leading().leading();
    return BivarRatFun(scale(n, s), scale(d, s));
}

inline BivarRatFun ratfun_reduce(const BivarPoly& num, const BivarPoly& den) {
    return BivarRatFun::reduce(num, den);
}

inline BivarPoly poly_gcd_z(const BivarPoly& p, const BivarPoly& q) { return gcd_z(p, q); }

/// Floating evaluation at (z0, lambda0).
inline std::complex<double> ratfun_eval(const BivarRatFun& f, std::complex<double> z0, double lambda0) {
    const std::complex<double> d = evaluate(f.den(), z0, lambda0);
    if (std::abs(d) <= 1e-12)
        throw Error(ErrorKind::PoleAtEvaluationPoint,
                    "denominator vanishes at z = (" + std::to_string(z0.real()) + ", " + std::to_string(z0.imag()) +
                        "), lambda = " + std::to_string(lambda0));
    return evaluate(f.num(), z0, lambda0) / d;
}

inline std::string format(const BivarRatFun& f) { return "(" + format(f.num()) + ") / (" + format(f.den()) + ")"; }

}  // namespace canform
