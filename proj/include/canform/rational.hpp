#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <string>
#include <string_view>

#include "canform/error.hpp"

namespace canform {

/// Exact rational scalar. Always stored in lowest terms with a positive
/// denominator; zero is 0/1.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

namespace detail {

inline bool is_integer_literal(std::string_view s) {
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline BigInt parse_bigint(std::string_view s) {
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    BigInt value = 0;
    for (char c : s) value = value * 10 + (c - '0');
    return negative ? BigInt(-value) : value;
}

}  // namespace detail

/// Parses "p/q" or "p". Decimals are rejected so that exact-path inputs stay exact.
inline Rational parse_rational(std::string_view text) {
    const std::string_view s = detail::trim(text);
    const auto slash = s.find('/');
    if (slash == std::string_view::npos) {
        if (!detail::is_integer_literal(s))
            throw Error(ErrorKind::ParseError, "not a rational literal: '" + std::string(text) + "'");
        return Rational(detail::parse_bigint(s));
    }
    const auto num = detail::trim(s.substr(0, slash));
    const auto den = detail::trim(s.substr(slash + 1));
    if (!detail::is_integer_literal(num) || !detail::is_integer_literal(den) || den.front() == '-' ||
        den.front() == '+')
        throw Error(ErrorKind::ParseError, "not a rational literal: '" + std::string(text) + "'");
    const BigInt d = detail::parse_bigint(den);
    if (d == 0) throw Error(ErrorKind::ZeroDenominator, "in '" + std::string(text) + "'");
    return Rational(detail::parse_bigint(num), d);
}

/// Accepts everything parse_rational does plus terminating decimals such as
/// "-0.25" or "1e-3", converted exactly.
inline Rational parse_rational_or_decimal(std::string_view text) {
    const std::string_view s = detail::trim(text);
    if (s.find('/') != std::string_view::npos || detail::is_integer_literal(s)) return parse_rational(s);

    std::string_view mantissa = s;
    long exponent = 0;
    if (const auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        const auto exp_text = s.substr(e + 1);
        if (!detail::is_integer_literal(exp_text))
            throw Error(ErrorKind::ParseError, "not a number: '" + std::string(text) + "'");
        exponent = std::stol(std::string(exp_text));
        mantissa = s.substr(0, e);
    }
    bool negative = false;
    if (!mantissa.empty() && (mantissa.front() == '-' || mantissa.front() == '+')) {
        negative = mantissa.front() == '-';
        mantissa.remove_prefix(1);
    }
    const auto dot = mantissa.find('.');
    std::string digits(mantissa.substr(0, dot));
    if (dot != std::string_view::npos) {
        const auto frac = mantissa.substr(dot + 1);
        digits += frac;
        exponent -= static_cast<long>(frac.size());
    }
    if (digits.empty() || !detail::is_integer_literal(digits))
        throw Error(ErrorKind::ParseError, "not a number: '" + std::string(text) + "'");

    Rational value(detail::parse_bigint(digits));
    const BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
    value = exponent < 0 ? Rational(value / scale) : Rational(value * scale);
    return negative ? Rational(-value) : value;
}

/// "p/q", or "p" when q = 1.
inline std::string to_string(const Rational& r) {
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace canform
