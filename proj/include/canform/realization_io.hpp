#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "canform/error.hpp"
#include "canform/realization.hpp"

namespace canform {

// Realization files are key-value text:
//
//   s  = 2
//   A0 = 1 1/2; 0 1        (row-major, rows separated by ';')
//   B0 = -1/10 0           (s entries)
//   C0 = 1 0               (s entries)
//   D0 = 0
//
// with the same layout for A1, B1, C1, D1. Lines starting with '#' or ';' are
// comments. Writing then reading reproduces the realization exactly, and
// writing a parsed file reproduces the canonical text byte for byte.

namespace detail {

inline std::vector<std::string> split_tokens(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!text.empty() && text.back() == sep) out.emplace_back();
    return out;
}

inline std::vector<Rational> parse_rational_list(const std::string& text) {
    std::vector<Rational> out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) out.push_back(parse_rational(tok));
    return out;
}

inline RationalMatrix parse_matrix_field(const std::string& text, std::size_t rows, std::size_t cols,
                                         const std::string& name) {
    const auto row_texts = split_tokens(text, ';');
    if (row_texts.size() != rows)
        throw Error(ErrorKind::ParseError, name + ": expected " + std::to_string(rows) + " rows");
    RationalMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto vals = parse_rational_list(row_texts[r]);
        if (vals.size() != cols)
            throw Error(ErrorKind::ParseError, name + ": row " + std::to_string(r) + " needs " +
                                                   std::to_string(cols) + " entries");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = vals[c];
    }
    return m;
}

inline RationalMatrix parse_vector_field(const std::string& text, std::size_t s, bool column,
                                         const std::string& name) {
    const auto vals = parse_rational_list(text);
    if (vals.size() != s)
        throw Error(ErrorKind::ParseError, name + ": expected " + std::to_string(s) + " entries");
    RationalMatrix m = column ? RationalMatrix(s, 1) : RationalMatrix(1, s);
    for (std::size_t i = 0; i < s; ++i) (column ? m(i, 0) : m(0, i)) = vals[i];
    return m;
}

inline std::string format_matrix_field(const RationalMatrix& m) {
    std::string out;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (r) out += "; ";
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) out += ' ';
            out += to_string(m(r, c));
        }
    }
    return out;
}

inline std::string format_vector_field(const RationalMatrix& m) {
    std::string out;
    const std::size_t n = m.rows() * m.cols();
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += to_string(m.cols() == 1 ? m(i, 0) : m(0, i));
    }
    return out;
}

}  // namespace detail

inline StructuredRealization realization_from_ptree(const boost::property_tree::ptree& pt) {
    auto get = [&](const char* key) {
        const auto v = pt.get_optional<std::string>(key);
        if (!v) throw Error(ErrorKind::ParseError, std::string("realization file is missing key '") + key + "'");
        return *v;
    };
    const std::string s_text = get("s");
    const Rational s_val = parse_rational(s_text);
    if (s_val < 1 || boost::multiprecision::denominator(s_val) != 1)
        throw Error(ErrorKind::ParseError, "s must be a positive integer");
    const auto s = s_val.convert_to<std::size_t>();

    StructuredRealization r;
    r.s = s;
    r.A0 = detail::parse_matrix_field(get("A0"), s, s, "A0");
    r.A1 = detail::parse_matrix_field(get("A1"), s, s, "A1");
    r.B0 = detail::parse_vector_field(get("B0"), s, true, "B0");
    r.B1 = detail::parse_vector_field(get("B1"), s, true, "B1");
    r.C0 = detail::parse_vector_field(get("C0"), s, false, "C0");
    r.C1 = detail::parse_vector_field(get("C1"), s, false, "C1");
    r.D0 = parse_rational(get("D0"));
    r.D1 = parse_rational(get("D1"));
    return r;
}

inline StructuredRealization read_realization(std::istream& in) {
    boost::property_tree::ptree pt;
    try {
        boost::property_tree::read_ini(in, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
    return realization_from_ptree(pt);
}

inline StructuredRealization read_realization_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open realization file '" + path + "'");
    return read_realization(in);
}

inline void write_realization(std::ostream& out, const StructuredRealization& r) {
    r.check_dimensions();
    out << "s = " << r.s << '\n';
    out << "A0 = " << detail::format_matrix_field(r.A0) << '\n';
    out << "A1 = " << detail::format_matrix_field(r.A1) << '\n';
    out << "B0 = " << detail::format_vector_field(r.B0) << '\n';
    out << "B1 = " << detail::format_vector_field(r.B1) << '\n';
    out << "C0 = " << detail::format_vector_field(r.C0) << '\n';
    out << "C1 = " << detail::format_vector_field(r.C1) << '\n';
    out << "D0 = " << to_string(r.D0) << '\n';
    out << "D1 = " << to_string(r.D1) << '\n';
}

inline std::string to_text(const StructuredRealization& r) {
    std::ostringstream out;
    write_realization(out, r);
    return out.str();
}

inline StructuredRealization from_text(const std::string& text) {
    std::istringstream in(text);
    return read_realization(in);
}

}  // namespace canform
