#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "canform/canonical.hpp"
#include "canform/error.hpp"
#include "canform/realization.hpp"

namespace canform {

enum class AlgorithmSource { PaperUpdateEquations, LiteratureForm, CanonicalParamsRow };

/// A named algorithm. `build` returns the realization for W = I - L; the
/// gossip scaling W = I - mu*L is applied afterwards by get_algorithm.
/// `table_row` is the expected canonical tuple at the given alpha, beta.
struct AlgorithmSpec {
    std::string name;
    std::string display;
    AlgorithmSource source = AlgorithmSource::LiteratureForm;
    bool needs_beta = false;
    std::function<StructuredRealization(const Rational& alpha, const Rational& beta)> build;
    std::function<CanonicalParams(const Rational& alpha, const Rational& beta)> table_row;
};

using Registry = std::vector<AlgorithmSpec>;

namespace detail {

/// Fills row `row` of A0/A1/B0/B1 for an update  xi_row+ = (I - c L) (comb . xi + comb_u u).
inline void gossip_row(StructuredRealization& r, std::size_t row, const std::vector<Rational>& comb,
                       const Rational& comb_u, const Rational& c) {
    for (std::size_t j = 0; j < r.s; ++j) {
        r.A0(row, j) = comb[j];
        r.A1(row, j) = -c * comb[j];
    }
    r.B0(row, 0) = comb_u;
    r.B1(row, 0) = -c * comb_u;
}

// NIDS:  x^{k+2} = Wt (2 x^{k+1} - x^k - a g(x^{k+1}) + a g(x^k)),  Wt = (I + W)/2 = I - L/2.
// State (x^{k+1}, x^k, g(x^k)), output y^k = x^{k+1}, input u^k = g(y^k).
inline StructuredRealization build_nids(const Rational& a, const Rational&) {
    auto r = StructuredRealization::zeros(3);
    gossip_row(r, 0, {2, -1, a}, -a, Rational(1, 2));
    r.A0(1, 0) = 1;
    r.B0(2, 0) = 1;
    r.C0(0, 0) = 1;
    return r;
}

// Exact Diffusion:  x1^{k+1} = x2^k - a g(x2^k)
//                   x2^{k+1} = Wt (x1^{k+1} - x1^k + x2^k),  Wt = (I + W)/2.
// State (x1^k, x2^k), output y^k = x2^k.
inline StructuredRealization build_exact_diffusion(const Rational& a, const Rational&) {
    auto r = StructuredRealization::zeros(2);
    r.A0(0, 1) = 1;
    r.B0(0, 0) = -a;
    // x1^{k+1} - x1^k + x2^k = -x1^k + 2 x2^k - a u^k
    gossip_row(r, 1, {-1, 2}, -a, Rational(1, 2));
    r.C0(0, 1) = 1;
    return r;
}

// EXTRA:  x^{k+2} = (I + W) x^{k+1} - Wt x^k - a (g(x^{k+1}) - g(x^k)),  Wt = (I + W)/2.
// State (x^{k+1}, x^k, g(x^k)), output y^k = x^{k+1}.
inline StructuredRealization build_extra(const Rational& a, const Rational&) {
    auto r = StructuredRealization::zeros(3);
    r.A0(0, 0) = 2;   // (I + W) = 2I - L
    r.A1(0, 0) = -1;
    r.A0(0, 1) = -1;  // -Wt = -I + L/2
    r.A1(0, 1) = Rational(1, 2);
    r.A0(0, 2) = a;
    r.B0(0, 0) = -a;
    r.A0(1, 0) = 1;
    r.B0(2, 0) = 1;
    r.C0(0, 0) = 1;
    return r;
}

// DIGing:  x^{k+1} = W x^k - a t^k,  t^{k+1} = W t^k + g(x^{k+1}) - g(x^k).
// With s^k = t^k - g(x^k):  x^{k+1} = W x^k - a s^k - a u^k,  s^{k+1} = W s^k + (W - I) u^k.
// State (x^k, s^k), output y^k = x^k.
inline StructuredRealization build_diging(const Rational& a, const Rational&) {
    auto r = StructuredRealization::zeros(2);
    r.A0 = {{1, -a}, {0, 1}};
    r.A1 = {{-1, 0}, {0, -1}};
    r.B0 = {{-a}, {0}};
    r.B1 = {{0}, {-1}};
    r.C0 = {{1, 0}};
    return r;
}

inline CanonicalParams row(const Rational& a, Rational z0, Rational z1, Rational z2, Rational z3) {
    return {a, std::move(z0), std::move(z1), std::move(z2), std::move(z3)};
}

}  // namespace detail

inline Registry make_default_registry() {
    using detail::row;
    const Rational half(1, 2);
    Registry reg;
    reg.push_back({"extra", "EXTRA", AlgorithmSource::LiteratureForm, false, detail::build_extra,
                   [=](const Rational& a, const Rational&) { return row(a, half, 1, 0, 0); }});
    reg.push_back({"nids", "NIDS", AlgorithmSource::PaperUpdateEquations, false, detail::build_nids,
                   [=](const Rational& a, const Rational&) { return row(a, half, 1, 0, half); }});
    reg.push_back({"exact_diffusion", "Exact Diffusion", AlgorithmSource::PaperUpdateEquations, false,
                   detail::build_exact_diffusion,
                   [=](const Rational& a, const Rational&) { return row(a, half, 1, 0, half); }});
    reg.push_back({"diging", "DIGing", AlgorithmSource::LiteratureForm, false, detail::build_diging,
                   [](const Rational& a, const Rational&) { return row(a, 0, 2, 1, 0); }});
    reg.push_back({"asyn_dgm", "AsynDGM", AlgorithmSource::CanonicalParamsRow, false,
                   [](const Rational& a, const Rational&) { return canonical_realization(row(a, 0, 2, 1, 1)); },
                   [](const Rational& a, const Rational&) { return row(a, 0, 2, 1, 1); }});
    reg.push_back({"jakovetic_bI", "Jakovetic (B = beta I)", AlgorithmSource::CanonicalParamsRow, true,
                   [](const Rational& a, const Rational& b) { return canonical_realization(row(a, a * b, 2, 1, 0)); },
                   [](const Rational& a, const Rational& b) { return row(a, a * b, 2, 1, 0); }});
    reg.push_back({"jakovetic_bW", "Jakovetic (B = beta W)", AlgorithmSource::CanonicalParamsRow, true,
                   [](const Rational& a, const Rational& b) {
                       return canonical_realization(row(a, a * b, 2, 1 - a * b, 0));
                   },
                   [](const Rational& a, const Rational& b) { return row(a, a * b, 2, 1 - a * b, 0); }});
    return reg;
}

inline const Registry& default_registry() {
    static const Registry reg = make_default_registry();
    return reg;
}

inline const AlgorithmSpec* find_algorithm(const std::string& name, const Registry& reg = default_registry()) {
    for (const auto& spec : reg)
        if (spec.name == name) return &spec;
    return nullptr;
}

inline std::vector<std::string> algorithm_names(const Registry& reg = default_registry()) {
    std::vector<std::string> out;
    for (const auto& s : reg) out.push_back(s.name);
    return out;
}

/// Realization of a registered algorithm with gossip matrix W = I - mu*L.
inline StructuredRealization get_algorithm(const std::string& name, const Rational& alpha,
                                           const std::optional<Rational>& beta = std::nullopt,
                                           const std::optional<Rational>& mu = std::nullopt,
                                           const Registry& reg = default_registry()) {
    const AlgorithmSpec* spec = find_algorithm(name, reg);
    if (!spec) throw Error(ErrorKind::UnknownAlgorithm, "'" + name + "'");
    if (alpha == 0) throw Error(ErrorKind::ZeroStepsize, "alpha must be nonzero");
    if (spec->needs_beta && !beta) throw Error(ErrorKind::MissingParameter, name + " needs beta");
    StructuredRealization r = spec->build(alpha, beta.value_or(Rational(0)));
    if (mu && *mu != 1) r = scale_laplacian(r, *mu);
    return r;
}

struct Table1Row {
    std::string name;
    std::string display;
    bool skipped = false;
    std::optional<CanonicalParams> params;
    std::optional<CanonicalizationError> error;
    CanonicalParams expected;
    bool matches = false;  // zeta tuple equals the expected row exactly
};

struct Table1Result {
    std::vector<Table1Row> rows;

    bool all_match() const {
        for (const auto& r : rows)
            if (!r.skipped && !r.matches) return false;
        return true;
    }
};

/// Canonicalizes every registry entry at (alpha, beta). Rows that need beta are
/// skipped when beta is absent.
inline Table1Result reproduce_table1(const Rational& alpha, const std::optional<Rational>& beta,
                                     const Registry& reg = default_registry()) {
    if (alpha == 0) throw Error(ErrorKind::ZeroStepsize, "alpha must be nonzero");
    Table1Result out;
    for (const auto& spec : reg) {
        Table1Row row;
        row.name = spec.name;
        row.display = spec.display;
        if (spec.needs_beta && !beta) {
            row.skipped = true;
            out.rows.push_back(std::move(row));
            continue;
        }
        const Rational b = beta.value_or(Rational(0));
        row.expected = spec.table_row(alpha, b);
        const auto res = canonicalize(spec.build(alpha, b));
        if (succeeded(res)) {
            const auto& p = std::get<CanonicalParams>(res);
            row.params = p;
            row.matches = p.zeta0 == row.expected.zeta0 && p.zeta1 == row.expected.zeta1 &&
                          p.zeta2 == row.expected.zeta2 && p.zeta3 == row.expected.zeta3;
        } else {
            row.error = std::get<CanonicalizationError>(res);
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace canform
