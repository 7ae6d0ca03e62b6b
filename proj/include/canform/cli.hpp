#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "canform/algorithms.hpp"
#include "canform/canonical.hpp"
#include "canform/config.hpp"
#include "canform/error.hpp"
#include "canform/graph.hpp"
#include "canform/realization_io.hpp"
#include "canform/sim.hpp"
#include "canform/spectral.hpp"

namespace canform::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kCanonicalizationFailed = 2;
inline constexpr int kTableMismatch = 3;
inline constexpr int kSpectralFail = 4;
inline constexpr int kConvergenceFail = 5;
inline constexpr int kT2Fail = 6;

/// Where an algorithm comes from: a registry name, a realization file, or
/// explicit zeta values. Rational fields hold "p/q" strings.
struct SourceOptions {
    std::optional<std::string> alg;
    std::optional<std::string> file;
    std::optional<std::string> zeta;  // "z0,z1,z2,z3"
    std::optional<std::string> alpha;
    std::optional<std::string> beta;
    std::optional<std::string> mu;
};

/// Options shared by analyze, simulate and fixed-point. A config file supplies
/// defaults; flags override individual keys.
struct ProblemOptions {
    std::optional<std::string> config;
    SourceOptions source;
    std::optional<std::string> graph;
    std::optional<std::string> b;
    std::optional<std::string> curvatures;
};

struct CanonicalizeOptions {
    SourceOptions source;
    std::string format = "text";
};

struct CompareOptions {
    SourceOptions a;
    SourceOptions b;
};

struct TableOptions {
    std::string alpha = "1/10";
    std::optional<std::string> beta;
    std::string format = "text";
};

struct AnalyzeOptions {
    ProblemOptions problem;
    std::optional<double> tol;
    std::string format = "text";
};

struct SimulateOptions {
    ProblemOptions problem;
    std::optional<std::size_t> iterations;
    std::optional<std::string> output;
    std::optional<double> threshold;
    std::optional<std::string> engine;
    std::optional<std::string> x0;
    std::optional<std::string> w0;
};

struct FixedPointOptions {
    ProblemOptions problem;
    std::string format = "text";
};

namespace detail {

inline std::array<Rational, 4> parse_zeta(const std::string& text) {
    std::string cleaned = text;
    for (char& c : cleaned)
        if (c == ',' || c == '(' || c == ')') c = ' ';
    const auto vals = ::canform::detail::parse_rational_list(cleaned);
    if (vals.size() != 4) throw Error(ErrorKind::ParseError, "zeta needs four values, got '" + text + "'");
    return {vals[0], vals[1], vals[2], vals[3]};
}

inline std::optional<Rational> opt_rational(const std::optional<std::string>& s) {
    if (!s) return std::nullopt;
    return parse_rational(*s);
}

/// A resolved algorithm: the realization it defines and its label.
struct Source {
    std::string label;
    StructuredRealization realization;
    std::optional<std::string> registry_name;
};

/// Builds the realization for a source. `mu`, when given, scales the Laplacian
/// inside the realization.
inline Source resolve_source(const SourceOptions& o, const Registry& reg) {
    const int count = (o.alg ? 1 : 0) + (o.file ? 1 : 0) + (o.zeta ? 1 : 0);
    if (count != 1) throw Error(ErrorKind::MissingParameter, "give exactly one of --alg, --file, --zeta");
    const auto mu = opt_rational(o.mu);
    if (mu && *mu <= 0) throw Error(ErrorKind::InvalidSpec, "mu must be positive");
    if (o.alg) {
        if (!o.alpha) throw Error(ErrorKind::MissingParameter, "--alg needs --alpha");
        const Rational alpha = parse_rational(*o.alpha);
        Source s{*o.alg + " (alpha = " + to_string(alpha) + ")",
                 get_algorithm(*o.alg, alpha, opt_rational(o.beta), mu, reg), *o.alg};
        return s;
    }
    if (o.file) {
        StructuredRealization r = read_realization_file(*o.file);
        if (mu && *mu != 1) r = scale_laplacian(r, *mu);
        return {*o.file, r, std::nullopt};
    }
    if (!o.alpha) throw Error(ErrorKind::MissingParameter, "--zeta needs --alpha");
    const auto z = parse_zeta(*o.zeta);
    const CanonicalParams p{parse_rational(*o.alpha), z[0], z[1], z[2], z[3]};
    if (p.alpha == 0) throw Error(ErrorKind::ZeroStepsize, "alpha must be nonzero");
    StructuredRealization r = canonical_realization(p);
    if (mu && *mu != 1) r = scale_laplacian(r, *mu);
    return {"params " + to_string(p), r, std::nullopt};
}

inline void put_if(boost::property_tree::ptree& pt, const std::string& key, const std::optional<std::string>& v) {
    if (v) pt.put(key, *v);
}

/// Reads the config file (if any) and applies flag overrides.
inline RunConfig build_run_config(const ProblemOptions& o) {
    boost::property_tree::ptree pt;
    std::filesystem::path base;
    if (o.config) {
        try {
            boost::property_tree::read_ini(*o.config, pt);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw Error(ErrorKind::ParseError, e.what());
        }
        base = std::filesystem::path(*o.config).parent_path();
    }
    const auto& s = o.source;
    if (s.alg || s.file || s.zeta) {
        if (auto params = pt.get_child_optional("params"))
            for (const char* key : {"algorithm", "realization", "zeta0", "zeta1", "zeta2", "zeta3"}) params->erase(key);
        put_if(pt, "params.algorithm", s.alg);
        if (s.file) pt.put("params.realization", std::filesystem::absolute(*s.file).string());
        if (s.zeta) {
            const auto z = parse_zeta(*s.zeta);
            for (int k = 0; k < 4; ++k) pt.put("params.zeta" + std::to_string(k), to_string(z[static_cast<std::size_t>(k)]));
        }
    }
    put_if(pt, "params.alpha", s.alpha);
    put_if(pt, "params.beta", s.beta);
    if (o.graph) {
        pt.erase("graph");
        if (auto params = pt.get_child_optional("params")) params->erase("mu");
        pt.add_child("graph", graph_ptree_from_description(*o.graph));
    }
    if (s.mu) {
        if (auto params = pt.get_child_optional("params")) params->erase("mu");
        pt.put("graph.mu", *s.mu);
    }
    if (o.b) {
        pt.put("objective.b", *o.b);
        if (!o.curvatures)
            if (auto obj = pt.get_child_optional("objective")) obj->erase("curvatures");
    }
    put_if(pt, "objective.curvatures", o.curvatures);
    return run_config_from_ptree(pt, base);
}

/// Realization named by the [params] section (mu not applied).
inline Source config_source(const RunConfig& cfg, const Registry& reg) {
    const auto& p = cfg.params;
    SourceOptions so;
    if (p.algorithm) so.alg = *p.algorithm;
    if (p.realization_file) so.file = *p.realization_file;
    if (p.alpha) so.alpha = to_string(*p.alpha);
    if (p.beta) so.beta = to_string(*p.beta);
    if (p.zeta) so.zeta = to_string((*p.zeta)[0]) + "," + to_string((*p.zeta)[1]) + "," + to_string((*p.zeta)[2]) +
                          "," + to_string((*p.zeta)[3]);
    if (!so.alg && !so.file && !so.zeta)
        throw Error(ErrorKind::MissingParameter, "no algorithm: set [params] algorithm, realization or zeta0..zeta3");
    return resolve_source(so, reg);
}

inline LaplacianGraph config_graph(const RunConfig& cfg) {
    if (!cfg.graph) throw Error(ErrorKind::MissingParameter, "no graph: give --graph or a [graph] section");
    return build_laplacian(*cfg.graph, cfg.mu);
}

inline Objective config_objective(const RunConfig& cfg) {
    if (!cfg.objective) throw Error(ErrorKind::MissingParameter, "no objective: give --b or an [objective] section");
    const auto& o = *cfg.objective;
    return o.type == "logcosh" ? logcosh_objective(o.b, o.curvatures) : quadratic_objective(o.b, o.curvatures);
}

inline int report_error(std::ostream& err, const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::T2Violated ? kT2Fail : kUsage;
}

inline std::string fmt_double(double v, const char* spec = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

inline std::string fmt_row(const Eigen::MatrixXd& m, Eigen::Index i) {
    if (m.cols() == 1) return fmt_double(m(i, 0), "%.10g");
    std::string out = "[";
    for (Eigen::Index c = 0; c < m.cols(); ++c) out += (c ? " " : "") + fmt_double(m(i, c), "%.10g");
    return out + "]";
}

inline std::string error_text(const CanonicalizationError& e) {
    return std::string(to_string(e.kind)) + (e.detail.empty() ? "" : ": " + e.detail);
}

}  // namespace detail

/// Prints the reduced transfer function and canonical parameters.
inline int cmd_canonicalize(const CanonicalizeOptions& o, std::ostream& out, std::ostream& err,
                            const Registry& reg = default_registry()) {
    try {
        const auto src = detail::resolve_source(o.source, reg);
        const auto tf = transfer_function(src.realization);
        const auto res = canonicalize_transfer_function(tf);
        if (!succeeded(res)) {
            const auto& e = std::get<CanonicalizationError>(res);
            err << "canonicalization failed: " << detail::error_text(e) << '\n';
            out << to_string(e.kind) << '\n';
            return kCanonicalizationFailed;
        }
        const auto& p = std::get<CanonicalParams>(res);
        if (o.format == "csv") {
            out << "alpha,zeta0,zeta1,zeta2,zeta3\n"
                << to_string(p.alpha) << ',' << to_string(p.zeta0) << ',' << to_string(p.zeta1) << ','
                << to_string(p.zeta2) << ',' << to_string(p.zeta3) << '\n';
            return kOk;
        }
        out << "input: " << src.label << '\n';
        out << "transfer function: " << format(tf) << '\n';
        out << "alpha = " << to_string(p.alpha) << '\n';
        out << "zeta = " << zeta_string(p) << '\n';
        return kOk;
    } catch (const Error& e) {
        return detail::report_error(err, e);
    }
}

/// Prints both parameter tuples and EQUIVALENT or DISTINCT.
inline int cmd_compare(const CompareOptions& o, std::ostream& out, std::ostream& err,
                       const Registry& reg = default_registry()) {
    try {
        const auto a = detail::resolve_source(o.a, reg);
        const auto b = detail::resolve_source(o.b, reg);
        for (const auto* s : {&a, &b}) {
            const auto res = canonicalize(s->realization);
            out << s->label << ": ";
            if (succeeded(res))
                out << "zeta = " << zeta_string(std::get<CanonicalParams>(res))
                    << ", alpha = " << to_string(std::get<CanonicalParams>(res).alpha) << '\n';
            else
                out << "not canonicalizable (" << to_string(std::get<CanonicalizationError>(res).kind)
                    << "), transfer function " << format(transfer_function(s->realization)) << '\n';
        }
        out << (equivalent(a.realization, b.realization) ? "EQUIVALENT" : "DISTINCT") << '\n';
        return kOk;
    } catch (const Error& e) {
        return detail::report_error(err, e);
    }
}

/// Canonicalizes every registry entry and checks it against its expected row.
inline int cmd_table(const TableOptions& o, std::ostream& out, std::ostream& err,
                     const Registry& reg = default_registry()) {
    try {
        const Rational alpha = parse_rational(o.alpha);
        const auto beta = detail::opt_rational(o.beta);
        const auto table = reproduce_table1(alpha, beta, reg);
        std::vector<std::string> skipped;
        const bool csv = o.format == "csv";
        if (csv)
            out << "algorithm,zeta0,zeta1,zeta2,zeta3,status\n";
        else
            out << std::left << std::setw(24) << "algorithm" << std::setw(8) << "zeta0" << std::setw(8) << "zeta1"
                << std::setw(8) << "zeta2" << std::setw(8) << "zeta3" << "status\n";
        for (const auto& row : table.rows) {
            if (row.skipped) {
                skipped.push_back(row.name);
                continue;
            }
            std::array<std::string, 4> z{"-", "-", "-", "-"};
            if (row.params)
                z = {to_string(row.params->zeta0), to_string(row.params->zeta1), to_string(row.params->zeta2),
                     to_string(row.params->zeta3)};
            const std::string status = row.matches ? "ok" : "MISMATCH";
            if (csv) {
                out << row.display << ',' << z[0] << ',' << z[1] << ',' << z[2] << ',' << z[3] << ',' << status << '\n';
            } else {
                out << std::left << std::setw(24) << row.display;
                for (const auto& v : z) out << std::setw(8) << v;
                out << status << '\n';
            }
        }
        if (!skipped.empty()) {
            err << "warning: beta not given; skipped";
            for (const auto& s : skipped) err << ' ' << s;
            err << '\n';
        }
        if (table.all_match()) return kOk;
        for (const auto& row : table.rows) {
            if (row.skipped || row.matches) continue;
            err << "mismatch: " << row.name << " expected " << zeta_string(row.expected) << ", got "
                << (row.params ? zeta_string(*row.params) : detail::error_text(*row.error)) << '\n';
        }
        return kTableMismatch;
    } catch (const Error& e) {
        return detail::report_error(err, e);
    }
}

/// Pole/zero report at every Laplacian eigenvalue.
inline int cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err,
                       const Registry& reg = default_registry()) {
    try {
        const RunConfig cfg = detail::build_run_config(o.problem);
        const auto src = detail::config_source(cfg, reg);
        const auto g = detail::config_graph(cfg);
        const double tol = o.tol.value_or(cfg.params.tol);
        if (!(tol > 0)) throw Error(ErrorKind::InvalidSpec, "tol must be positive");
        const auto tf = transfer_function(src.realization);
        const auto res = lemma1_check(tf, g, tol);
        if (o.format == "csv") {
            out << "lambda,poles,zeros,classification\n";
            for (const auto& r : res.reports)
                out << detail::fmt_double(r.lambda, "%.17g") << ",\"" << format(r.poles) << "\",\"" << format(r.zeros)
                    << "\"," << to_string(r.classification) << '\n';
        } else {
            out << "input: " << src.label << '\n';
            out << "transfer function: " << format(tf) << '\n';
            auto zeros_text = [](const PoleZeroReport& r) {
                return r.numerator_vanishes ? std::string("(identically 0)") : format(r.zeros);
            };
            std::size_t wp = 5, wz = 5;
            for (const auto& r : res.reports) {
                wp = std::max(wp, format(r.poles).size());
                wz = std::max(wz, zeros_text(r).size());
            }
            const int pw = static_cast<int>(wp + 2), zw = static_cast<int>(wz + 2);
            out << std::left << std::setw(12) << "lambda" << std::setw(pw) << "poles" << std::setw(zw) << "zeros"
                << "classification\n";
            for (const auto& r : res.reports) {
                out << std::left << std::setw(12) << detail::fmt_double(r.lambda) << std::setw(pw) << format(r.poles)
                    << std::setw(zw) << zeros_text(r) << to_string(r.classification);
                if (!r.detail.empty()) out << " (" << r.detail << ')';
                out << '\n';
            }
            out << "numerator has factor (z - 1): " << (res.symbolic_zero_at_one ? "yes" : "no") << '\n';
        }
        if (res.pass) {
            out << "verdict: PASS\n";
            return kOk;
        }
        out << "verdict: FAIL at lambda =";
        for (double lam : res.failing_eigenvalues()) out << ' ' << detail::fmt_double(lam);
        out << '\n';
        return kSpectralFail;
    } catch (const Error& e) {
        return detail::report_error(err, e);
    }
}

/// Runs a closed-loop simulation and reports the final error.
inline int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err,
                        const Registry& reg = default_registry()) {
    try {
        RunConfig cfg = detail::build_run_config(o.problem);
        if (o.iterations) cfg.simulation.iterations = *o.iterations;
        if (o.threshold) cfg.simulation.threshold = *o.threshold;
        if (o.engine) cfg.simulation.engine = *o.engine;
        if (o.x0) cfg.simulation.x0 = *o.x0;
        if (o.w0) cfg.simulation.w0 = *o.w0;
        if (o.output) cfg.output.trajectory = *o.output;
        if (cfg.simulation.engine != "canonical" && cfg.simulation.engine != "realization")
            throw Error(ErrorKind::InvalidSpec, "engine must be canonical or realization");

        const auto src = detail::config_source(cfg, reg);
        const auto g = detail::config_graph(cfg);
        const auto obj = detail::config_objective(cfg);
        if (obj.n != g.n())
            throw Error(ErrorKind::DimensionMismatch, "objective has " + std::to_string(obj.n) + " agents, graph has " +
                                                          std::to_string(g.n()));
        const auto K = cfg.simulation.iterations;
        const auto x0 = initial_matrix(cfg.simulation.x0, obj.n, obj.d, cfg.simulation.seed, "x0");

        Trajectory traj;
        if (cfg.simulation.engine == "canonical") {
            const auto res = canonicalize(src.realization);
            if (!succeeded(res)) {
                err << "canonicalization failed: " << detail::error_text(std::get<CanonicalizationError>(res)) << '\n';
                return kCanonicalizationFailed;
            }
            const auto& p = std::get<CanonicalParams>(res);
            const auto w0 = initial_matrix(cfg.simulation.w0, obj.n, obj.d, cfg.simulation.seed + 1, "w0");
            const auto tc = check_technical_conditions(p, g, w0.colwise().sum().transpose());
            for (const auto& m : tc.messages) err << "warning: " << m << '\n';
            traj = run_canonical(p, g, obj, x0, w0, K);
        } else {
            const auto xi0 = src.registry_name == std::optional<std::string>("nids")
                                 ? nids_initial_state(*cfg.params.alpha, obj, x0)
                                 : padded_initial_state(src.realization.s, x0);
            traj = run_realization(src.realization, g, obj, xi0, K);
        }

        if (cfg.output.trajectory) {
            if (*cfg.output.trajectory == "-") {
                write_trajectory_csv(out, traj);
            } else {
                std::ofstream csv(*cfg.output.trajectory);
                if (!csv) throw Error(ErrorKind::ParseError, "cannot write '" + *cfg.output.trajectory + "'");
                write_trajectory_csv(csv, traj);
            }
        }
        std::ostream& summary = cfg.output.trajectory == std::optional<std::string>("-") ? err : out;
        summary << "input: " << src.label << '\n';
        summary << "iterations: " << K << ", communication rounds: " << traj.communication_rounds << '\n';

        if (!obj.known_minimizer) {
            Eigen::VectorXd center = traj.steps.back().y.colwise().mean().transpose();
            const auto m = convergence_metrics(traj, center);
            summary << "no known minimizer; final consensus residual = " << detail::fmt_double(m.consensus.back(), "%.3e")
                    << '\n';
            return kOk;
        }
        const auto m = convergence_metrics(traj, *obj.known_minimizer);
        const double e = m.error.back();
        summary << "final error = " << detail::fmt_double(e, "%.3e") << '\n';
        summary << "final consensus residual = " << detail::fmt_double(m.consensus.back(), "%.3e") << '\n';
        if (std::isfinite(e) && e <= cfg.simulation.threshold) {
            summary << "converged (threshold " << detail::fmt_double(cfg.simulation.threshold, "%.1e") << ")\n";
            return kOk;
        }
        summary << "not converged (threshold " << detail::fmt_double(cfg.simulation.threshold, "%.1e") << ")\n";
        return kConvergenceFail;
    } catch (const Error& e) {
        return detail::report_error(err, e);
    }
}

/// Builds and prints the optimal fixed point for a quadratic or logcosh
/// objective with a known minimizer.
inline int cmd_fixed_point(const FixedPointOptions& o, std::ostream& out, std::ostream& err,
                           const Registry& reg = default_registry()) {
    try {
        const RunConfig cfg = detail::build_run_config(o.problem);
        const auto src = detail::config_source(cfg, reg);
        const auto g = detail::config_graph(cfg);
        const auto obj = detail::config_objective(cfg);
        if (!obj.known_minimizer) throw Error(ErrorKind::MissingParameter, "objective has no known minimizer");
        if (obj.n != g.n()) throw Error(ErrorKind::DimensionMismatch, "objective and graph disagree on n");
        const auto res = canonicalize(src.realization);
        if (!succeeded(res)) {
            err << "canonicalization failed: " << detail::error_text(std::get<CanonicalizationError>(res)) << '\n';
            return kCanonicalizationFailed;
        }
        const auto& p = std::get<CanonicalParams>(res);
        const Eigen::VectorXd& xs = *obj.known_minimizer;
        const Eigen::MatrixXd grads = obj.gradients(xs.transpose().replicate(static_cast<Eigen::Index>(obj.n), 1));
        const auto fp = construct_fixed_point(p, g, xs, grads);
        if (o.format == "csv") {
            out << "i,coord,x,w,v1,v2,y,u\n";
            for (Eigen::Index i = 0; i < fp.x.rows(); ++i)
                for (Eigen::Index c = 0; c < fp.x.cols(); ++c) {
                    out << i << ',' << c;
                    for (const auto* m : {&fp.x, &fp.w, &fp.v1, &fp.v2, &fp.y, &fp.u})
                        out << ',' << detail::fmt_double((*m)(i, c), "%.17g");
                    out << '\n';
                }
        } else {
            out << "input: " << src.label << '\n';
            out << "params: " << to_string(p) << '\n';
            out << std::left << std::setw(6) << "agent";
            for (const char* h : {"x", "w", "v1", "v2", "y", "u"}) out << std::setw(18) << h;
            out << '\n';
            for (Eigen::Index i = 0; i < fp.x.rows(); ++i) {
                out << std::left << std::setw(6) << i;
                for (const auto* m : {&fp.x, &fp.w, &fp.v1, &fp.v2, &fp.y, &fp.u})
                    out << std::setw(18) << detail::fmt_row(*m, i);
                out << '\n';
            }
        }
        out << "residual = " << detail::fmt_double(fp.residual, "%.3e") << '\n';
        return kOk;
    } catch (const Error& e) {
        return detail::report_error(err, e);
    }
}

}  // namespace canform::cli
