#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "canform/error.hpp"
#include "canform/graph.hpp"
#include "canform/rational.hpp"

namespace canform {

// Run configuration, INI-style:
//
//   [params]      algorithm | realization | alpha, zeta0..zeta3; beta, mu, tol
//   [graph]       topology, n, prob, seed, mu, edges = "0 1 1; 1 2 1/2"
//   [objective]   type = quadratic | logcosh, b = "1 2 3" (rows ';'-separated when d > 1), curvatures
//   [simulation]  iterations, engine = canonical | realization, x0, w0, seed, threshold
//   [output]      trajectory = path.csv, format = text | csv
//
// CANFORM_SEED, when set, replaces every seed in the file.

struct ParamsSection {
    std::optional<std::string> algorithm;
    std::optional<std::string> realization_file;
    std::optional<Rational> alpha;
    std::optional<Rational> beta;
    std::optional<std::array<Rational, 4>> zeta;
    double tol = 1e-9;
};

struct ObjectiveSection {
    std::string type = "quadratic";
    Eigen::MatrixXd b;           // n x d
    Eigen::VectorXd curvatures;  // n, defaults to ones
};

struct SimulationSection {
    std::size_t iterations = 1000;
    std::string engine = "canonical";
    std::string x0 = "zero";  // zero | random | explicit values
    std::string w0 = "zero";
    std::uint64_t seed = 0;
    double threshold = 1e-8;
};

struct OutputSection {
    std::optional<std::string> trajectory;
    std::string format = "text";
};

struct RunConfig {
    ParamsSection params;
    std::optional<TopologySpec> graph;
    Rational mu = 1;
    std::optional<ObjectiveSection> objective;
    SimulationSection simulation;
    OutputSection output;
};

namespace detail {

inline std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw Error(ErrorKind::ParseError, what + ": '" + tok + "' is not a number");
        }
    }
    return out;
}

/// Rows separated by ';', entries by whitespace. A single row of n entries is
/// read as an n x 1 column (one scalar per agent).
inline Eigen::MatrixXd parse_agent_matrix(const std::string& text, const std::string& what) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string row;
    while (std::getline(in, row, ';')) {
        auto vals = parse_double_list(row, what);
        if (!vals.empty()) rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw Error(ErrorKind::ParseError, what + " is empty");
    if (rows.size() == 1) {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(rows[0].size()), 1);
        for (std::size_t i = 0; i < rows[0].size(); ++i) m(static_cast<Eigen::Index>(i), 0) = rows[0][i];
        return m;
    }
    const std::size_t d = rows[0].size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != d) throw Error(ErrorKind::ParseError, what + ": rows have different lengths");
        for (std::size_t c = 0; c < d; ++c) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    }
    return m;
}

inline std::uint64_t parse_seed(const std::string& text) {
    try {
        std::size_t used = 0;
        const auto v = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorKind::ParseError, "seed '" + text + "' is not a non-negative integer");
    }
}

inline std::size_t parse_count(const std::string& text, const std::string& what) {
    try {
        return static_cast<std::size_t>(parse_seed(text));
    } catch (const Error&) {
        throw Error(ErrorKind::ParseError, what + " '" + text + "' is not a non-negative integer");
    }
}

inline double parse_double(const std::string& text, const std::string& what) {
    const auto v = parse_double_list(text, what);
    if (v.size() != 1) throw Error(ErrorKind::ParseError, what + " must be a single number");
    return v[0];
}

inline std::vector<Edge> parse_edges(const std::string& text) {
    std::vector<Edge> edges;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ';')) {
        std::istringstream fields(item);
        std::string i, j, w;
        if (!(fields >> i)) continue;
        if (!(fields >> j)) throw Error(ErrorKind::ParseError, "edge '" + item + "' needs 'i j [weight]'");
        fields >> w;
        edges.push_back({parse_count(i, "edge endpoint"), parse_count(j, "edge endpoint"),
                         w.empty() ? Rational(1) : parse_rational(w)});
    }
    return edges;
}

inline std::optional<std::uint64_t> env_seed() {
    const char* env = std::getenv("CANFORM_SEED");
    if (!env || !*env) return std::nullopt;
    return parse_seed(env);
}

}  // namespace detail

/// Builds a topology from key/value pairs (topology, n, prob, seed, edges).
inline TopologySpec topology_from_ptree(const boost::property_tree::ptree& pt) {
    const auto name = pt.get_optional<std::string>("topology");
    if (!name) throw Error(ErrorKind::InvalidSpec, "graph needs a topology");
    const auto kind = parse_topology(*name);
    if (!kind) throw Error(ErrorKind::InvalidSpec, "unknown topology '" + *name + "'");
    TopologySpec spec;
    spec.kind = *kind;
    if (const auto n = pt.get_optional<std::string>("n")) spec.n = detail::parse_count(*n, "n");
    if (const auto p = pt.get_optional<std::string>("prob")) spec.prob = detail::parse_double(*p, "prob");
    if (const auto s = pt.get_optional<std::string>("seed")) spec.seed = detail::parse_seed(*s);
    if (const auto e = pt.get_optional<std::string>("edges")) spec.edges = detail::parse_edges(*e);
    if (spec.kind == Topology::Explicit && spec.n == 0)
        for (const auto& e : spec.edges) spec.n = std::max({spec.n, e.i + 1, e.j + 1});
    if (spec.kind == Topology::ErdosRenyi && !pt.get_optional<std::string>("prob"))
        throw Error(ErrorKind::InvalidSpec, "erdos_renyi needs prob");
    if (spec.n == 0) throw Error(ErrorKind::InvalidSpec, "graph needs n");
    return spec;
}

/// Parses a one-line graph description such as "ring n=5", "ring(5)",
/// "erdos_renyi n=8 prob=0.1 seed=7 mu=1/2" or "explicit edges=0 1 1;1 2 2"
/// into [graph]-section keys.
inline boost::property_tree::ptree graph_ptree_from_description(const std::string& text) {
    const std::string body(detail::trim(text));
    boost::property_tree::ptree pt;
    const auto open = body.find('(');
    const std::string head = body.substr(0, std::min(body.find(' '), open));
    if (head.empty()) throw Error(ErrorKind::ParseError, "empty graph description");
    std::string rest = body.substr(head.size());
    if (open != std::string::npos && open == head.size()) {
        const auto close = body.find(')', open);
        if (close == std::string::npos) throw Error(ErrorKind::ParseError, "unbalanced '(' in '" + text + "'");
        pt.put("n", std::string(detail::trim(body.substr(open + 1, close - open - 1))));
        rest = body.substr(close + 1);
    }
    pt.put("topology", head);
    std::istringstream in(rest);
    std::string tok, edges;
    bool in_edges = false;
    while (in >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) {
            if (!in_edges) throw Error(ErrorKind::ParseError, "expected key=value, got '" + tok + "'");
            edges += " " + tok;
            continue;
        }
        const std::string key = tok.substr(0, eq), value = tok.substr(eq + 1);
        in_edges = key == "edges";
        if (in_edges)
            edges = value;
        else if (key == "n" || key == "prob" || key == "seed" || key == "mu")
            pt.put(key, value);
        else
            throw Error(ErrorKind::ParseError, "unknown graph key '" + key + "'");
    }
    if (!edges.empty()) pt.put("edges", edges);
    return pt;
}

/// Topology and mu (1 when absent) of a one-line graph description.
inline std::pair<TopologySpec, Rational> parse_graph_description(const std::string& text) {
    const auto pt = graph_ptree_from_description(text);
    const auto mu = pt.get_optional<std::string>("mu");
    return {topology_from_ptree(pt), mu ? parse_rational(*mu) : Rational(1)};
}

/// Reads a run configuration. Relative realization paths resolve against `base_dir`.
inline RunConfig run_config_from_ptree(const boost::property_tree::ptree& pt, const std::filesystem::path& base_dir = {}) {
    static const std::vector<std::string> sections = {"params", "graph", "objective", "simulation", "output"};
    for (const auto& [name, _] : pt)
        if (std::find(sections.begin(), sections.end(), name) == sections.end())
            throw Error(ErrorKind::ParseError, "unknown config section '" + name + "'");

    RunConfig cfg;
    std::optional<Rational> params_mu, graph_mu;
    if (const auto p = pt.get_child_optional("params")) {
        auto& ps = cfg.params;
        if (const auto v = p->get_optional<std::string>("algorithm")) ps.algorithm = *v;
        if (const auto v = p->get_optional<std::string>("realization")) {
            std::filesystem::path path(*v);
            ps.realization_file = (path.is_relative() && !base_dir.empty() ? base_dir / path : path).string();
        }
        if (const auto v = p->get_optional<std::string>("alpha")) ps.alpha = parse_rational(*v);
        if (const auto v = p->get_optional<std::string>("beta")) ps.beta = parse_rational(*v);
        if (const auto v = p->get_optional<std::string>("mu")) params_mu = parse_rational(*v);
        if (const auto v = p->get_optional<std::string>("tol")) ps.tol = detail::parse_double(*v, "tol");
        std::array<std::optional<Rational>, 4> z;
        int present = 0;
        for (int k = 0; k < 4; ++k)
            if (const auto v = p->get_optional<std::string>("zeta" + std::to_string(k))) {
                z[static_cast<std::size_t>(k)] = parse_rational(*v);
                ++present;
            }
        if (present != 0 && present != 4) throw Error(ErrorKind::MissingParameter, "give all of zeta0..zeta3 or none");
        if (present == 4) ps.zeta = std::array<Rational, 4>{*z[0], *z[1], *z[2], *z[3]};
        const int sources = (ps.algorithm ? 1 : 0) + (ps.realization_file ? 1 : 0) + (ps.zeta ? 1 : 0);
        if (sources > 1)
            throw Error(ErrorKind::InvalidSpec, "[params] takes exactly one of algorithm, realization, zeta0..zeta3");
    }
    if (const auto g = pt.get_child_optional("graph")) {
        cfg.graph = topology_from_ptree(*g);
        if (const auto v = g->get_optional<std::string>("mu")) graph_mu = parse_rational(*v);
    }
    if (params_mu && graph_mu && *params_mu != *graph_mu)
        throw Error(ErrorKind::InvalidSpec, "[params] mu and [graph] mu disagree");
    cfg.mu = params_mu.value_or(graph_mu.value_or(Rational(1)));
    if (cfg.mu <= 0) throw Error(ErrorKind::InvalidSpec, "mu must be positive");

    if (const auto o = pt.get_child_optional("objective")) {
        ObjectiveSection obj;
        obj.type = o->get<std::string>("type", "quadratic");
        if (obj.type != "quadratic" && obj.type != "logcosh")
            throw Error(ErrorKind::InvalidSpec, "unknown objective type '" + obj.type + "'");
        const auto b = o->get_optional<std::string>("b");
        if (!b) throw Error(ErrorKind::MissingParameter, "[objective] needs b");
        obj.b = detail::parse_agent_matrix(*b, "b");
        if (const auto c = o->get_optional<std::string>("curvatures")) {
            const auto vals = detail::parse_double_list(*c, "curvatures");
            obj.curvatures = Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
        } else {
            obj.curvatures = Eigen::VectorXd::Ones(obj.b.rows());
        }
        cfg.objective = std::move(obj);
    }
    if (const auto s = pt.get_child_optional("simulation")) {
        auto& sim = cfg.simulation;
        if (const auto v = s->get_optional<std::string>("iterations")) sim.iterations = detail::parse_count(*v, "iterations");
        sim.engine = s->get<std::string>("engine", sim.engine);
        if (sim.engine != "canonical" && sim.engine != "realization")
            throw Error(ErrorKind::InvalidSpec, "engine must be canonical or realization");
        sim.x0 = s->get<std::string>("x0", sim.x0);
        sim.w0 = s->get<std::string>("w0", sim.w0);
        if (const auto v = s->get_optional<std::string>("seed")) sim.seed = detail::parse_seed(*v);
        if (const auto v = s->get_optional<std::string>("threshold")) sim.threshold = detail::parse_double(*v, "threshold");
    }
    if (const auto o = pt.get_child_optional("output")) {
        if (const auto v = o->get_optional<std::string>("trajectory")) cfg.output.trajectory = *v;
        cfg.output.format = o->get<std::string>("format", cfg.output.format);
    }
    if (const auto seed = detail::env_seed()) {
        cfg.simulation.seed = *seed;
        if (cfg.graph) cfg.graph->seed = *seed;
    }
    return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
    boost::property_tree::ptree pt;
    try {
        boost::property_tree::read_ini(path, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
    return run_config_from_ptree(pt, std::filesystem::path(path).parent_path());
}

/// Initial value for x0 / w0: "zero", "random" (uniform in [-1, 1] from
/// mt19937_64(seed)), or explicit agent values.
inline Eigen::MatrixXd initial_matrix(const std::string& text, std::size_t n, std::size_t d, std::uint64_t seed,
                                      const std::string& what) {
    const auto rows = static_cast<Eigen::Index>(n), cols = static_cast<Eigen::Index>(d);
    if (text == "zero") return Eigen::MatrixXd::Zero(rows, cols);
    if (text == "random") {
        std::mt19937_64 rng(seed);
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
        return m;
    }
    Eigen::MatrixXd m = detail::parse_agent_matrix(text, what);
    if (m.rows() != rows || m.cols() != cols)
        throw Error(ErrorKind::DimensionMismatch, what + " must have one row of " + std::to_string(d) + " values per agent");
    return m;
}

}  // namespace canform
