#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "canform/error.hpp"
#include "canform/matrix.hpp"
#include "canform/rational.hpp"

namespace canform {

enum class Topology { Ring, Path, Complete, Star, ErdosRenyi, Explicit };

struct Edge {
    std::size_t i = 0;
    std::size_t j = 0;
    Rational weight = 1;
};

/// Describes an undirected weighted graph on agents 0..n-1.
struct TopologySpec {
    Topology kind = Topology::Ring;
    std::size_t n = 0;
    double prob = 0.0;        // ErdosRenyi only
    std::uint64_t seed = 0;   // ErdosRenyi only
    std::vector<Edge> edges;  // Explicit only

    static TopologySpec ring(std::size_t n) { return {Topology::Ring, n, 0.0, 0, {}}; }
    static TopologySpec path(std::size_t n) { return {Topology::Path, n, 0.0, 0, {}}; }
    static TopologySpec complete(std::size_t n) { return {Topology::Complete, n, 0.0, 0, {}}; }
    static TopologySpec star(std::size_t n) { return {Topology::Star, n, 0.0, 0, {}}; }
    static TopologySpec erdos_renyi(std::size_t n, double prob, std::uint64_t seed) {
        return {Topology::ErdosRenyi, n, prob, seed, {}};
    }
    static TopologySpec explicit_edges(std::size_t n, std::vector<Edge> edges) {
        return {Topology::Explicit, n, 0.0, 0, std::move(edges)};
    }
};

inline std::optional<Topology> parse_topology(const std::string& name) {
    if (name == "ring") return Topology::Ring;
    if (name == "path") return Topology::Path;
    if (name == "complete") return Topology::Complete;
    if (name == "star") return Topology::Star;
    if (name == "erdos_renyi") return Topology::ErdosRenyi;
    if (name == "explicit" || name == "edges") return Topology::Explicit;
    return std::nullopt;
}

/// Edge list of a topology, in a deterministic order.
///
/// Erdos-Renyi graphs visit the pairs (i, j), i < j, in lexicographic order and
/// draw one 64-bit word from std::mt19937_64(seed) per pair; the pair becomes an
/// edge iff (word >> 11) * 2^-53 < prob. mt19937_64 output is fixed by the C++
/// standard, so graphs are bit-reproducible across platforms.
inline std::vector<Edge> topology_edges(const TopologySpec& spec) {
    const std::size_t n = spec.n;
    std::vector<Edge> edges;
    auto need = [&](std::size_t min_n) {
        if (n < min_n) throw Error(ErrorKind::InvalidSpec, "topology needs at least " + std::to_string(min_n) + " agents");
    };
    switch (spec.kind) {
    case Topology::Ring:
        need(3);
        for (std::size_t i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1});
        break;
    case Topology::Path:
        need(2);
        for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1});
        break;
    case Topology::Complete:
        need(2);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) edges.push_back({i, j, 1});
        break;
    case Topology::Star:
        need(2);
        for (std::size_t j = 1; j < n; ++j) edges.push_back({0, j, 1});
        break;
    case Topology::ErdosRenyi: {
        need(2);
        if (!(spec.prob >= 0.0 && spec.prob <= 1.0))
            throw Error(ErrorKind::InvalidSpec, "erdos_renyi probability must lie in [0, 1]");
        std::mt19937_64 rng(spec.seed);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
                if (u < spec.prob) edges.push_back({i, j, 1});
            }
        break;
    }
    case Topology::Explicit:
        need(1);
        for (const auto& e : spec.edges) {
            if (e.i >= n || e.j >= n) throw Error(ErrorKind::InvalidSpec, "edge endpoint out of range");
            if (e.i == e.j) throw Error(ErrorKind::InvalidSpec, "self-loops are not allowed");
            if (e.weight <= 0) throw Error(ErrorKind::InvalidSpec, "edge weights must be positive");
            for (const auto& f : edges)
                if ((f.i == e.i && f.j == e.j) || (f.i == e.j && f.j == e.i))
                    throw Error(ErrorKind::InvalidSpec, "duplicate edge");
            edges.push_back(e);
        }
        break;
    }
    return edges;
}

inline bool is_connected(std::size_t n, const std::vector<Edge>& edges) {
    if (n == 0) return false;
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::size_t components = n;
    for (const auto& e : edges) {
        const auto a = find(e.i), b = find(e.j);
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
    return components == 1;
}

/// mu * (D - Adj) in exact arithmetic.
inline RationalMatrix exact_laplacian(std::size_t n, const std::vector<Edge>& edges, const Rational& mu) {
    RationalMatrix l(n, n);
    for (const auto& e : edges) {
        const Rational w = mu * e.weight;
        l(e.i, e.i) += w;
        l(e.j, e.j) += w;
        l(e.i, e.j) -= w;
        l(e.j, e.i) -= w;
    }
    return l;
}

struct LaplacianReport {
    bool square = false;
    bool symmetric = false;
    bool zero_row_sums = false;
    bool positive_semidefinite = false;
    bool simple_zero_eigenvalue = false;
    double symmetry_residual = 0.0;   // max |L - L^T|
    double row_sum_residual = 0.0;    // max |L 1|
    double min_eigenvalue = 0.0;      // of (L + L^T) / 2
    double second_eigenvalue = 0.0;   // lambda_2 of (L + L^T) / 2

    bool ok() const { return square && symmetric && zero_row_sums && positive_semidefinite && simple_zero_eigenvalue; }

    std::string first_failure() const {
        if (!square) return "matrix is not square";
        if (!symmetric) return "not symmetric (residual " + std::to_string(symmetry_residual) + ")";
        if (!zero_row_sums) return "L*1 != 0 (residual " + std::to_string(row_sum_residual) + ")";
        if (!positive_semidefinite) return "not positive semidefinite (min eigenvalue " + std::to_string(min_eigenvalue) + ")";
        if (!simple_zero_eigenvalue)
            return "zero eigenvalue is not simple (lambda_2 = " + std::to_string(second_eigenvalue) + "); graph is disconnected";
        return "";
    }
};

inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kRowSumTol = 1e-12;
inline constexpr double kPsdTol = 1e-12;
inline constexpr double kConnectivityTol = 1e-9;

/// Checks each clause of the Laplacian assumption separately.
inline LaplacianReport validate_laplacian(const Eigen::MatrixXd& l) {
    LaplacianReport rep;
    rep.square = l.rows() == l.cols() && l.rows() > 0;
    if (!rep.square) return rep;
    const double scale = std::max(1.0, l.cwiseAbs().maxCoeff());
    rep.symmetry_residual = (l - l.transpose()).cwiseAbs().maxCoeff();
    rep.symmetric = rep.symmetry_residual <= kSymmetryTol * scale;
    rep.row_sum_residual = (l * Eigen::VectorXd::Ones(l.rows())).cwiseAbs().maxCoeff();
    rep.zero_row_sums = rep.row_sum_residual <= kRowSumTol * scale;

    const Eigen::MatrixXd sym = 0.5 * (l + l.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues();
    rep.min_eigenvalue = ev(0);
    rep.positive_semidefinite = rep.min_eigenvalue >= -kPsdTol * scale;
    rep.second_eigenvalue = ev.size() > 1 ? ev(1) : 0.0;
    rep.simple_zero_eigenvalue = ev.size() == 1 || rep.second_eigenvalue > kConnectivityTol;
    return rep;
}

/// Symmetric PSD Laplacian of a connected graph with its sorted
/// eigendecomposition L = V diag(lambda) V^T.
///
/// lambda_1 is pinned to exactly 0 with v_1 = 1/sqrt(n). Every other
/// eigenvector has its largest-magnitude entry positive (lowest index wins
/// ties), which makes the separated-system coordinates reproducible.
class LaplacianGraph {
public:
    static LaplacianGraph from_matrix(const Eigen::MatrixXd& l, double mu = 1.0) {
        if (!(mu > 0.0)) throw Error(ErrorKind::InvalidSpec, "mu must be positive");
        const Eigen::MatrixXd scaled = mu * l;
        const LaplacianReport rep = validate_laplacian(scaled);
        if (!rep.ok()) throw Error(ErrorKind::InvalidLaplacian, rep.first_failure());
        LaplacianGraph g;
        g.l_ = scaled;
        g.mu_ = mu;
        g.decompose();
        return g;
    }

    static LaplacianGraph from_exact(const RationalMatrix& l, const Rational& mu_applied) {
        Eigen::MatrixXd m(l.rows(), l.cols());
        for (std::size_t r = 0; r < l.rows(); ++r)
            for (std::size_t c = 0; c < l.cols(); ++c) m(r, c) = to_double(l(r, c));
        LaplacianGraph g = from_matrix(m, 1.0);
        g.mu_ = to_double(mu_applied);
        g.exact_ = l;
        return g;
    }

    std::size_t n() const { return static_cast<std::size_t>(l_.rows()); }
    const Eigen::MatrixXd& L() const { return l_; }
    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
    const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }
    double mu() const { return mu_; }
    /// Exact mu*(D - Adj) when the graph was built from a topology spec.
    const std::optional<RationalMatrix>& exact() const { return exact_; }

private:
    void decompose() {
        const Eigen::Index n = l_.rows();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l_);
        eigenvalues_ = es.eigenvalues();
        eigenvectors_ = es.eigenvectors();
        eigenvalues_(0) = 0.0;
        eigenvectors_.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
        for (Eigen::Index k = 1; k < n; ++k) {
            auto v = eigenvectors_.col(k);
            const double max_abs = v.cwiseAbs().maxCoeff();
            Eigen::Index pick = 0;
            for (Eigen::Index i = 0; i < n; ++i)
                if (std::abs(v(i)) >= max_abs - 1e-12) {
                    pick = i;
                    break;
                }
            if (v(pick) < 0) v = -v;
        }
    }

    Eigen::MatrixXd l_;
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXd eigenvectors_;
    double mu_ = 1.0;
    std::optional<RationalMatrix> exact_;
};

/// Builds mu*(D - Adj) for a topology; DisconnectedGraph when it is not connected.
inline LaplacianGraph build_laplacian(const TopologySpec& spec, const Rational& mu = 1) {
    if (mu <= 0) throw Error(ErrorKind::InvalidSpec, "mu must be positive");
    const auto edges = topology_edges(spec);
    if (!is_connected(spec.n, edges))
        throw Error(ErrorKind::DisconnectedGraph, "graph with " + std::to_string(spec.n) + " agents and " +
                                                      std::to_string(edges.size()) + " edges is not connected");
    return LaplacianGraph::from_exact(exact_laplacian(spec.n, edges, mu), mu);
}

}  // namespace canform
