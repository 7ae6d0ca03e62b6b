#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "canform/canonical.hpp"
#include "canform/error.hpp"
#include "canform/graph.hpp"
#include "canform/realization.hpp"

namespace canform {

/// f(x) = (1/n) sum_i f_i(x) over agents i, with x in R^d.
struct Objective {
    std::size_t n = 0;
    std::size_t d = 0;
    std::function<Eigen::VectorXd(std::size_t agent, const Eigen::VectorXd& x)> gradient;
    std::optional<Eigen::VectorXd> known_minimizer;

    /// Row i of the result is grad f_i evaluated at row i of y.
    Eigen::MatrixXd gradients(const Eigen::MatrixXd& y) const {
        Eigen::MatrixXd out(y.rows(), y.cols());
        for (Eigen::Index i = 0; i < y.rows(); ++i) {
            const Eigen::VectorXd g = gradient(static_cast<std::size_t>(i), y.row(i).transpose());
            if (g.size() != y.cols()) throw Error(ErrorKind::DimensionMismatch, "gradient has wrong dimension");
            out.row(i) = g.transpose();
        }
        return out;
    }
};

/// f_i(x) = (c_i / 2) ||x - b_i||^2. `b` is n x d.
inline Objective quadratic_objective(const Eigen::MatrixXd& b, const Eigen::VectorXd& curvatures) {
    if (curvatures.size() != b.rows()) throw Error(ErrorKind::DimensionMismatch, "one curvature per agent");
    for (Eigen::Index i = 0; i < curvatures.size(); ++i)
        if (!(curvatures(i) > 0.0)) throw Error(ErrorKind::NonpositiveCurvature, "agent " + std::to_string(i));
    Objective obj;
    obj.n = static_cast<std::size_t>(b.rows());
    obj.d = static_cast<std::size_t>(b.cols());
    obj.gradient = [b, curvatures](std::size_t i, const Eigen::VectorXd& x) -> Eigen::VectorXd {
        const auto r = static_cast<Eigen::Index>(i);
        return curvatures(r) * (x - b.row(r).transpose());
    };
    obj.known_minimizer = (curvatures.transpose() * b).transpose() / curvatures.sum();
    return obj;
}

/// f_i(x) = c_i sum_k log cosh(x_k - b_ik). Smooth and convex, with no closed-form
/// minimizer for non-symmetric data, so known_minimizer is left empty.
inline Objective logcosh_objective(const Eigen::MatrixXd& b, const Eigen::VectorXd& curvatures) {
    if (curvatures.size() != b.rows()) throw Error(ErrorKind::DimensionMismatch, "one curvature per agent");
    for (Eigen::Index i = 0; i < curvatures.size(); ++i)
        if (!(curvatures(i) > 0.0)) throw Error(ErrorKind::NonpositiveCurvature, "agent " + std::to_string(i));
    Objective obj;
    obj.n = static_cast<std::size_t>(b.rows());
    obj.d = static_cast<std::size_t>(b.cols());
    obj.gradient = [b, curvatures](std::size_t i, const Eigen::VectorXd& x) -> Eigen::VectorXd {
        const auto r = static_cast<Eigen::Index>(i);
        return curvatures(r) * (x - b.row(r).transpose()).array().tanh().matrix();
    };
    return obj;
}

/// Quantities recorded at iteration k; every matrix is n x d, agent i in row i.
/// Realization runs store the state blocks in `xi` and mirror xi[0], xi[1] into x, w.
struct Snapshot {
    Eigen::MatrixXd x, w, v1, v2, y, u;
    std::vector<Eigen::MatrixXd> xi;
};

struct Trajectory {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<Snapshot> steps;           // k = 0..K-1
    std::vector<Eigen::VectorXd> w_sums;   // sum_i w_i^k for k = 0..K
    std::size_t communication_rounds = 0;
    Eigen::MatrixXd final_x, final_w;      // state after the last iteration

    std::size_t iterations() const { return steps.size(); }
};

/// out = L * x computed row by row with a fixed summation order, so the result
/// for one column never depends on how many columns there are.
inline Eigen::MatrixXd laplacian_apply(const Eigen::MatrixXd& l, const Eigen::MatrixXd& x) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.rows(), x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c)
        for (Eigen::Index i = 0; i < l.rows(); ++i) {
            double acc = 0.0;
            for (Eigen::Index j = 0; j < l.cols(); ++j)
                if (l(i, j) != 0.0) acc += l(i, j) * x(j, c);
            out(i, c) = acc;
        }
    return out;
}

/// Runs the canonical algorithm for K iterations:
///   v1 = L x, v2 = L w (only when zeta2 != 0), y = x - zeta3 v1, u = grad f(y),
///   x+ = x + zeta0 w - alpha u - zeta1 v1 + zeta2 v2,  w+ = w - v1.
inline Trajectory run_canonical(const CanonicalParams& p, const LaplacianGraph& g, const Objective& obj,
                                const Eigen::MatrixXd& x0, const Eigen::MatrixXd& w0, std::size_t K) {
    const auto n = static_cast<Eigen::Index>(g.n());
    const auto d = static_cast<Eigen::Index>(obj.d);
    if (obj.n != g.n() || x0.rows() != n || w0.rows() != n || x0.cols() != d || w0.cols() != d)
        throw Error(ErrorKind::DimensionMismatch, "x0, w0 must be n x d and match the objective and graph");
    if (K < 1) throw Error(ErrorKind::DimensionMismatch, "K must be at least 1");

    const double alpha = to_double(p.alpha), z0 = to_double(p.zeta0), z1 = to_double(p.zeta1),
                 z2 = to_double(p.zeta2), z3 = to_double(p.zeta3);
    const bool second_round = p.zeta2 != 0;

    Trajectory traj;
    traj.n = g.n();
    traj.d = obj.d;
    traj.steps.reserve(K);
    Eigen::MatrixXd x = x0, w = w0;
    traj.w_sums.push_back(w.colwise().sum().transpose());
    for (std::size_t k = 0; k < K; ++k) {
        Snapshot s;
        s.v1 = laplacian_apply(g.L(), x);
        ++traj.communication_rounds;
        if (second_round) {
            s.v2 = laplacian_apply(g.L(), w);
            ++traj.communication_rounds;
        } else {
            s.v2 = Eigen::MatrixXd::Zero(n, d);
        }
        s.y = x - z3 * s.v1;
        s.u = obj.gradients(s.y);
        s.x = x;
        s.w = w;
        x = x + z0 * w - alpha * s.u - z1 * s.v1 + z2 * s.v2;
        w = w - s.v1;
        traj.w_sums.push_back(w.colwise().sum().transpose());
        traj.steps.push_back(std::move(s));
    }
    traj.final_x = x;
    traj.final_w = w;
    return traj;
}

/// Closed loop of an arbitrary realization. `xi0` holds s blocks of size n x d
/// (block r is state component r of every agent).
inline Trajectory run_realization(const StructuredRealization& r, const LaplacianGraph& g, const Objective& obj,
                                  const std::vector<Eigen::MatrixXd>& xi0, std::size_t K) {
    r.check_dimensions();
    if (r.D0 != 0 || r.D1 != 0)
        throw Error(ErrorKind::PassthroughInClosedLoop, "closed-loop simulation needs D0 = D1 = 0");
    const auto n = static_cast<Eigen::Index>(g.n());
    const auto d = static_cast<Eigen::Index>(obj.d);
    if (obj.n != g.n() || xi0.size() != r.s)
        throw Error(ErrorKind::DimensionMismatch, "initial state needs s blocks and the objective must match the graph");
    for (const auto& blk : xi0)
        if (blk.rows() != n || blk.cols() != d) throw Error(ErrorKind::DimensionMismatch, "state blocks must be n x d");
    if (K < 1) throw Error(ErrorKind::DimensionMismatch, "K must be at least 1");

    const auto a0 = r.A0.map(to_double), a1 = r.A1.map(to_double);
    const auto b0 = r.B0.map(to_double), b1 = r.B1.map(to_double);
    const auto c0 = r.C0.map(to_double), c1 = r.C1.map(to_double);
    const bool b1_used = !r.B1.is_zero();

    Trajectory traj;
    traj.n = g.n();
    traj.d = obj.d;
    std::vector<Eigen::MatrixXd> xi = xi0;
    std::vector<Eigen::MatrixXd> lxi(r.s);
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t c = 0; c < r.s; ++c) lxi[c] = laplacian_apply(g.L(), xi[c]);
        ++traj.communication_rounds;
        Snapshot s;
        s.y = Eigen::MatrixXd::Zero(n, d);
        for (std::size_t c = 0; c < r.s; ++c) s.y += c0(0, c) * xi[c] + c1(0, c) * lxi[c];
        s.u = obj.gradients(s.y);
        const Eigen::MatrixXd lu = b1_used ? laplacian_apply(g.L(), s.u) : Eigen::MatrixXd::Zero(n, d);
        std::vector<Eigen::MatrixXd> next(r.s);
        for (std::size_t row = 0; row < r.s; ++row) {
            next[row] = b0(row, 0) * s.u + b1(row, 0) * lu;
            for (std::size_t c = 0; c < r.s; ++c) next[row] += a0(row, c) * xi[c] + a1(row, c) * lxi[c];
        }
        s.x = xi[0];
        s.w = r.s > 1 ? xi[1] : Eigen::MatrixXd::Zero(n, d);
        s.v1 = Eigen::MatrixXd::Zero(n, d);
        s.v2 = Eigen::MatrixXd::Zero(n, d);
        s.xi = std::move(xi);
        xi = std::move(next);
        traj.w_sums.push_back(s.w.colwise().sum().transpose());
        traj.steps.push_back(std::move(s));
    }
    traj.final_x = xi[0];
    traj.final_w = r.s > 1 ? xi[1] : Eigen::MatrixXd::Zero(n, d);
    traj.w_sums.push_back(traj.final_w.colwise().sum().transpose());
    return traj;
}

/// Initial state for the 3-state NIDS realization: the first iterate is a plain
/// gradient step, x1 = x0 - alpha grad f(x0), and the state is (x1, x0, grad f(x0)).
inline std::vector<Eigen::MatrixXd> nids_initial_state(const Rational& alpha, const Objective& obj,
                                                       const Eigen::MatrixXd& x0) {
    const Eigen::MatrixXd g0 = obj.gradients(x0);
    return {x0 - to_double(alpha) * g0, x0, g0};
}

/// x0 in block 0 and zeros elsewhere.
inline std::vector<Eigen::MatrixXd> padded_initial_state(std::size_t s, const Eigen::MatrixXd& x0) {
    std::vector<Eigen::MatrixXd> xi(s, Eigen::MatrixXd::Zero(x0.rows(), x0.cols()));
    xi[0] = x0;
    return xi;
}

namespace detail {

template <class T>
T from_rational(const Rational& r) {
    if constexpr (std::is_same_v<T, Rational>)
        return r;
    else
        return static_cast<T>(to_double(r));
}

}  // namespace detail

/// Zero-state response (d = 1, no gradient feedback): outputs y^0..y^{K-1} for
/// inputs u^0..u^{K-1}, each a length-n vector. Exact when T = Rational.
template <class T>
std::vector<std::vector<T>> open_loop_response(const StructuredRealization& r, const Matrix<T>& l,
                                               const std::vector<std::vector<T>>& inputs) {
    r.check_dimensions();
    const std::size_t n = l.rows();
    if (l.cols() != n) throw Error(ErrorKind::DimensionMismatch, "Laplacian must be square");
    for (const auto& u : inputs)
        if (u.size() != n) throw Error(ErrorKind::DimensionMismatch, "each input must have one entry per agent");

    const auto cv = [](const Rational& v) { return detail::from_rational<T>(v); };
    const auto a0 = r.A0.map(cv), a1 = r.A1.map(cv), b0 = r.B0.map(cv), b1 = r.B1.map(cv);
    const auto c0 = r.C0.map(cv), c1 = r.C1.map(cv);
    const T d0 = cv(r.D0), d1 = cv(r.D1);

    auto apply_l = [&](const std::vector<T>& v) {
        std::vector<T> out(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (!(l(i, j) == T{})) out[i] = out[i] + l(i, j) * v[j];
        return out;
    };

    std::vector<std::vector<T>> xi(r.s, std::vector<T>(n));
    std::vector<std::vector<T>> outputs;
    outputs.reserve(inputs.size());
    for (const auto& u : inputs) {
        std::vector<std::vector<T>> lxi;
        for (const auto& comp : xi) lxi.push_back(apply_l(comp));
        const auto lu = apply_l(u);
        std::vector<T> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            T acc = d0 * u[i] + d1 * lu[i];
            for (std::size_t c = 0; c < r.s; ++c) acc = acc + c0(0, c) * xi[c][i] + c1(0, c) * lxi[c][i];
            y[i] = acc;
        }
        std::vector<std::vector<T>> next(r.s, std::vector<T>(n));
        for (std::size_t row = 0; row < r.s; ++row)
            for (std::size_t i = 0; i < n; ++i) {
                T acc = b0(row, 0) * u[i] + b1(row, 0) * lu[i];
                for (std::size_t c = 0; c < r.s; ++c) acc = acc + a0(row, c) * xi[c][i] + a1(row, c) * lxi[c][i];
                next[row][i] = acc;
            }
        xi = std::move(next);
        outputs.push_back(std::move(y));
    }
    return outputs;
}

/// Exact zero-state response on a graph built from a topology spec.
inline std::vector<std::vector<Rational>> open_loop_response(const StructuredRealization& r, const LaplacianGraph& g,
                                                             const std::vector<std::vector<Rational>>& inputs) {
    if (!g.exact()) throw Error(ErrorKind::InvalidLaplacian, "graph has no exact Laplacian");
    return open_loop_response<Rational>(r, *g.exact(), inputs);
}

struct ConvergenceMetrics {
    std::vector<double> error;      // max_i ||y_i^k - x_star||
    std::vector<double> consensus;  // max_{i,j} ||y_i^k - y_j^k||
};

inline ConvergenceMetrics convergence_metrics(const Trajectory& traj, const Eigen::VectorXd& x_star) {
    if (static_cast<std::size_t>(x_star.size()) != traj.d)
        throw Error(ErrorKind::DimensionMismatch, "x_star dimension differs from trajectory");
    ConvergenceMetrics m;
    for (const auto& s : traj.steps) {
        double err = 0.0, cons = 0.0;
        // NaN propagates so a diverged run never reports a small error.
        auto take = [](double& acc, double v) {
            if (std::isnan(v) || v > acc) acc = std::isnan(acc) ? acc : v;
        };
        for (Eigen::Index i = 0; i < s.y.rows(); ++i) {
            take(err, (s.y.row(i).transpose() - x_star).norm());
            for (Eigen::Index j = i + 1; j < s.y.rows(); ++j) take(cons, (s.y.row(i) - s.y.row(j)).norm());
        }
        m.error.push_back(err);
        m.consensus.push_back(cons);
    }
    return m;
}

/// One row per (iteration, agent, coordinate); 17 significant digits.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "k,i,coord,x,w,v1,v2,y,u\n";
    char buf[512];
    for (std::size_t k = 0; k < traj.steps.size(); ++k) {
        const auto& s = traj.steps[k];
        for (Eigen::Index i = 0; i < s.y.rows(); ++i)
            for (Eigen::Index c = 0; c < s.y.cols(); ++c) {
                std::snprintf(buf, sizeof buf, "%zu,%td,%td,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", k, i, c, s.x(i, c),
                              s.w(i, c), s.v1(i, c), s.v2(i, c), s.y(i, c), s.u(i, c));
                out << buf;
            }
    }
}

}  // namespace canform
