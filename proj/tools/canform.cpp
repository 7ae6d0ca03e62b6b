#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>

#include "canform/cli.hpp"

namespace {

using canform::cli::ProblemOptions;
using canform::cli::SourceOptions;

void add_source(CLI::App* cmd, SourceOptions& s, const std::string& prefix = "", const std::string& what = "") {
    cmd->add_option("--" + prefix + "alg", s.alg, "Registered algorithm" + what + " (" +
                                                      [] {
                                                          std::string names;
                                                          for (const auto& n : canform::algorithm_names())
                                                              names += (names.empty() ? "" : ", ") + n;
                                                          return names;
                                                      }() +
                                                      ")");
    cmd->add_option("--" + prefix + "file", s.file, "Realization file" + what);
    cmd->add_option("--" + prefix + "zeta", s.zeta, "Canonical parameters" + what + " as \"z0,z1,z2,z3\"");
    cmd->add_option("--" + prefix + "alpha", s.alpha, "Stepsize" + what + " as p/q");
    cmd->add_option("--" + prefix + "beta", s.beta, "Extra parameter of the jakovetic variants" + what);
    cmd->add_option("--" + prefix + "mu", s.mu, "Gossip scaling W = I - mu*L" + what);
}

void add_problem(CLI::App* cmd, ProblemOptions& p) {
    cmd->add_option("--config", p.config, "Run configuration file")->check(CLI::ExistingFile);
    add_source(cmd, p.source);
    cmd->add_option("--graph", p.graph, "Graph, e.g. \"ring n=5\", \"complete(4)\", \"erdos_renyi n=8 prob=0.1 seed=7\"");
    cmd->add_option("--b", p.b, "Quadratic targets, one per agent (rows separated by ';' when d > 1)");
    cmd->add_option("--curvatures", p.curvatures, "Quadratic curvatures, one per agent (default 1)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Canonical forms, equivalence and simulation of distributed optimization algorithms", "canform"};
    app.require_subcommand(1);

    canform::cli::CanonicalizeOptions canon;
    auto* c = app.add_subcommand("canonicalize", "Reduce an algorithm to its canonical parameters");
    add_source(c, canon.source);
    c->add_option("--format", canon.format, "Output format")->check(CLI::IsMember({"text", "csv"}));

    canform::cli::CompareOptions cmp;
    auto* cm = app.add_subcommand("compare", "Decide whether two algorithms are equivalent");
    std::optional<std::string> pos_a, pos_b;
    cm->add_option("a", pos_a, "First algorithm name or realization file");
    cm->add_option("b", pos_b, "Second algorithm name or realization file");
    add_source(cm, cmp.a, "a-", " (first input)");
    add_source(cm, cmp.b, "b-", " (second input)");
    std::string shared_alpha = "1/10";
    std::optional<std::string> shared_beta, shared_mu;
    cm->add_option("--alpha", shared_alpha, "Stepsize for both inputs unless overridden")->capture_default_str();
    cm->add_option("--beta", shared_beta, "Extra parameter for both inputs unless overridden");
    cm->add_option("--mu", shared_mu, "Gossip scaling for both inputs unless overridden");

    canform::cli::TableOptions table;
    auto* t = app.add_subcommand("table", "Canonicalize every registered algorithm");
    t->add_option("--alpha", table.alpha, "Stepsize as p/q")->capture_default_str();
    t->add_option("--beta", table.beta, "Extra parameter of the jakovetic variants");
    t->add_option("--format", table.format, "Output format")->check(CLI::IsMember({"text", "csv"}));

    canform::cli::AnalyzeOptions analyze;
    auto* a = app.add_subcommand("analyze", "Pole/zero classification at every Laplacian eigenvalue");
    add_problem(a, analyze.problem);
    a->add_option("--tol", analyze.tol, "Root tolerance (default 1e-9)");
    a->add_option("--format", analyze.format, "Output format")->check(CLI::IsMember({"text", "csv"}));

    canform::cli::SimulateOptions sim;
    auto* s = app.add_subcommand("simulate", "Run the algorithm on a graph and objective");
    add_problem(s, sim.problem);
    s->add_option("--iterations,-K", sim.iterations, "Number of iterations");
    s->add_option("--output,-o", sim.output, "Trajectory CSV path ('-' for stdout)");
    s->add_option("--threshold", sim.threshold, "Final error needed for success (default 1e-8)");
    s->add_option("--engine", sim.engine, "canonical or realization")->check(CLI::IsMember({"canonical", "realization"}));
    s->add_option("--x0", sim.x0, "Initial x: zero, random or values");
    s->add_option("--w0", sim.w0, "Initial w: zero, random or values");

    canform::cli::FixedPointOptions fixed;
    auto* f = app.add_subcommand("fixed-point", "Construct the optimal fixed point");
    add_problem(f, fixed.problem);
    f->add_option("--format", fixed.format, "Output format")->check(CLI::IsMember({"text", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return canform::cli::kUsage;
    }

    if (*c) return canform::cli::cmd_canonicalize(canon, std::cout, std::cerr);
    if (*cm) {
        const auto assign = [](SourceOptions& side, const std::optional<std::string>& pos) {
            if (!pos) return;
            if (std::filesystem::is_regular_file(*pos))
                side.file = *pos;
            else
                side.alg = *pos;
        };
        assign(cmp.a, pos_a);
        assign(cmp.b, pos_b);
        for (auto* side : {&cmp.a, &cmp.b}) {
            if (!side->alg && !side->file && !side->zeta) continue;
            if (!side->alpha) side->alpha = shared_alpha;
            if (!side->beta) side->beta = shared_beta;
            if (!side->mu) side->mu = shared_mu;
        }
        return canform::cli::cmd_compare(cmp, std::cout, std::cerr);
    }
    if (*t) return canform::cli::cmd_table(table, std::cout, std::cerr);
    if (*a) return canform::cli::cmd_analyze(analyze, std::cout, std::cerr);
    if (*s) return canform::cli::cmd_simulate(sim, std::cout, std::cerr);
    if (*f) return canform::cli::cmd_fixed_point(fixed, std::cout, std::cerr);
    return canform::cli::kUsage;
}
