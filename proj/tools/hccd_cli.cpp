#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "hccd/bench.hpp"
#include "hccd/io.hpp"
#include "hccd/spectral.hpp"
#include "hccd/synth.hpp"

using namespace hccd;

namespace {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("HCCD_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError(std::string("HCCD_SEED is not an unsigned integer: ") + env);
        }
    }
    return 0;
}

DataKind kind_from(const std::string& text) {
    auto k = parse_kind(text);
    if (!k) throw UsageError("unknown kind: " + text);
    return *k;
}

void add_hccd_flags(CLI::App* cmd, HccdConfig& cfg, std::optional<int>& max_depth, std::optional<int>& split_k,
                    std::optional<int>& max_cond) {
    cmd->add_option("--alpha", cfg.pc.alpha, "CI test significance level")->capture_default_str();
    cmd->add_option("--tau", cfg.tau, "near-zero eigenvalue threshold")->capture_default_str();
    cmd->add_option("--min-cluster", cfg.min_cluster, "clusters at or below this size are leaves")
        ->capture_default_str();
    cmd->add_option("--flat-k", cfg.flat_k, "cluster count for hccd-flat and clustcd")->capture_default_str();
    cmd->add_option("--max-depth", max_depth, "deepest tree level that may split (root is 0)");
    cmd->add_option("--split-k", split_k, "fixed cluster count per split");
    cmd->add_option("--max-cond", max_cond, "largest conditioning set size");
}

void apply_optionals(HccdConfig& cfg, const std::optional<int>& max_depth, const std::optional<int>& split_k,
                     const std::optional<int>& max_cond) {
    cfg.max_depth = max_depth;
    cfg.split_k = split_k;
    cfg.pc.max_condition_size = max_cond;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical clustering wrapper around PC for causal discovery"};
    app.require_subcommand(1);

    // synth
    SynthOptions so;
    std::string synth_kind = "continuous";
    std::optional<std::uint64_t> synth_seed;
    auto* synth = app.add_subcommand("synth", "sample a random connected DAG and a dataset");
    synth->add_option("--n", so.cfg.n, "number of variables")->capture_default_str();
    synth->add_option("--rho", so.cfg.rho, "connectivity factor")->capture_default_str();
    synth->add_option("--samples", so.cfg.samples, "rows to sample")->capture_default_str();
    synth->add_option("--seed", synth_seed, "seed (default: HCCD_SEED or 0)");
    synth->add_option("--kind", synth_kind, "continuous or discrete")->capture_default_str();
    synth->add_option("--cardinality", so.cardinality, "states per discrete variable")->capture_default_str();
    synth->add_option("--test-samples", so.test_samples, "held-out rows")->capture_default_str();
    synth->add_option("--data", so.data_path, "output CSV")->required();
    synth->add_option("--truth", so.truth_path, "output edge list")->required();
    synth->add_option("--meta", so.meta_path, "output metadata JSON");
    synth->add_option("--test-data", so.test_data_path, "output held-out CSV");

    // discover
    DiscoverOptions dopt;
    std::string discover_kind;
    std::optional<std::uint64_t> discover_seed;
    std::optional<int> d_depth, d_split, d_cond;
    auto* discover = app.add_subcommand("discover", "learn a graph from data");
    discover->add_option("--data", dopt.data_path, "dataset CSV");
    discover->add_option("--truth", dopt.truth_path, "truth edge list (used with --oracle)");
    discover->add_flag("--oracle", dopt.oracle, "answer CI queries by d-separation in the truth");
    discover->add_option("--kind", discover_kind, "override the dataset kind");
    discover->add_option("--algo", dopt.algo, "pc, hccd, hccd-flat, hccd-notc, hccd-nocomp or clustcd")->capture_default_str();
    discover->add_option("--seed", discover_seed, "clustering seed (default: HCCD_SEED or 0)");
    discover->add_option("--out", dopt.graph_path, "graph JSON output");
    discover->add_option("--report", dopt.report_path, "run report JSON output");
    add_hccd_flags(discover, dopt.cfg, d_depth, d_split, d_cond);

    // eval
    EvalOptions eopt;
    auto* eval = app.add_subcommand("eval", "score a learned graph against the truth");
    eval->add_option("--graph", eopt.graph_path, "graph JSON or edge list")->required();
    eval->add_option("--truth", eopt.truth_path, "truth DAG, JSON or edge list")->required();
    eval->add_option("--test-data", eopt.test_data_path, "discrete CSV for BDeu");
    eval->add_option("--metrics", eopt.metrics, "subset of shd, causal_accuracy, bdeu, edges")->delimiter(',');
    eval->add_option("--ess", eopt.ess, "BDeu equivalent sample size")->capture_default_str();
    eval->add_option("--out", eopt.json_path, "JSON output (default: stdout)");
    eval->add_option("--csv", eopt.csv_path, "CSV output");

    // bench
    BenchConfig bc;
    std::string bench_kind = "continuous";
    std::optional<std::uint64_t> bench_seed;
    std::optional<int> b_depth, b_split, b_cond;
    std::string runs_path, agg_path;
    auto* bench = app.add_subcommand("bench", "seeded sweep over synthetic datasets");
    bench->add_option("--n", bc.n_grid, "variable counts")->delimiter(',');
    bench->add_option("--rho", bc.rho_grid, "connectivity factors")->delimiter(',');
    bench->add_option("--samples", bc.samples_grid, "sample sizes")->delimiter(',');
    bench->add_option("--reps", bc.reps, "repetitions per grid point")->capture_default_str();
    bench->add_option("--algos", bc.algos, "algorithms to run")->delimiter(',');
    bench->add_option("--baseline", bc.baseline, "normalization reference")->capture_default_str();
    bench->add_option("--kind", bench_kind, "continuous (Fisher-z) or discrete (G2)")->capture_default_str();
    bench->add_option("--seed", bench_seed, "master seed (default: HCCD_SEED or 0)");
    bench->add_option("--runs", runs_path, "per-run CSV output");
    bench->add_option("--out", agg_path, "aggregate CSV output (default: stdout)");
    add_hccd_flags(bench, bc.cfg, b_depth, b_split, b_cond);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_code::usage;
    }

    try {
        if (*synth) {
            so.cfg.seed = synth_seed.value_or(default_seed());
            so.kind = kind_from(synth_kind);
            cmd_synth(so);
        } else if (*discover) {
            dopt.seed = discover_seed.value_or(default_seed());
            if (!discover_kind.empty()) dopt.kind = kind_from(discover_kind);
            apply_optionals(dopt.cfg, d_depth, d_split, d_cond);
            const auto report = cmd_discover(dopt);
            if (dopt.report_path.empty()) std::cout << report.dump(2) << '\n';
        } else if (*eval) {
            const EvalOutcome out = cmd_eval(eopt);
            for (const auto& w : out.warnings) std::cerr << "warning: " << w << '\n';
            if (eopt.json_path.empty()) std::cout << out.json.dump(2) << '\n';
        } else if (*bench) {
            bc.master_seed = bench_seed.value_or(default_seed());
            bc.kind = kind_from(bench_kind);
            apply_optionals(bc.cfg, b_depth, b_split, b_cond);
            const BenchResult r = run_bench(bc);
            if (!runs_path.empty()) write_text(runs_path, runs_csv(r));
            if (agg_path.empty())
                std::cout << aggregate_csv(r);
            else
                write_text(agg_path, aggregate_csv(r));
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return exit_code::usage;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return exit_code::io;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return exit_code::parse;
    } catch (const UnknownNode& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return exit_code::parse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code::algorithm;
    }
    return exit_code::ok;
}
