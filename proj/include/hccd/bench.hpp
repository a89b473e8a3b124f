#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hccd/citest.hpp"
#include "hccd/graph.hpp"
#include "hccd/hccd.hpp"
#include "hccd/metrics.hpp"
#include "hccd/synth.hpp"

namespace hccd {

/// Bad flag combination or value; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 2;
inline constexpr int io = 3;
inline constexpr int parse = 4;
inline constexpr int algorithm = 5;
}  // namespace exit_code

/// Algorithm names accepted by discover and bench.
const std::vector<std::string>& algorithm_names();
bool is_algorithm(const std::string& name);

/// Structural stand-in for a data-driven strength matrix: 1/d for skeleton
/// distance d, 0 between disconnected nodes.
WeightMatrix skeleton_weights(const Dag& dag);

struct AlgoRun {
    DiscoveryResult result;
    CiCounters counters;
    double runtime_ms = 0.0;
};

/// Runs one algorithm on a fresh engine over `source`. `w` drives the
/// clustering variants and is ignored by pc.
AlgoRun run_algorithm(const std::string& algo, std::shared_ptr<const CiSource> source,
                      const WeightMatrix& w, const std::vector<std::string>& names,
                      const HccdConfig& cfg, std::uint64_t seed);

nlohmann::json config_to_json(const HccdConfig& cfg);
nlohmann::json run_report(const std::string& algo, const AlgoRun& run,
                          const std::vector<std::string>& names, const HccdConfig& cfg,
                          std::uint64_t seed, const std::string& ci_source);

struct SynthOptions {
    SynthConfig cfg;
    DataKind kind = DataKind::Continuous;
    int cardinality = kDefaultCardinality;
    double dirichlet_alpha = kDefaultDirichletAlpha;
    /// Extra held-out rows written as a second dataset (0 disables).
    int test_samples = 0;
    std::string data_path;
    std::string truth_path;
    std::string meta_path;
    std::string test_data_path;
};

void cmd_synth(const SynthOptions& opt);

struct DiscoverOptions {
    std::string data_path;
    /// With `oracle`, the truth DAG answers every CI query.
    std::string truth_path;
    bool oracle = false;
    std::optional<DataKind> kind;
    std::string algo = "hccd";
    HccdConfig cfg;
    std::uint64_t seed = 0;
    std::string graph_path;
    std::string report_path;
};

/// Returns the run report that was written (or would be, when no path is set).
nlohmann::json cmd_discover(const DiscoverOptions& opt);

struct EvalOptions {
    std::string graph_path;
    std::string truth_path;
    std::string test_data_path;
    std::vector<std::string> metrics;
    double ess = kDefaultEss;
    std::string json_path;
    std::string csv_path;
};

struct EvalOutcome {
    EvalReport report;
    nlohmann::json json;
    std::vector<std::string> warnings;
};

EvalOutcome cmd_eval(const EvalOptions& opt);

struct BenchConfig {
    std::vector<int> n_grid{20};
    std::vector<double> rho_grid{3.0};
    std::vector<int> samples_grid{1000};
    int reps = 1;
    std::vector<std::string> algos{"pc", "hccd"};
    /// Normalization reference; added to `algos` when absent.
    std::string baseline = "pc";
    DataKind kind = DataKind::Continuous;
    HccdConfig cfg;
    std::uint64_t master_seed = 0;
};

struct BenchRow {
    int grid = 0;
    int n = 0;
    double rho = 0.0;
    int samples = 0;
    int rep = 0;
    std::uint64_t seed = 0;
    std::string algo;
    std::string status = "ok";
    EvalReport report;
    /// Ratio to the baseline on the same replication, per metric.
    RelativeReport relative;
};

struct BenchAggregate {
    int grid = 0;
    int n = 0;
    double rho = 0.0;
    int samples = 0;
    std::string algo;
    int runs = 0;
    int failures = 0;
    /// metric -> (mean, sample std) over successful runs.
    std::vector<std::pair<std::string, std::pair<double, double>>> stats;
    /// metric -> (mean, sample std) of the per-replication baseline ratios.
    std::vector<std::pair<std::string, std::pair<double, double>>> relative;

    double mean(const std::string& metric) const;
    double relative_mean(const std::string& metric) const;
};

struct BenchResult {
    std::vector<BenchRow> rows;
    std::vector<BenchAggregate> aggregates;
};

void validate(const BenchConfig& cfg);
std::uint64_t replication_seed(std::uint64_t master, int grid, int rep);
BenchResult run_bench(const BenchConfig& cfg);

/// Per-run rows, runtime included.
std::string runs_csv(const BenchResult& r);
/// Per-grid-point means and stds. Contains no timing, so it is reproducible
/// byte for byte under a fixed master seed.
std::string aggregate_csv(const BenchResult& r);

}  // namespace hccd
