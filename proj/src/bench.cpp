#include "hccd/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>

#include "hccd/io.hpp"
#include "hccd/spectral.hpp"

namespace hccd {

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<int> iota_vars(int n) {
    std::vector<int> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

std::pair<double, double> mean_std(const std::vector<double>& xs) {
    if (xs.empty()) return {std::nan(""), std::nan("")};
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (xs.size() - 1))};
}

// Metrics summarized per grid point; runtime is left out to keep aggregates reproducible.
const std::vector<std::string>& aggregate_metrics() {
    static const std::vector<std::string> m{"shd",         "causal_accuracy", "bdeu",    "extra_edges",
                                            "missing_edges", "ci_unique",     "ci_total"};
    return m;
}

std::optional<double> metric(const EvalReport& r, const std::string& name) {
    for (const auto& [k, v] : metric_values(r))
        if (k == name) return v;
    return std::nullopt;
}

std::optional<double> metric(const RelativeReport& r, const std::string& name) {
    auto it = r.find(name);
    return it == r.end() ? std::nullopt : it->second;
}

const Dataset* nullable(const std::optional<Dataset>& d) { return d ? &*d : nullptr; }

}  // namespace

const std::vector<std::string>& algorithm_names() {
    static const std::vector<std::string> names{"pc", "hccd", "hccd-flat", "hccd-notc", "hccd-nocomp", "clustcd"};
    return names;
}

bool is_algorithm(const std::string& name) {
    const auto& a = algorithm_names();
    return std::find(a.begin(), a.end(), name) != a.end();
}

WeightMatrix skeleton_weights(const Dag& dag) {
    const int n = dag.size();
    WeightMatrix w = WeightMatrix::Zero(n, n);
    for (int s = 0; s < n; ++s) {
        std::vector<int> dist(n, -1);
        std::queue<int> q;
        dist[s] = 0;
        q.push(s);
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            for (int u = 0; u < n; ++u) {
                if (dist[u] < 0 && dag.adjacent(v, u)) {
                    dist[u] = dist[v] + 1;
                    q.push(u);
                }
            }
        }
        for (int t = 0; t < n; ++t)
            if (t != s && dist[t] > 0) w(s, t) = 1.0 / dist[t];
    }
    return w;
}

AlgoRun run_algorithm(const std::string& algo, std::shared_ptr<const CiSource> source,
                      const WeightMatrix& w, const std::vector<std::string>& names,
                      const HccdConfig& cfg, std::uint64_t seed) {
    if (!is_algorithm(algo)) throw UsageError("unknown algorithm: " + algo);
    CiEngine engine(std::move(source));
    const std::vector<int> vars = iota_vars(static_cast<int>(names.size()));
    HccdConfig c = cfg;
    const auto start = std::chrono::steady_clock::now();
    AlgoRun run;
    if (algo == "pc") {
        run.result = pc_baseline(engine, names, vars, c.pc);
    } else if (algo == "clustcd") {
        const ClusterTree split = build_flat_tree(w, vars, c, seed);
        run.result = clustcd_run(engine, names, vars, split.leaves(), c);
    } else {
        c.variant = algo == "hccd"        ? Variant::Full
                    : algo == "hccd-flat" ? Variant::Flat
                    : algo == "hccd-notc" ? Variant::NotComplete
                                          : Variant::NoCompleteness;
        run.result = hccd_run(engine, w, names, vars, c, seed);
    }
    run.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    run.counters = engine.counters();
    return run;
}

nlohmann::json config_to_json(const HccdConfig& cfg) {
    nlohmann::json j = {
        {"alpha", cfg.pc.alpha},
        {"tau", cfg.tau},
        {"min_cluster", cfg.min_cluster},
        {"flat_k", cfg.flat_k},
    };
    j["max_depth"] = cfg.max_depth ? nlohmann::json(*cfg.max_depth) : nlohmann::json(nullptr);
    j["split_k"] = cfg.split_k ? nlohmann::json(*cfg.split_k) : nlohmann::json(nullptr);
    j["max_condition_size"] =
        cfg.pc.max_condition_size ? nlohmann::json(*cfg.pc.max_condition_size) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json run_report(const std::string& algo, const AlgoRun& run,
                          const std::vector<std::string>& names, const HccdConfig& cfg,
                          std::uint64_t seed, const std::string& ci_source) {
    return {
        {"variant", algo},
        {"ci_source", ci_source},
        {"cluster_tree", tree_to_json(run.result.tree, names)},
        {"ci",
         {{"unique", run.counters.unique_tests},
          {"total", run.counters.total_queries},
          {"max_condition_size", run.counters.max_condition_size}}},
        {"orientation_conflicts", run.result.orientation_conflicts},
        {"edges", run.result.graph.edge_count()},
        {"runtime_ms", run.runtime_ms},
        {"seed", seed},
        {"config", config_to_json(cfg)},
    };
}

void cmd_synth(const SynthOptions& opt) {
    try {
        opt.cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (opt.data_path.empty() || opt.truth_path.empty()) throw UsageError("synth needs --data and --truth");
    if (opt.test_samples > 0 && opt.test_data_path.empty())
        throw UsageError("--test-samples needs --test-data");
    Rng rng(opt.cfg.seed);
    const Dag dag = random_connected_dag(opt.cfg, rng);
    std::optional<Dataset> data, test;
    if (opt.kind == DataKind::Continuous) {
        const GroundTruth gt = sample_edge_weights(dag, rng);
        data = sample_linear_gaussian(gt, opt.cfg.samples, rng);
        if (opt.test_samples > 0) test = sample_linear_gaussian(gt, opt.test_samples, rng);
    } else {
        const DiscreteBn bn = random_discrete_bn(dag, opt.cardinality, opt.dirichlet_alpha, rng);
        data = sample_discrete_bn(bn, opt.cfg.samples, rng);
        if (opt.test_samples > 0) test = sample_discrete_bn(bn, opt.test_samples, rng);
    }
    write_csv_dataset(opt.data_path, *data);
    write_edge_list(opt.truth_path, to_pdag(dag));
    if (test) write_csv_dataset(opt.test_data_path, *test);
    if (!opt.meta_path.empty()) {
        nlohmann::json meta = {
            {"seed", opt.cfg.seed},
            {"n", opt.cfg.n},
            {"rho", opt.cfg.rho},
            {"samples", opt.cfg.samples},
            {"test_samples", opt.test_samples},
            {"kind", to_string(opt.kind)},
            {"edges", dag.edge_count()},
        };
        if (opt.kind == DataKind::Discrete) {
            meta["cardinality"] = opt.cardinality;
            meta["dirichlet_alpha"] = opt.dirichlet_alpha;
        }
        write_text(opt.meta_path, meta.dump(2) + "\n");
    }
}

nlohmann::json cmd_discover(const DiscoverOptions& opt) {
    if (!is_algorithm(opt.algo)) throw UsageError("unknown algorithm: " + opt.algo);
    if (opt.oracle && opt.truth_path.empty()) throw UsageError("--oracle needs --truth");
    if (!opt.oracle && opt.data_path.empty()) throw UsageError("discover needs --data (or --oracle --truth)");

    std::optional<Dataset> data;
    if (!opt.data_path.empty()) data = load_csv_dataset(opt.data_path, opt.kind);

    std::shared_ptr<const CiSource> source;
    std::vector<std::string> names;
    WeightMatrix w;
    if (opt.oracle) {
        const std::optional<std::vector<std::string>> order =
            data ? std::optional(data->names()) : std::nullopt;
        Dag truth = to_dag(load_edge_list(opt.truth_path, order));
        names = truth.names();
        w = data ? pairwise_strength(*data) : skeleton_weights(truth);
        source = std::make_shared<OracleSource>(std::move(truth));
    } else {
        names = data->names();
        w = pairwise_strength(*data);
        if (data->kind() == DataKind::Continuous)
            source = std::make_shared<FisherZSource>(*data, opt.cfg.pc.alpha);
        else
            source = std::make_shared<G2Source>(*data, opt.cfg.pc.alpha);
    }
    const std::string source_name = source->name();
    const AlgoRun run = run_algorithm(opt.algo, source, w, names, opt.cfg, opt.seed);
    nlohmann::json report = run_report(opt.algo, run, names, opt.cfg, opt.seed, source_name);
    if (!opt.graph_path.empty()) write_graph_json(opt.graph_path, run.result.graph);
    if (!opt.report_path.empty()) write_text(opt.report_path, report.dump(2) + "\n");
    return report;
}

EvalOutcome cmd_eval(const EvalOptions& opt) {
    if (opt.graph_path.empty() || opt.truth_path.empty()) throw UsageError("eval needs --graph and --truth");
    const std::vector<std::string> known{"shd", "causal_accuracy", "bdeu", "edges"};
    for (const auto& m : opt.metrics)
        if (std::find(known.begin(), known.end(), m) == known.end()) throw UsageError("unknown metric: " + m);
    auto wants = [&](const std::string& m) {
        return opt.metrics.empty() || std::find(opt.metrics.begin(), opt.metrics.end(), m) != opt.metrics.end();
    };

    const Pdag graph = load_graph(opt.graph_path);
    const Dag truth = to_dag(load_graph(opt.truth_path));
    EvalOutcome out;
    std::optional<Dataset> test;
    if (wants("bdeu")) {
        if (opt.test_data_path.empty()) {
            out.warnings.push_back("bdeu skipped: no test data");
        } else {
            test = load_csv_dataset(opt.test_data_path);
            if (test->kind() != DataKind::Discrete) {
                out.warnings.push_back("bdeu skipped: test data is continuous");
                test.reset();
            }
        }
    }
    out.report = evaluate(graph, truth, nullable(test), opt.ess);
    const nlohmann::json full = eval_to_json(out.report);
    nlohmann::json j = nlohmann::json::object();
    if (wants("shd")) j["shd"] = full["shd"];
    if (wants("causal_accuracy")) {
        j["causal_accuracy"] = full["causal_accuracy"];
        j["causal_accuracy_definition"] = full["causal_accuracy_definition"];
    }
    if (wants("bdeu")) j["bdeu"] = full["bdeu"];
    if (wants("edges")) {
        j["extra_edges"] = full["extra_edges"];
        j["missing_edges"] = full["missing_edges"];
    }
    j["warnings"] = out.warnings;
    out.json = j;

    if (!opt.json_path.empty()) write_text(opt.json_path, j.dump(2) + "\n");
    if (!opt.csv_path.empty()) {
        std::string header, row;
        bool first = true;
        for (const auto& [k, v] : metric_values(out.report)) {
            if (k == "ci_unique" || k == "ci_total" || k == "runtime_ms") continue;
            if (!first) {
                header += ',';
                row += ',';
            }
            first = false;
            header += k;
            if (v) row += fmt(*v);
        }
        write_text(opt.csv_path, header + "\n" + row + "\n");
    }
    return out;
}

double BenchAggregate::mean(const std::string& m) const {
    for (const auto& [k, v] : stats)
        if (k == m) return v.first;
    return std::nan("");
}

double BenchAggregate::relative_mean(const std::string& m) const {
    for (const auto& [k, v] : relative)
        if (k == m) return v.first;
    return std::nan("");
}

void validate(const BenchConfig& cfg) {
    if (cfg.reps <= 0) throw UsageError("reps must be positive");
    if (cfg.n_grid.empty() || cfg.rho_grid.empty() || cfg.samples_grid.empty())
        throw UsageError("sweep grids must be non-empty");
    if (cfg.algos.empty()) throw UsageError("no algorithms requested");
    for (const auto& a : cfg.algos)
        if (!is_algorithm(a)) throw UsageError("unknown algorithm: " + a);
    if (!is_algorithm(cfg.baseline)) throw UsageError("unknown baseline: " + cfg.baseline);
    for (int n : cfg.n_grid)
        for (double rho : cfg.rho_grid)
            for (int s : cfg.samples_grid) {
                SynthConfig sc{n, rho, s, 0};
                try {
                    sc.validate();
                } catch (const std::invalid_argument& e) {
                    throw UsageError(e.what());
                }
            }
}

std::uint64_t replication_seed(std::uint64_t master, int grid, int rep) {
    return mix_seed(mix_seed(master, static_cast<std::uint64_t>(grid)), static_cast<std::uint64_t>(rep));
}

BenchResult run_bench(const BenchConfig& cfg) {
    validate(cfg);
    std::vector<std::string> algos = cfg.algos;
    if (std::find(algos.begin(), algos.end(), cfg.baseline) == algos.end())
        algos.insert(algos.begin(), cfg.baseline);

    BenchResult result;
    int grid = 0;
    for (int n : cfg.n_grid) {
        for (double rho : cfg.rho_grid) {
            for (int samples : cfg.samples_grid) {
                const std::size_t first_row = result.rows.size();
                for (int rep = 0; rep < cfg.reps; ++rep) {
                    const std::uint64_t seed = replication_seed(cfg.master_seed, grid, rep);
                    std::vector<BenchRow> rows;
                    for (const auto& a : algos)
                        rows.push_back({grid, n, rho, samples, rep, seed, a, "ok", {}, {}});
                    try {
                        Rng rng(seed);
                        const Dag dag = random_connected_dag({n, rho, samples, seed}, rng);
                        std::shared_ptr<const CiSource> source;
                        std::optional<Dataset> data, test;
                        if (cfg.kind == DataKind::Continuous) {
                            data = sample_linear_gaussian(sample_edge_weights(dag, rng), samples, rng);
                            source = std::make_shared<FisherZSource>(*data, cfg.cfg.pc.alpha);
                        } else {
                            const DiscreteBn bn =
                                random_discrete_bn(dag, kDefaultCardinality, kDefaultDirichletAlpha, rng);
                            data = sample_discrete_bn(bn, samples, rng);
                            test = sample_discrete_bn(bn, samples, rng);
                            source = std::make_shared<G2Source>(*data, cfg.cfg.pc.alpha);
                        }
                        const WeightMatrix w = pairwise_strength(*data);
                        for (auto& row : rows) {
                            try {
                                const AlgoRun run =
                                    run_algorithm(row.algo, source, w, dag.names(), cfg.cfg, mix_seed(seed, 1));
                                row.report = evaluate(run.result.graph, dag, nullable(test));
                                row.report.ci_unique = run.counters.unique_tests;
                                row.report.ci_total = run.counters.total_queries;
                                row.report.runtime_ms = run.runtime_ms;
                            } catch (const std::exception& e) {
                                row.status = std::string("error: ") + e.what();
                            }
                        }
                    } catch (const std::exception& e) {
                        for (auto& row : rows) row.status = std::string("error: ") + e.what();
                    }
                    const auto base = std::find_if(rows.begin(), rows.end(),
                                                   [&](const BenchRow& r) { return r.algo == cfg.baseline; });
                    for (auto& row : rows)
                        if (row.status == "ok" && base->status == "ok")
                            row.relative = relative_report(row.report, base->report);
                    for (auto& row : rows) result.rows.push_back(std::move(row));
                }

                for (const auto& a : algos) {
                    BenchAggregate agg{grid, n, rho, samples, a, 0, 0, {}, {}};
                    std::vector<const BenchRow*> ok;
                    for (std::size_t i = first_row; i < result.rows.size(); ++i) {
                        const BenchRow& r = result.rows[i];
                        if (r.algo != a) continue;
                        ++agg.runs;
                        if (r.status == "ok")
                            ok.push_back(&r);
                        else
                            ++agg.failures;
                    }
                    for (const auto& m : aggregate_metrics()) {
                        std::vector<double> values, ratios;
                        for (const BenchRow* r : ok) {
                            if (auto v = metric(r->report, m)) values.push_back(*v);
                            if (auto v = metric(r->relative, m)) ratios.push_back(*v);
                        }
                        if (values.empty()) continue;
                        agg.stats.emplace_back(m, mean_std(values));
                        agg.relative.emplace_back(m, mean_std(ratios));
                    }
                    result.aggregates.push_back(std::move(agg));
                }
                ++grid;
            }
        }
    }
    return result;
}

std::string runs_csv(const BenchResult& r) {
    std::ostringstream out;
    out << "grid,n,rho,samples,rep,seed,algo,status";
    const auto names = metric_values(EvalReport{});
    for (const auto& [k, v] : names) out << ',' << k;
    for (const auto& m : aggregate_metrics()) out << ",rel_" << m;
    out << '\n';
    for (const auto& row : r.rows) {
        std::string status = row.status;
        std::replace(status.begin(), status.end(), ',', ';');
        std::replace(status.begin(), status.end(), '\n', ' ');
        out << row.grid << ',' << row.n << ',' << fmt(row.rho) << ',' << row.samples << ',' << row.rep << ','
            << row.seed << ',' << row.algo << ',' << status;
        const bool ok = row.status == "ok";
        for (const auto& [k, v] : metric_values(row.report)) out << ',' << (ok && v ? fmt(*v) : "");
        for (const auto& m : aggregate_metrics()) {
            const auto v = metric(row.relative, m);
            out << ',' << (v ? fmt(*v) : "");
        }
        out << '\n';
    }
    return out.str();
}

std::string aggregate_csv(const BenchResult& r) {
    std::ostringstream out;
    out << "grid,n,rho,samples,algo,runs,failures";
    for (const auto& m : aggregate_metrics()) out << ",mean_" << m << ",std_" << m;
    for (const auto& m : aggregate_metrics()) out << ",rel_mean_" << m << ",rel_std_" << m;
    out << '\n';
    for (const auto& a : r.aggregates) {
        out << a.grid << ',' << a.n << ',' << fmt(a.rho) << ',' << a.samples << ',' << a.algo << ',' << a.runs
            << ',' << a.failures;
        auto emit = [&](const std::vector<std::pair<std::string, std::pair<double, double>>>& v,
                        const std::string& m) {
            for (const auto& [k, s] : v)
                if (k == m) {
                    out << ',' << fmt(s.first) << ',' << fmt(s.second);
                    return;
                }
            out << ",,";
        };
        for (const auto& m : aggregate_metrics()) emit(a.stats, m);
        for (const auto& m : aggregate_metrics()) emit(a.relative, m);
        out << '\n';
    }
    return out.str();
}

}  // namespace hccd
