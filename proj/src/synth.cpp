#include "hccd/synth.hpp"

#include <algorithm>

namespace hccd {

void SynthConfig::validate() const {
    if (n < 2) throw std::invalid_argument("synth: n must be at least 2");
    if (rho <= 0) throw std::invalid_argument("synth: rho must be positive");
    if (rho / (n - 1) > 1.0) throw std::invalid_argument("synth: rho/(n-1) must not exceed 1");
    if (samples < 1) throw std::invalid_argument("synth: samples must be at least 1");
}

std::vector<std::string> default_names(int n) {
    const int width = static_cast<int>(std::to_string(n).size());
    std::vector<std::string> names;
    names.reserve(n);
    for (int i = 1; i <= n; ++i) {
        std::string digits = std::to_string(i);
        names.push_back("X" + std::string(width - digits.size(), '0') + digits);
    }
    return names;
}

Dag random_connected_dag(const SynthConfig& cfg, Rng& rng) {
    cfg.validate();
    const int n = cfg.n;
    std::bernoulli_distribution edge(cfg.rho / (n - 1));
    for (int attempt = 0; attempt < kMaxDagAttempts; ++attempt) {
        BoolMatrix adj(n);
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (edge(rng)) {
                    adj.set(i, j, true);
                    edges.emplace_back(i, j);
                }
            }
        }
        if (connected_components(n, edges).size() == 1) return Dag(default_names(n), std::move(adj));
    }
    throw RetryLimit();
}

GroundTruth sample_edge_weights(const Dag& dag, Rng& rng) {
    std::uniform_real_distribution<double> weight(0.1, 1.0);
    const int n = dag.size();
    GroundTruth gt{dag, Eigen::MatrixXd::Zero(n, n)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (dag.has_edge(i, j)) gt.weights(i, j) = weight(rng);
    return gt;
}

Dataset sample_linear_gaussian(const GroundTruth& gt, int samples, Rng& rng) {
    const int n = gt.dag.size();
    const std::vector<int> order = topological_order(gt.dag.adjacency());
    std::normal_distribution<double> noise(0.0, 1.0);
    Eigen::MatrixXd x(samples, n);
    for (int s = 0; s < samples; ++s) {
        for (int v : order) {
            double value = noise(rng);
            for (int p : gt.dag.parents(v)) value += gt.weights(p, v) * x(s, p);
            x(s, v) = value;
        }
    }
    return Dataset(gt.dag.names(), std::move(x), DataKind::Continuous);
}

DiscreteBn random_discrete_bn(const Dag& dag, int cardinality, double dirichlet_alpha, Rng& rng) {
    if (cardinality < 2) throw std::invalid_argument("discrete BN: cardinality must be at least 2");
    if (dirichlet_alpha <= 0) throw std::invalid_argument("discrete BN: dirichlet alpha must be positive");
    const int n = dag.size();
    DiscreteBn bn{dag, std::vector<int>(n, cardinality), {}};
    std::gamma_distribution<double> gamma(dirichlet_alpha, 1.0);
    for (int v = 0; v < n; ++v) {
        int rows = 1;
        for (int p : dag.parents(v)) rows *= bn.cardinalities[p];
        Eigen::MatrixXd cpt(rows, cardinality);
        for (int r = 0; r < rows; ++r) {
            double total = 0.0;
            for (int k = 0; k < cardinality; ++k) total += cpt(r, k) = gamma(rng);
            if (total <= 0.0) {
                // All draws underflowed: fall back to a point mass on one state.
                cpt.row(r).setZero();
                cpt(r, std::uniform_int_distribution<int>(0, cardinality - 1)(rng)) = 1.0;
            } else {
                cpt.row(r) /= total;
            }
        }
        bn.cpts.push_back(std::move(cpt));
    }
    return bn;
}

int parent_config(const DiscreteBn& bn, int node, std::span<const int> sample_row) {
    int index = 0;
    for (int p : bn.dag.parents(node)) index = index * bn.cardinalities[p] + sample_row[p];
    return index;
}

Dataset sample_discrete_bn(const DiscreteBn& bn, int samples, Rng& rng) {
    const int n = bn.dag.size();
    const std::vector<int> order = topological_order(bn.dag.adjacency());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::MatrixXd x(samples, n);
    std::vector<int> row(n, 0);
    for (int s = 0; s < samples; ++s) {
        for (int v : order) {
            const int cfg = parent_config(bn, v, row);
            const auto& cpt = bn.cpts[v];
            double u = unit(rng);
            int state = bn.cardinalities[v] - 1;
            for (int k = 0; k < bn.cardinalities[v]; ++k) {
                u -= cpt(cfg, k);
                if (u < 0) {
                    state = k;
                    break;
                }
            }
            row[v] = state;
            x(s, v) = state;
        }
    }
    return Dataset(bn.dag.names(), std::move(x), DataKind::Discrete, bn.cardinalities);
}

Dataset sample_discrete_bn(const Dag& dag, int cardinality, double dirichlet_alpha, int samples, Rng& rng) {
    return sample_discrete_bn(random_discrete_bn(dag, cardinality, dirichlet_alpha, rng), samples, rng);
}

}  // namespace hccd
