#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hccd/citest.hpp"
#include "hccd/graph.hpp"

namespace hccd {

class RetryLimit : public std::runtime_error {
public:
    RetryLimit() : std::runtime_error("no connected DAG sampled within the retry limit") {}
};

using Rng = std::mt19937_64;

struct SynthConfig {
    int n = 10;
    /// Connectivity factor: each upper-triangle edge has probability rho/(n-1).
    double rho = 2.0;
    int samples = 500;
    std::uint64_t seed = 0;

    void validate() const;
};

struct GroundTruth {
    Dag dag;
    /// weights(i, j) != 0 iff i -> j.
    Eigen::MatrixXd weights;
};

inline constexpr int kMaxDagAttempts = 100000;

/// "X1".."Xn", zero-padded so that name order equals index order.
std::vector<std::string> default_names(int n);

/// Upper-triangle Bernoulli(rho/(n-1)) adjacency, resampled until the skeleton
/// is connected.
Dag random_connected_dag(const SynthConfig& cfg, Rng& rng);

/// Independent Uniform[0.1, 1] weight per edge.
GroundTruth sample_edge_weights(const Dag& dag, Rng& rng);

/// X_i = sum_j W_ji X_j + N(0,1), sampled in topological order.
Dataset sample_linear_gaussian(const GroundTruth& gt, int samples, Rng& rng);

struct DiscreteBn {
    Dag dag;
    std::vector<int> cardinalities;
    /// One row-stochastic matrix per node: rows are parent configurations
    /// (mixed radix over parents in ascending index order), columns are states.
    std::vector<Eigen::MatrixXd> cpts;
};

inline constexpr int kDefaultCardinality = 3;
inline constexpr double kDefaultDirichletAlpha = 0.5;

/// CPT rows drawn from a symmetric Dirichlet(dirichlet_alpha).
DiscreteBn random_discrete_bn(const Dag& dag, int cardinality, double dirichlet_alpha, Rng& rng);
Dataset sample_discrete_bn(const DiscreteBn& bn, int samples, Rng& rng);
Dataset sample_discrete_bn(const Dag& dag, int cardinality, double dirichlet_alpha, int samples, Rng& rng);

/// Row index of a parent configuration in a CPT.
int parent_config(const DiscreteBn& bn, int node, std::span<const int> sample_row);

}  // namespace hccd
