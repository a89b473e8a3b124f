#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hccd/citest.hpp"
#include "hccd/graph.hpp"

namespace hccd {

class SpectralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EigenFailure : public SpectralError {
public:
    EigenFailure() : SpectralError("eigen solver did not converge") {}
};

/// L = D - W together with the degree vector diag(D).
struct LaplacianPair {
    Eigen::MatrixXd laplacian;
    Eigen::VectorXd degree;
};

/// Ascending spectrum of the pencil (L, D) and the leading generalized
/// eigenvectors as columns (D-orthonormal).
struct SpectralEmbedding {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd vectors;
};

/// Disjoint, covering, non-empty index sets. Clusters are sorted by their
/// smallest member.
using Partition = std::vector<NodeSet>;

inline constexpr double kDefaultTau = 0.05;

LaplacianPair degree_laplacian(const WeightMatrix& w);

/// Solves (D - W) u = lambda D u through the symmetric normalized form
/// D^{-1/2} L D^{-1/2}. Requires every degree to be positive. Returns the
/// first m eigenvectors (the constant one included).
SpectralEmbedding generalized_eigendecomposition(const LaplacianPair& lp, int m);

int count_near_zero(const Eigen::VectorXd& eigenvalues, double tau);

/// k-means++ seeding plus Lloyd iterations, best of 10 seeded restarts.
Partition kmeans_pp(const Eigen::MatrixXd& points, int k, std::uint64_t seed);

/// Sum over clusters of cut(X_i, X \ X_i) / assoc(X_i, X). Clusters with zero
/// association contribute nothing.
double ncut_value(const WeightMatrix& w, const Partition& p);

struct ClusterStep {
    /// Number of clusters produced (k').
    int k = 1;
    Partition partition;
    /// Full (L, D) spectrum of the non-isolated nodes.
    Eigen::VectorXd eigenvalues;
};

struct ClusterOptions {
    double tau = kDefaultTau;
    /// Forces the cluster count instead of counting near-zero eigenvalues.
    std::optional<int> forced_k;
    /// Clamp k' to floor(n/2) so that no child is trivially small.
    bool cap_half = true;
};

/// One level of spectral clustering: k' from the near-zero eigenvalue count,
/// embedding with k' eigenvectors, then k-means++. Isolated nodes (zero degree)
/// become singleton clusters.
ClusterStep cluster_once(const WeightMatrix& w, const ClusterOptions& options, std::uint64_t seed);

/// Deterministic 64-bit seed mixing (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace hccd
