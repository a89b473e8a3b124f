#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hccd/citest.hpp"
#include "hccd/graph.hpp"
#include "hccd/pc.hpp"
#include "hccd/spectral.hpp"

namespace hccd {

/// NoCompleteness never runs the completeness pass; it is sound but not complete.
enum class Variant { Full, Flat, NotComplete, NoCompleteness };

std::string to_string(Variant v);

struct HccdConfig {
    double tau = kDefaultTau;
    int min_cluster = 5;
    PcConfig pc;
    Variant variant = Variant::Full;
    /// Cluster count for the one-shot FLAT partition.
    int flat_k = 4;
    /// Deepest tree level allowed to split (root is level 0). Unbounded when empty.
    std::optional<int> max_depth;
    /// Fixed cluster count per split instead of the near-zero eigenvalue count.
    std::optional<int> split_k;
};

/// Recursive variable partition. Children's variable sets partition the parent's.
struct ClusterTree {
    NodeSet vars;
    int k = 1;
    std::vector<double> near_zero;
    std::vector<ClusterTree> children;

    bool is_leaf() const { return children.empty(); }
    std::vector<NodeSet> leaves() const;
    int depth() const;
};

/// Top-down spectral partitioning. `w` is the full strength matrix; each node
/// works on the sub-matrix of its own variables.
ClusterTree build_cluster_tree(const WeightMatrix& w, std::span<const int> vars,
                               const HccdConfig& cfg, std::uint64_t seed);

/// Single split into exactly min(flat_k, |vars|) clusters, no recursion.
ClusterTree build_flat_tree(const WeightMatrix& w, std::span<const int> vars, const HccdConfig& cfg,
                            std::uint64_t seed);

struct DiscoveryResult {
    Pdag graph;
    ClusterTree tree;
    SepsetMap sepsets;
    int orientation_conflicts = 0;
};

/// Shared state of one bottom-up discovery: engine, config and the global
/// append-only sepset map.
class Discovery {
public:
    Discovery(CiEngine& engine, std::vector<std::string> names, HccdConfig cfg)
        : engine_(engine), names_(std::move(names)), cfg_(std::move(cfg)) {}

    /// Baseline on one cluster alone: complete start, everything editable.
    Pdag learn_leaf(std::span<const int> vars);

    /// Unions the children's skeletons, adds every cross-child pair and learns
    /// only those pairs.
    Pdag merge_and_learn(std::span<const Pdag> children, std::span<const NodeSet> child_vars);

    /// Baseline over the graph's current skeleton with every edge editable.
    Pdag completeness_pass(const Pdag& graph, std::span<const int> vars);

    /// Bottom-up over a cluster tree. `per_merge_completeness` false defers the
    /// completeness pass (caller runs it once at the root).
    Pdag learn_tree(const ClusterTree& tree, bool per_merge_completeness);

    const SepsetMap& sepsets() const { return sepsets_; }
    int orientation_conflicts() const { return stats_.orientation_conflicts; }
    const std::vector<std::string>& names() const { return names_; }

private:
    CiEngine& engine_;
    std::vector<std::string> names_;
    HccdConfig cfg_;
    SepsetMap sepsets_;
    PcStats stats_;
};

/// Dispatches on cfg.variant.
DiscoveryResult hccd_run(CiEngine& engine, const WeightMatrix& w, const std::vector<std::string>& names,
                         std::span<const int> vars, const HccdConfig& cfg, std::uint64_t seed);

DiscoveryResult hccd_flat_run(CiEngine& engine, const WeightMatrix& w,
                              const std::vector<std::string>& names, std::span<const int> vars,
                              HccdConfig cfg, std::uint64_t seed);

DiscoveryResult hccd_notc_run(CiEngine& engine, const WeightMatrix& w,
                              const std::vector<std::string>& names, std::span<const int> vars,
                              HccdConfig cfg, std::uint64_t seed);

DiscoveryResult hccd_nocomp_run(CiEngine& engine, const WeightMatrix& w,
                                const std::vector<std::string>& names, std::span<const int> vars,
                                HccdConfig cfg, std::uint64_t seed);

/// Cluster, learn each cluster, learn the cross-cluster pairs. No completeness pass.
DiscoveryResult clustcd_run(CiEngine& engine, const std::vector<std::string>& names,
                            std::span<const int> vars, const std::vector<NodeSet>& partition,
                            const HccdConfig& cfg);

/// Plain baseline: complete graph over vars, everything editable.
DiscoveryResult pc_baseline(CiEngine& engine, const std::vector<std::string>& names,
                            std::span<const int> vars, const PcConfig& cfg);

}  // namespace hccd
