#include "hccd/hccd.hpp"

#include <algorithm>
#include <stdexcept>

namespace hccd {

namespace {

WeightMatrix restrict(const WeightMatrix& w, std::span<const int> idx) {
    const int m = static_cast<int>(idx.size());
    WeightMatrix out(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) out(i, j) = w(idx[i], idx[j]);
    return out;
}

NodeSet sorted(std::span<const int> vars) {
    NodeSet out(vars.begin(), vars.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> near_zero_of(const Eigen::VectorXd& eigenvalues, double tau) {
    std::vector<double> out;
    for (double v : eigenvalues)
        if (v < tau) out.push_back(v);
    return out;
}

ClusterTree build_node(const WeightMatrix& w, NodeSet vars, const HccdConfig& cfg,
                       std::uint64_t seed, int depth) {
    ClusterTree node;
    node.vars = std::move(vars);
    const int n = static_cast<int>(node.vars.size());
    if (n <= cfg.min_cluster || n < 2) return node;
    if (cfg.max_depth && depth > *cfg.max_depth) return node;

    const ClusterOptions options{.tau = cfg.tau, .forced_k = cfg.split_k, .cap_half = true};
    const ClusterStep step = cluster_once(restrict(w, node.vars), options, seed);
    node.near_zero = near_zero_of(step.eigenvalues, cfg.tau);
    if (step.k <= 1) return node;

    node.k = step.k;
    for (std::size_t c = 0; c < step.partition.size(); ++c) {
        NodeSet child;
        for (int local : step.partition[c]) child.push_back(node.vars[local]);
        node.children.push_back(build_node(w, std::move(child), cfg, mix_seed(seed, c), depth + 1));
    }
    return node;
}

void validate(const HccdConfig& cfg) {
    if (cfg.min_cluster < 2) throw std::invalid_argument("min_cluster must be at least 2");
    if (cfg.variant == Variant::Flat && cfg.flat_k < 2)
        throw std::invalid_argument("flat_k must be at least 2");
    if (cfg.split_k && *cfg.split_k < 2) throw std::invalid_argument("split_k must be at least 2");
    if (cfg.tau <= 0) throw std::invalid_argument("tau must be positive");
}

}  // namespace

std::string to_string(Variant v) {
    switch (v) {
        case Variant::Full: return "hccd";
        case Variant::Flat: return "hccd-flat";
        case Variant::NotComplete: return "hccd-notc";
        case Variant::NoCompleteness: return "hccd-nocomp";
    }
    return "unknown";
}

std::vector<NodeSet> ClusterTree::leaves() const {
    if (is_leaf()) return {vars};
    std::vector<NodeSet> out;
    for (const auto& c : children) {
        auto sub = c.leaves();
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

int ClusterTree::depth() const {
    int d = 0;
    for (const auto& c : children) d = std::max(d, 1 + c.depth());
    return d;
}

ClusterTree build_cluster_tree(const WeightMatrix& w, std::span<const int> vars,
                               const HccdConfig& cfg, std::uint64_t seed) {
    validate(cfg);
    if (vars.empty()) throw std::invalid_argument("cluster tree needs at least one variable");
    return build_node(w, sorted(vars), cfg, seed, 0);
}

ClusterTree build_flat_tree(const WeightMatrix& w, std::span<const int> vars, const HccdConfig& cfg,
                            std::uint64_t seed) {
    ClusterTree root;
    root.vars = sorted(vars);
    const int n = static_cast<int>(root.vars.size());
    if (n < 2) return root;
    const ClusterOptions options{
        .tau = cfg.tau, .forced_k = std::min(cfg.flat_k, n), .cap_half = false};
    const ClusterStep step = cluster_once(restrict(w, root.vars), options, seed);
    root.near_zero = near_zero_of(step.eigenvalues, cfg.tau);
    if (step.k <= 1) return root;
    root.k = step.k;
    for (const auto& part : step.partition) {
        ClusterTree leaf;
        for (int local : part) leaf.vars.push_back(root.vars[local]);
        root.children.push_back(std::move(leaf));
    }
    return root;
}

Pdag Discovery::learn_leaf(std::span<const int> vars) {
    const Pdag start = Pdag::complete(names_, vars);
    PcStats stats;
    Pdag out = pc_run(engine_, vars, start, EditableEdgeSet::all(), cfg_.pc, &sepsets_, &stats);
    stats_ = stats;
    return out;
}

Pdag Discovery::merge_and_learn(std::span<const Pdag> children, std::span<const NodeSet> child_vars) {
    if (children.size() != child_vars.size())
        throw std::invalid_argument("merge: graph and variable-set counts differ");
    Pdag merged(names_);
    NodeSet all;
    for (std::size_t c = 0; c < children.size(); ++c) {
        const auto& vars = child_vars[c];
        all.insert(all.end(), vars.begin(), vars.end());
        for (std::size_t a = 0; a < vars.size(); ++a)
            for (std::size_t b = a + 1; b < vars.size(); ++b)
                if (children[c].adjacent(vars[a], vars[b])) merged.add_undirected(vars[a], vars[b]);
    }
    EditableEdgeSet cross;
    for (std::size_t c = 0; c < child_vars.size(); ++c) {
        for (std::size_t d = c + 1; d < child_vars.size(); ++d) {
            for (int a : child_vars[c]) {
                for (int b : child_vars[d]) {
                    merged.add_undirected(a, b);
                    cross.insert(a, b);
                }
            }
        }
    }
    std::sort(all.begin(), all.end());
    PcStats stats;
    Pdag out = pc_run(engine_, all, merged, cross, cfg_.pc, &sepsets_, &stats);
    stats_ = stats;
    return out;
}

Pdag Discovery::completeness_pass(const Pdag& graph, std::span<const int> vars) {
    PcStats stats;
    Pdag out = pc_run(engine_, vars, graph.skeleton(), EditableEdgeSet::all(), cfg_.pc, &sepsets_, &stats);
    stats_ = stats;
    return out;
}

Pdag Discovery::learn_tree(const ClusterTree& tree, bool per_merge_completeness) {
    if (tree.is_leaf()) return learn_leaf(tree.vars);
    std::vector<Pdag> graphs;
    std::vector<NodeSet> vars;
    for (const auto& child : tree.children) {
        graphs.push_back(learn_tree(child, per_merge_completeness));
        vars.push_back(child.vars);
    }
    Pdag merged = merge_and_learn(graphs, vars);
    if (per_merge_completeness) merged = completeness_pass(merged, tree.vars);
    return merged;
}

namespace {

DiscoveryResult finish(Discovery& d, Pdag graph, ClusterTree tree) {
    return {std::move(graph), std::move(tree), d.sepsets(), d.orientation_conflicts()};
}

}  // namespace

DiscoveryResult hccd_run(CiEngine& engine, const WeightMatrix& w, const std::vector<std::string>& names,
                         std::span<const int> vars, const HccdConfig& cfg, std::uint64_t seed) {
    switch (cfg.variant) {
        case Variant::Flat: return hccd_flat_run(engine, w, names, vars, cfg, seed);
        case Variant::NotComplete: return hccd_notc_run(engine, w, names, vars, cfg, seed);
        case Variant::NoCompleteness: return hccd_nocomp_run(engine, w, names, vars, cfg, seed);
        case Variant::Full: break;
    }
    ClusterTree tree = build_cluster_tree(w, vars, cfg, seed);
    Discovery d(engine, names, cfg);
    Pdag graph = d.learn_tree(tree, true);
    return finish(d, std::move(graph), std::move(tree));
}

DiscoveryResult hccd_flat_run(CiEngine& engine, const WeightMatrix& w,
                              const std::vector<std::string>& names, std::span<const int> vars,
                              HccdConfig cfg, std::uint64_t seed) {
    cfg.variant = Variant::Flat;
    validate(cfg);
    ClusterTree tree = build_flat_tree(w, vars, cfg, seed);
    Discovery d(engine, names, cfg);
    Pdag graph = d.learn_tree(tree, true);
    return finish(d, std::move(graph), std::move(tree));
}

DiscoveryResult hccd_notc_run(CiEngine& engine, const WeightMatrix& w,
                              const std::vector<std::string>& names, std::span<const int> vars,
                              HccdConfig cfg, std::uint64_t seed) {
    cfg.variant = Variant::NotComplete;
    ClusterTree tree = build_cluster_tree(w, vars, cfg, seed);
    Discovery d(engine, names, cfg);
    Pdag graph = d.learn_tree(tree, false);
    if (!tree.is_leaf()) graph = d.completeness_pass(graph, tree.vars);
    return finish(d, std::move(graph), std::move(tree));
}

DiscoveryResult hccd_nocomp_run(CiEngine& engine, const WeightMatrix& w,
                                const std::vector<std::string>& names, std::span<const int> vars,
                                HccdConfig cfg, std::uint64_t seed) {
    cfg.variant = Variant::NoCompleteness;
    ClusterTree tree = build_cluster_tree(w, vars, cfg, seed);
    Discovery d(engine, names, cfg);
    Pdag graph = d.learn_tree(tree, false);
    return finish(d, std::move(graph), std::move(tree));
}

DiscoveryResult clustcd_run(CiEngine& engine, const std::vector<std::string>& names,
                            std::span<const int> vars, const std::vector<NodeSet>& partition,
                            const HccdConfig& cfg) {
    NodeSet covered;
    for (const auto& part : partition) {
        if (part.empty()) throw std::invalid_argument("clustcd: empty cluster");
        covered.insert(covered.end(), part.begin(), part.end());
    }
    std::sort(covered.begin(), covered.end());
    if (covered != sorted(vars) || std::adjacent_find(covered.begin(), covered.end()) != covered.end())
        throw std::invalid_argument("clustcd: partition does not cover the variables exactly");

    ClusterTree tree;
    tree.vars = sorted(vars);
    Discovery d(engine, names, cfg);
    if (partition.size() == 1) {
        Pdag graph = d.learn_leaf(tree.vars);
        return finish(d, std::move(graph), std::move(tree));
    }

    tree.k = static_cast<int>(partition.size());
    std::vector<Pdag> graphs;
    for (const auto& part : partition) {
        ClusterTree leaf;
        leaf.vars = sorted(part);
        graphs.push_back(d.learn_leaf(leaf.vars));
        tree.children.push_back(std::move(leaf));
    }
    std::vector<NodeSet> parts;
    for (const auto& c : tree.children) parts.push_back(c.vars);
    Pdag graph = d.merge_and_learn(graphs, parts);
    return finish(d, std::move(graph), std::move(tree));
}

DiscoveryResult pc_baseline(CiEngine& engine, const std::vector<std::string>& names,
                            std::span<const int> vars, const PcConfig& cfg) {
    HccdConfig hc;
    hc.pc = cfg;
    Discovery d(engine, names, hc);
    ClusterTree tree;
    tree.vars = sorted(vars);
    Pdag graph = d.learn_leaf(tree.vars);
    return finish(d, std::move(graph), std::move(tree));
}

}  // namespace hccd
