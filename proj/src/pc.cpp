#include "hccd/pc.hpp"

#include <algorithm>

namespace hccd {

namespace {

// Calls visit(subset) for every size-k subset of pool in lexicographic order
// of positions; stops early when visit returns true.
template <typename Visit>
bool for_each_subset(const std::vector<int>& pool, int k, Visit&& visit) {
    const int n = static_cast<int>(pool.size());
    if (k > n) return false;
    std::vector<int> pos(k);
    for (int i = 0; i < k; ++i) pos[i] = i;
    std::vector<int> subset(k);
    while (true) {
        for (int i = 0; i < k; ++i) subset[i] = pool[pos[i]];
        if (visit(subset)) return true;
        int i = k - 1;
        while (i >= 0 && pos[i] == n - k + i) --i;
        if (i < 0) return false;
        ++pos[i];
        for (int j = i + 1; j < k; ++j) pos[j] = pos[j - 1] + 1;
    }
}

}  // namespace

void EditableEdgeSet::insert(int a, int b) {
    if (a == b) throw GraphError("editable edge set cannot hold a self-pair");
    pairs_.insert(unordered_key(a, b));
}

std::vector<int> name_order(const std::vector<std::string>& names, std::span<const int> vars) {
    std::vector<int> order(vars.begin(), vars.end());
    std::sort(order.begin(), order.end(), [&](int a, int b) { return names[a] < names[b]; });
    return order;
}

CiOutcome restricted_query(CiEngine& engine, const EditableEdgeSet& editable, const Pdag& current,
                           int x, int y, std::span<const int> z) {
    if (editable.contains(x, y)) return engine.query(x, y, z);
    const bool present = current.adjacent(x, y);
    return {.independent = !present,
            .statistic = 0.0,
            .p_value = present ? 0.0 : 1.0,
            .condition_size = static_cast<int>(z.size())};
}

SkeletonResult pc_skeleton(CiEngine& engine, std::span<const int> vars, const Pdag& initial,
                           const EditableEdgeSet& editable, const PcConfig& cfg, SepsetMap prior) {
    SkeletonResult res{initial.skeleton(), std::move(prior)};
    Pdag& g = res.graph;
    const auto& names = g.names();
    const std::vector<int> order = name_order(names, vars);

    auto neighbours = [&](int x, int skip) {
        std::vector<int> out;
        for (int v : order)
            if (v != x && v != skip && g.adjacent(x, v)) out.push_back(v);
        return out;
    };

    for (int level = 0;; ++level) {
        if (cfg.max_condition_size && level > *cfg.max_condition_size) break;
        bool any_candidate = false;
        for (int x : order) {
            for (int y : order) {
                if (x == y || !g.adjacent(x, y) || !editable.contains(x, y)) continue;
                const std::vector<int> pool = neighbours(x, y);
                if (static_cast<int>(pool.size()) < level) continue;
                any_candidate = true;
                for_each_subset(pool, level, [&](const std::vector<int>& s) {
                    if (!restricted_query(engine, editable, g, x, y, s).independent) return false;
                    g.remove_edge(x, y);
                    NodeSet sep = s;
                    std::sort(sep.begin(), sep.end());
                    res.sepsets.emplace(unordered_key(x, y), std::move(sep));
                    return true;
                });
            }
        }
        if (!any_candidate) break;
    }
    return res;
}

Pdag orient(const SkeletonResult& skel, PcStats* stats) {
    Pdag g = skel.graph.skeleton();
    const int n = g.size();
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    const std::vector<int> order = name_order(g.names(), all);

    int conflicts = 0;
    auto claim = [&](int from, int to) {
        if (g.undirected(from, to))
            g.orient(from, to);
        else if (g.directed(to, from))
            ++conflicts;
    };
    for (int z : order) {
        for (std::size_t a = 0; a < order.size(); ++a) {
            const int x = order[a];
            if (x == z || !skel.graph.adjacent(x, z)) continue;
            for (std::size_t b = a + 1; b < order.size(); ++b) {
                const int y = order[b];
                if (y == z || !skel.graph.adjacent(y, z) || skel.graph.adjacent(x, y)) continue;
                auto it = skel.sepsets.find(unordered_key(x, y));
                if (it == skel.sepsets.end()) continue;
                if (std::binary_search(it->second.begin(), it->second.end(), z)) continue;
                claim(x, z);
                claim(y, z);
            }
        }
    }
    apply_orientation_rules(g);
    if (stats) stats->orientation_conflicts += conflicts;
    return g;
}

Pdag pc_run(CiEngine& engine, std::span<const int> vars, const Pdag& initial,
            const EditableEdgeSet& editable, const PcConfig& cfg, SepsetMap* sepsets, PcStats* stats) {
    SkeletonResult skel =
        pc_skeleton(engine, vars, initial, editable, cfg, sepsets ? *sepsets : SepsetMap{});
    Pdag out = orient(skel, stats);
    if (sepsets) *sepsets = std::move(skel.sepsets);
    return out;
}

}  // namespace hccd
