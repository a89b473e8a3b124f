#pragma once

#include <optional>
#include <set>
#include <span>
#include <utility>

#include "hccd/citest.hpp"
#include "hccd/graph.hpp"

namespace hccd {

/// Pairs a baseline run may test and remove. Every other edge is frozen.
class EditableEdgeSet {
public:
    static EditableEdgeSet all() {
        EditableEdgeSet s;
        s.all_ = true;
        return s;
    }
    static EditableEdgeSet none() { return {}; }

    void insert(int a, int b);
    bool contains(int a, int b) const { return all_ || pairs_.count(unordered_key(a, b)) > 0; }
    bool is_all() const { return all_; }
    std::size_t size() const { return pairs_.size(); }
    const std::set<std::pair<int, int>>& pairs() const { return pairs_; }

private:
    bool all_ = false;
    std::set<std::pair<int, int>> pairs_;
};

struct PcConfig {
    double alpha = kDefaultAlpha;
    std::optional<int> max_condition_size;
};

struct SkeletonResult {
    Pdag graph;
    SepsetMap sepsets;
};

struct PcStats {
    /// Collider claims that hit an edge already oriented the other way.
    int orientation_conflicts = 0;
};

/// Editable pairs go to the engine; for frozen pairs the current graph answers
/// (present edge -> dependent, absent -> independent) without touching counters.
CiOutcome restricted_query(CiEngine& engine, const EditableEdgeSet& editable, const Pdag& current,
                           int x, int y, std::span<const int> z);

/// PC adjacency search over `vars`, condition-set size growing by one per
/// sweep, pairs and subsets in lexicographic name order. `prior` seeds the
/// sepset map (existing entries are never overwritten).
SkeletonResult pc_skeleton(CiEngine& engine, std::span<const int> vars, const Pdag& initial,
                           const EditableEdgeSet& editable, const PcConfig& cfg,
                           SepsetMap prior = {});

/// Colliders from sepsets (first claim wins), then rule closure.
Pdag orient(const SkeletonResult& skel, PcStats* stats = nullptr);

/// pc_skeleton followed by orient. When `sepsets` is given it is used as the
/// prior and receives the updated map.
Pdag pc_run(CiEngine& engine, std::span<const int> vars, const Pdag& initial,
            const EditableEdgeSet& editable, const PcConfig& cfg, SepsetMap* sepsets = nullptr,
            PcStats* stats = nullptr);

/// Indices sorted by node name.
std::vector<int> name_order(const std::vector<std::string>& names, std::span<const int> vars);

}  // namespace hccd
