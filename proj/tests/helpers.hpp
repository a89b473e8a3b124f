#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hccd/graph.hpp"
#include "hccd/synth.hpp"

namespace testing_support {

using hccd::BoolMatrix;
using hccd::Dag;
using hccd::Pdag;

inline Dag make_dag(std::vector<std::string> names, std::vector<std::pair<std::string, std::string>> edges) {
    return Dag::from_edges(std::move(names), edges);
}

/// A->D<-C->E<-B, the five-node fixture where ClustCD misses D _||_ E | C.
inline Dag fixture_dag() {
    return make_dag({"A", "B", "C", "D", "E"}, {{"A", "D"}, {"C", "D"}, {"C", "E"}, {"B", "E"}});
}

inline std::vector<int> all_vars(int n) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = i;
    return v;
}

/// Every subset of `pool`, as sorted index lists.
inline std::vector<std::vector<int>> subsets(const std::vector<int>& pool) {
    std::vector<std::vector<int>> out;
    const unsigned m = static_cast<unsigned>(pool.size());
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        std::vector<int> s;
        for (unsigned b = 0; b < m; ++b)
            if (mask & (1u << b)) s.push_back(pool[b]);
        out.push_back(std::move(s));
    }
    return out;
}

/// Same d-separation statements over every pair and every conditioning set.
inline bool same_independences(const Dag& a, const Dag& b) {
    const int n = a.size();
    for (int x = 0; x < n; ++x) {
        for (int y = x + 1; y < n; ++y) {
            std::vector<int> others;
            for (int v = 0; v < n; ++v)
                if (v != x && v != y) others.push_back(v);
            for (const auto& z : subsets(others))
                if (hccd::d_separated(a, x, y, z) != hccd::d_separated(b, x, y, z)) return false;
        }
    }
    return true;
}

/// All acyclic orientations of a DAG's skeleton.
inline std::vector<Dag> skeleton_orientations(const std::vector<std::string>& names,
                                              const std::vector<std::pair<int, int>>& skeleton) {
    const int n = static_cast<int>(names.size());
    const unsigned e = static_cast<unsigned>(skeleton.size());
    std::vector<Dag> out;
    for (unsigned mask = 0; mask < (1u << e); ++mask) {
        BoolMatrix m(n);
        for (unsigned k = 0; k < e; ++k) {
            auto [a, b] = skeleton[k];
            if (mask & (1u << k))
                m.set(b, a, true);
            else
                m.set(a, b, true);
        }
        if (!hccd::has_directed_cycle(m)) out.emplace_back(names, m);
    }
    return out;
}

inline std::vector<std::pair<int, int>> skeleton_pairs(const Dag& g) {
    std::vector<std::pair<int, int>> s;
    for (int i = 0; i < g.size(); ++i)
        for (int j = i + 1; j < g.size(); ++j)
            if (g.adjacent(i, j)) s.emplace_back(i, j);
    return s;
}

/// Members of g's Markov equivalence class, found by d-separation comparison.
inline std::vector<Dag> equivalence_class(const Dag& g) {
    std::vector<Dag> out;
    for (auto& d : skeleton_orientations(g.names(), skeleton_pairs(g)))
        if (same_independences(g, d)) out.push_back(std::move(d));
    return out;
}

/// CPDAG by enumeration: an edge is directed iff every equivalent DAG agrees on it.
inline Pdag brute_force_cpdag(const Dag& g) {
    const auto members = equivalence_class(g);
    Pdag out(g.names());
    for (auto [a, b] : skeleton_pairs(g)) {
        const bool all_ab = std::all_of(members.begin(), members.end(), [&](const Dag& d) { return d.has_edge(a, b); });
        const bool all_ba = std::all_of(members.begin(), members.end(), [&](const Dag& d) { return d.has_edge(b, a); });
        if (all_ab)
            out.add_directed(a, b);
        else if (all_ba)
            out.add_directed(b, a);
        else
            out.add_undirected(a, b);
    }
    return out;
}

/// Random DAG over "V0".."Vn-1" with edges i->j (i<j) kept with probability p,
/// then nodes shuffled so index order is not a topological order.
inline Dag random_small_dag(int n, double p, hccd::Rng& rng) {
    std::vector<int> perm = all_vars(n);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::bernoulli_distribution coin(p);
    BoolMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (coin(rng)) m.set(perm[i], perm[j], true);
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("V" + std::to_string(i));
    return Dag(names, m);
}

inline std::vector<std::pair<int, int>> v_structures_of(const Dag& g) {
    std::vector<std::pair<int, int>> out;
    for (int c = 0; c < g.size(); ++c) {
        const auto& pa = g.parents(c);
        for (std::size_t i = 0; i < pa.size(); ++i)
            for (std::size_t j = i + 1; j < pa.size(); ++j)
                if (!g.adjacent(pa[i], pa[j])) out.emplace_back(std::min(pa[i], pa[j]) * 1000 + std::max(pa[i], pa[j]), c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Every labelled DAG over `names`.
inline std::vector<Dag> all_dags(const std::vector<std::string>& names) {
    const int n = static_cast<int>(names.size());
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    int combos = 1;
    for (std::size_t k = 0; k < pairs.size(); ++k) combos *= 3;
    std::vector<Dag> out;
    for (int code = 0; code < combos; ++code) {
        BoolMatrix m(n);
        int rest = code;
        for (auto [i, j] : pairs) {
            const int s = rest % 3;
            rest /= 3;
            if (s == 1) m.set(i, j, true);
            if (s == 2) m.set(j, i, true);
        }
        if (!has_directed_cycle(m)) out.emplace_back(names, m);
    }
    return out;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("hccd_test_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

}  // namespace testing_support
