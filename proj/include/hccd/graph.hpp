#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hccd {

/// Sorted list of node indices.
using NodeSet = std::vector<int>;

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CyclicGraph : public GraphError {
public:
    CyclicGraph() : GraphError("graph contains a directed cycle") {}
};

class UnknownNode : public GraphError {
public:
    explicit UnknownNode(const std::string& name) : GraphError("unknown node: " + name) {}
};

class NoConsistentExtension : public GraphError {
public:
    NoConsistentExtension() : GraphError("pdag admits no consistent DAG extension") {}
};

class NodeMismatch : public GraphError {
public:
    NodeMismatch() : GraphError("graphs are defined over different node sets") {}
};

/// Dense square boolean matrix, row-major.
class BoolMatrix {
public:
    BoolMatrix() = default;
    explicit BoolMatrix(int n) : n_(n), cells_(static_cast<std::size_t>(n) * n, 0) {}

    int size() const { return n_; }
    bool operator()(int i, int j) const { return cells_[index(i, j)] != 0; }
    void set(int i, int j, bool v) { cells_[index(i, j)] = v ? 1 : 0; }

    bool operator==(const BoolMatrix&) const = default;

private:
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }

    int n_ = 0;
    std::vector<std::uint8_t> cells_;
};

/// Kahn ordering of a directed adjacency matrix; throws CyclicGraph when no order exists.
std::vector<int> topological_order(const BoolMatrix& adjacency);

/// True iff the directed adjacency matrix has a cycle (DFS colouring).
bool has_directed_cycle(const BoolMatrix& adjacency);

class Dag {
public:
    Dag() = default;
    /// Validates the invariants: no self-loops, no 2-cycles, acyclic.
    Dag(std::vector<std::string> names, BoolMatrix adjacency);

    static Dag from_edges(std::vector<std::string> names,
                          std::span<const std::pair<std::string, std::string>> edges);

    int size() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    const BoolMatrix& adjacency() const { return adj_; }
    bool has_edge(int from, int to) const { return adj_(from, to); }
    bool adjacent(int a, int b) const { return adj_(a, b) || adj_(b, a); }
    const std::vector<int>& parents(int v) const { return parents_[v]; }
    const std::vector<int>& children(int v) const { return children_[v]; }
    int edge_count() const;
    int index_of(const std::string& name) const;

private:
    std::vector<std::string> names_;
    BoolMatrix adj_;
    std::vector<std::vector<int>> parents_;
    std::vector<std::vector<int>> children_;
};

/// Partially directed graph. Uses the amat convention: an undirected edge sets
/// both (i,j) and (j,i); a directed edge i->j sets only (i,j).
class Pdag {
public:
    Pdag() = default;
    explicit Pdag(std::vector<std::string> names);

    static Pdag complete(std::vector<std::string> names, std::span<const int> over);

    int size() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    int index_of(const std::string& name) const;

    bool adjacent(int a, int b) const { return m_(a, b) || m_(b, a); }
    bool directed(int from, int to) const { return m_(from, to) && !m_(to, from); }
    bool undirected(int a, int b) const { return m_(a, b) && m_(b, a); }

    void add_undirected(int a, int b);
    void add_directed(int from, int to);
    void remove_edge(int a, int b);
    /// Turns an existing edge into from->to.
    void orient(int from, int to);

    /// Adjacent nodes, ascending by index.
    std::vector<int> adjacents(int v) const;
    int edge_count() const;

    /// Same nodes, every edge made undirected.
    Pdag skeleton() const;
    bool operator==(const Pdag& other) const = default;

    const BoolMatrix& marks() const { return m_; }

private:
    std::vector<std::string> names_;
    BoolMatrix m_;
};

/// Sepset keyed by (min,max) index pair.
using SepsetMap = std::map<std::pair<int, int>, NodeSet>;

inline std::pair<int, int> unordered_key(int a, int b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
}

/// d-separation of x and y given z, by reachability over active trails.
bool d_separated(const Dag& dag, int x, int y, std::span<const int> z);
bool d_separated(const Dag& dag, const std::string& x, const std::string& y,
                 std::span<const std::string> z);

/// Closes a pdag under the three sufficiency orientation rules. Only undirected
/// edges are ever oriented. Returns the number of edges oriented.
int apply_orientation_rules(Pdag& g);

/// Markov equivalence class representative (v-structures + rule closure).
Pdag cpdag_from_dag(const Dag& dag);

/// Dor-Tarsi consistent extension; throws NoConsistentExtension.
Dag extend_to_dag(const Pdag& pdag);

/// Always returns a DAG with the pdag's skeleton. Tries the consistent
/// extension first, then orients along index order skipping cycle-creating choices.
Dag extend_to_dag_or_fallback(const Pdag& pdag);

std::vector<NodeSet> connected_components(int n, std::span<const std::pair<int, int>> edges);

/// Directed acyclic graph conversion (every edge must be directed).
Dag to_dag(const Pdag& pdag);
Pdag to_pdag(const Dag& dag);

}  // namespace hccd
