#include "hccd/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace hccd {

std::vector<int> topological_order(const BoolMatrix& adjacency) {
    const int n = adjacency.size();
    std::vector<int> indegree(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (adjacency(i, j)) ++indegree[j];

    // Min-heap keeps the order deterministic (smallest ready index first).
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int i = 0; i < n; ++i)
        if (indegree[i] == 0) ready.push(i);

    std::vector<int> order;
    order.reserve(n);
    while (!ready.empty()) {
        const int v = ready.top();
        ready.pop();
        order.push_back(v);
        for (int j = 0; j < n; ++j)
            if (adjacency(v, j) && --indegree[j] == 0) ready.push(j);
    }
    if (static_cast<int>(order.size()) != n) throw CyclicGraph();
    return order;
}

bool has_directed_cycle(const BoolMatrix& adjacency) {
    const int n = adjacency.size();
    enum Colour : std::uint8_t { White, Grey, Black };
    std::vector<Colour> colour(n, White);
    std::vector<std::pair<int, int>> stack;
    for (int root = 0; root < n; ++root) {
        if (colour[root] != White) continue;
        stack.emplace_back(root, 0);
        colour[root] = Grey;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            if (next == n) {
                colour[v] = Black;
                stack.pop_back();
                continue;
            }
            const int w = next++;
            if (!adjacency(v, w)) continue;
            if (colour[w] == Grey) return true;
            if (colour[w] == White) {
                colour[w] = Grey;
                stack.emplace_back(w, 0);
            }
        }
    }
    return false;
}

namespace {

int find_name(const std::vector<std::string>& names, const std::string& name) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw UnknownNode(name);
    return static_cast<int>(it - names.begin());
}

// True iff `to` is reachable from `from` along directed edges of adj.
bool reaches(const BoolMatrix& adj, int from, int to) {
    const int n = adj.size();
    std::vector<char> seen(n, 0);
    std::vector<int> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        if (v == to) return true;
        for (int w = 0; w < n; ++w) {
            if (adj(v, w) && !seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
        }
    }
    return false;
}

}  // namespace

Dag::Dag(std::vector<std::string> names, BoolMatrix adjacency)
    : names_(std::move(names)), adj_(std::move(adjacency)) {
    const int n = size();
    if (adj_.size() != n) throw GraphError("adjacency size does not match node count");
    parents_.assign(n, {});
    children_.assign(n, {});
    for (int i = 0; i < n; ++i) {
        if (adj_(i, i)) throw GraphError("self-loop on " + names_[i]);
        for (int j = 0; j < n; ++j) {
            if (!adj_(i, j)) continue;
            if (adj_(j, i)) throw CyclicGraph();
            children_[i].push_back(j);
            parents_[j].push_back(i);
        }
    }
    if (has_directed_cycle(adj_)) throw CyclicGraph();
}

Dag Dag::from_edges(std::vector<std::string> names,
                    std::span<const std::pair<std::string, std::string>> edges) {
    BoolMatrix adj(static_cast<int>(names.size()));
    for (const auto& [from, to] : edges) adj.set(find_name(names, from), find_name(names, to), true);
    return Dag(std::move(names), std::move(adj));
}

int Dag::edge_count() const {
    int count = 0;
    for (const auto& c : children_) count += static_cast<int>(c.size());
    return count;
}

int Dag::index_of(const std::string& name) const { return find_name(names_, name); }

Pdag::Pdag(std::vector<std::string> names)
    : names_(std::move(names)), m_(static_cast<int>(names_.size())) {}

Pdag Pdag::complete(std::vector<std::string> names, std::span<const int> over) {
    Pdag g(std::move(names));
    for (std::size_t a = 0; a < over.size(); ++a)
        for (std::size_t b = a + 1; b < over.size(); ++b) g.add_undirected(over[a], over[b]);
    return g;
}

int Pdag::index_of(const std::string& name) const { return find_name(names_, name); }

void Pdag::add_undirected(int a, int b) {
    if (a == b) throw GraphError("self-loop on " + names_[a]);
    m_.set(a, b, true);
    m_.set(b, a, true);
}

void Pdag::add_directed(int from, int to) {
    if (from == to) throw GraphError("self-loop on " + names_[from]);
    m_.set(from, to, true);
    m_.set(to, from, false);
}

void Pdag::remove_edge(int a, int b) {
    m_.set(a, b, false);
    m_.set(b, a, false);
}

void Pdag::orient(int from, int to) {
    m_.set(from, to, true);
    m_.set(to, from, false);
}

std::vector<int> Pdag::adjacents(int v) const {
    std::vector<int> out;
    for (int w = 0; w < size(); ++w)
        if (w != v && adjacent(v, w)) out.push_back(w);
    return out;
}

int Pdag::edge_count() const {
    int count = 0;
    for (int i = 0; i < size(); ++i)
        for (int j = i + 1; j < size(); ++j)
            if (adjacent(i, j)) ++count;
    return count;
}

Pdag Pdag::skeleton() const {
    Pdag s(names_);
    for (int i = 0; i < size(); ++i)
        for (int j = i + 1; j < size(); ++j)
            if (adjacent(i, j)) s.add_undirected(i, j);
    return s;
}

bool d_separated(const Dag& dag, int x, int y, std::span<const int> z) {
    const int n = dag.size();
    auto check = [n](int v) {
        if (v < 0 || v >= n) throw UnknownNode(std::to_string(v));
    };
    check(x);
    check(y);
    std::vector<char> in_z(n, 0);
    for (int v : z) {
        check(v);
        in_z[v] = 1;
    }
    if (x == y) throw GraphError("d-separation query needs two distinct nodes");
    if (in_z[x] || in_z[y]) throw GraphError("query endpoints must not be in the conditioning set");

    // Nodes that are in z or have a descendant in z.
    std::vector<char> anc_z(n, 0);
    std::vector<int> stack(z.begin(), z.end());
    for (int v : z) anc_z[v] = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int p : dag.parents(v)) {
            if (!anc_z[p]) {
                anc_z[p] = 1;
                stack.push_back(p);
            }
        }
    }

    // Traversal state: (node, arrived_from_child). Index 2*v + dir.
    constexpr int kUp = 0;    // entered from a child, moving towards parents
    constexpr int kDown = 1;  // entered from a parent, moving towards children
    std::vector<char> visited(2 * static_cast<std::size_t>(n), 0);
    std::vector<std::pair<int, int>> frontier{{x, kUp}};
    while (!frontier.empty()) {
        auto [v, dir] = frontier.back();
        frontier.pop_back();
        auto& mark = visited[2 * static_cast<std::size_t>(v) + dir];
        if (mark) continue;
        mark = 1;
        if (v == y) return false;
        if (dir == kUp) {
            if (in_z[v]) continue;
            for (int p : dag.parents(v)) frontier.emplace_back(p, kUp);
            for (int c : dag.children(v)) frontier.emplace_back(c, kDown);
        } else {
            if (!in_z[v])
                for (int c : dag.children(v)) frontier.emplace_back(c, kDown);
            if (anc_z[v])
                for (int p : dag.parents(v)) frontier.emplace_back(p, kUp);
        }
    }
    return true;
}

bool d_separated(const Dag& dag, const std::string& x, const std::string& y,
                 std::span<const std::string> z) {
    std::vector<int> zi;
    for (const auto& name : z) zi.push_back(dag.index_of(name));
    return d_separated(dag, dag.index_of(x), dag.index_of(y), zi);
}

int apply_orientation_rules(Pdag& g) {
    const int n = g.size();
    int oriented = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int b = 0; b < n; ++b) {
            for (int c = 0; c < n; ++c) {
                if (b == c || !g.undirected(b, c)) continue;
                bool fire = false;
                // R1: a->b, b-c, a and c non-adjacent.
                for (int a = 0; a < n && !fire; ++a)
                    fire = a != c && g.directed(a, b) && !g.adjacent(a, c);
                // R2: b->k->c.
                for (int k = 0; k < n && !fire; ++k)
                    fire = g.directed(b, k) && g.directed(k, c);
                // R3: b-k, b-l, k->c, l->c, k and l non-adjacent.
                for (int k = 0; k < n && !fire; ++k) {
                    if (k == c || !g.undirected(b, k) || !g.directed(k, c)) continue;
                    for (int l = k + 1; l < n && !fire; ++l)
                        fire = l != c && g.undirected(b, l) && g.directed(l, c) && !g.adjacent(k, l);
                }
                if (fire) {
                    g.orient(b, c);
                    ++oriented;
                    changed = true;
                }
            }
        }
    }
    return oriented;
}

Pdag cpdag_from_dag(const Dag& dag) {
    const int n = dag.size();
    Pdag g(dag.names());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (dag.adjacent(i, j)) g.add_undirected(i, j);
    for (int z = 0; z < n; ++z) {
        const auto& pa = dag.parents(z);
        for (std::size_t a = 0; a < pa.size(); ++a) {
            for (std::size_t b = a + 1; b < pa.size(); ++b) {
                if (dag.adjacent(pa[a], pa[b])) continue;
                g.orient(pa[a], z);
                g.orient(pa[b], z);
            }
        }
    }
    apply_orientation_rules(g);
    return g;
}

Dag extend_to_dag(const Pdag& pdag) {
    const int n = pdag.size();
    BoolMatrix out(n);
    std::vector<char> alive(n, 1);
    for (int removed = 0; removed < n; ++removed) {
        int sink = -1;
        for (int x = 0; x < n && sink < 0; ++x) {
            if (!alive[x]) continue;
            bool ok = true;
            std::vector<int> adj;
            for (int y = 0; y < n && ok; ++y) {
                if (!alive[y] || y == x || !pdag.adjacent(x, y)) continue;
                if (pdag.directed(x, y)) ok = false;
                adj.push_back(y);
            }
            for (int y : adj) {
                if (!ok) break;
                if (!pdag.undirected(x, y)) continue;
                for (int w : adj)
                    if (w != y && !pdag.adjacent(y, w)) ok = false;
            }
            if (ok) sink = x;
        }
        if (sink < 0) throw NoConsistentExtension();
        for (int y = 0; y < n; ++y)
            if (alive[y] && y != sink && pdag.adjacent(sink, y)) out.set(y, sink, true);
        alive[sink] = 0;
    }
    return Dag(pdag.names(), std::move(out));
}

Dag extend_to_dag_or_fallback(const Pdag& pdag) {
    try {
        return extend_to_dag(pdag);
    } catch (const NoConsistentExtension&) {
    }
    const int n = pdag.size();
    BoolMatrix out(n);
    auto place = [&](int from, int to) {
        if (reaches(out, to, from))
            out.set(to, from, true);
        else
            out.set(from, to, true);
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (pdag.directed(i, j)) place(i, j);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (pdag.undirected(i, j)) place(i, j);
    return Dag(pdag.names(), std::move(out));
}

std::vector<NodeSet> connected_components(int n, std::span<const std::pair<int, int>> edges) {
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (auto [a, b] : edges) {
        const int ra = find(a), rb = find(b);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
    }
    std::map<int, NodeSet> groups;
    for (int v = 0; v < n; ++v) groups[find(v)].push_back(v);
    std::vector<NodeSet> out;
    for (auto& [root, members] : groups) out.push_back(std::move(members));
    return out;
}

Dag to_dag(const Pdag& pdag) {
    const int n = pdag.size();
    BoolMatrix adj(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (pdag.undirected(i, j)) throw GraphError("pdag has undirected edges");
            if (pdag.directed(i, j)) adj.set(i, j, true);
        }
    }
    return Dag(pdag.names(), std::move(adj));
}

Pdag to_pdag(const Dag& dag) {
    Pdag g(dag.names());
    for (int i = 0; i < dag.size(); ++i)
        for (int j : dag.children(i)) g.add_directed(i, j);
    return g;
}

}  // namespace hccd
