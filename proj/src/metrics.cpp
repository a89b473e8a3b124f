#include "hccd/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace hccd {

Pdag align_to(const Pdag& g, const std::vector<std::string>& names) {
    if (g.names() == names) return g;
    if (static_cast<int>(names.size()) != g.size()) throw NodeMismatch();
    std::vector<int> map(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        auto it = std::find(g.names().begin(), g.names().end(), names[i]);
        if (it == g.names().end()) throw NodeMismatch();
        map[i] = static_cast<int>(it - g.names().begin());
    }
    Pdag out(names);
    const int n = out.size();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (g.directed(map[i], map[j])) out.add_directed(i, j);
            else if (i < j && g.undirected(map[i], map[j])) out.add_undirected(i, j);
        }
    }
    return out;
}

int shd(const Pdag& estimated, const Pdag& truth) {
    const Pdag est = align_to(estimated, truth.names());
    const int n = truth.size();
    int distance = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const bool a = est.adjacent(i, j), b = truth.adjacent(i, j);
            if (a != b) {
                ++distance;
            } else if (a && (est.marks()(i, j) != truth.marks()(i, j) ||
                             est.marks()(j, i) != truth.marks()(j, i))) {
                ++distance;
            }
        }
    }
    return distance;
}

double causal_accuracy(const Pdag& estimated, const Dag& truth) {
    const Pdag est = align_to(estimated, truth.names());
    int total = 0, hit = 0;
    for (int i = 0; i < truth.size(); ++i) {
        for (int j : truth.children(i)) {
            ++total;
            if (est.directed(i, j)) ++hit;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(hit) / total;
}

double bdeu_family(const Dataset& data, int node, std::span<const int> parents, double ess) {
    if (data.kind() != DataKind::Discrete) throw NonDiscreteData();
    const int n = data.samples();
    const int r = data.cardinality(node);
    double q = 1.0;
    for (int p : parents) q *= data.cardinality(p);

    std::vector<int> config(n, 0);
    int n_configs = 1;
    for (int p : parents) {
        std::unordered_map<long long, int> remap;
        const int card = data.cardinality(p);
        for (int s = 0; s < n; ++s) {
            const long long key = static_cast<long long>(config[s]) * card + static_cast<int>(data.values()(s, p));
            config[s] = remap.try_emplace(key, static_cast<int>(remap.size())).first->second;
        }
        n_configs = static_cast<int>(remap.size());
    }
    std::vector<int> counts(static_cast<std::size_t>(n_configs) * r, 0);
    for (int s = 0; s < n; ++s)
        ++counts[static_cast<std::size_t>(config[s]) * r + static_cast<int>(data.values()(s, node))];

    const double a_ij = ess / q;
    const double a_ijk = ess / (q * r);
    double score = 0.0;
    for (int c = 0; c < n_configs; ++c) {
        int n_ij = 0;
        for (int k = 0; k < r; ++k) {
            const int n_ijk = counts[static_cast<std::size_t>(c) * r + k];
            n_ij += n_ijk;
            if (n_ijk > 0) score += std::lgamma(a_ijk + n_ijk) - std::lgamma(a_ijk);
        }
        score += std::lgamma(a_ij) - std::lgamma(a_ij + n_ij);
    }
    return score;
}

double bdeu_score(const Dag& dag, const Dataset& data, double ess) {
    if (data.kind() != DataKind::Discrete) throw NonDiscreteData();
    std::vector<int> column(dag.size());
    for (int v = 0; v < dag.size(); ++v) column[v] = data.index_of(dag.names()[v]);
    double total = 0.0;
    for (int v = 0; v < dag.size(); ++v) {
        std::vector<int> parents;
        for (int p : dag.parents(v)) parents.push_back(column[p]);
        total += bdeu_family(data, column[v], parents, ess);
    }
    return total;
}

double bdeu_score(const Pdag& g, const Dataset& data, double ess) {
    if (data.kind() != DataKind::Discrete) throw NonDiscreteData();
    return bdeu_score(extend_to_dag_or_fallback(g), data, ess);
}

EdgeErrors edge_errors(const Pdag& estimated, const Dag& truth) {
    const Pdag est = align_to(estimated, truth.names());
    EdgeErrors e;
    for (int i = 0; i < truth.size(); ++i) {
        for (int j = i + 1; j < truth.size(); ++j) {
            const bool a = est.adjacent(i, j), b = truth.adjacent(i, j);
            if (a && !b) ++e.extra;
            if (b && !a) ++e.missing;
        }
    }
    return e;
}

std::vector<NodeSet> minimal_separating_sets(const Dag& dag, int x, int y) {
    const int n = dag.size();
    if (n > kMaxEnumerationNodes) throw TooLarge();
    std::vector<int> others;
    for (int v = 0; v < n; ++v)
        if (v != x && v != y) others.push_back(v);
    const int m = static_cast<int>(others.size());

    std::vector<unsigned> masks(1u << m);
    for (unsigned s = 0; s < masks.size(); ++s) masks[s] = s;
    std::stable_sort(masks.begin(), masks.end(), [](unsigned a, unsigned b) {
        return std::popcount(a) < std::popcount(b);
    });

    std::vector<unsigned> separating;
    std::vector<NodeSet> minimal;
    for (unsigned s : masks) {
        NodeSet z;
        for (int b = 0; b < m; ++b)
            if (s & (1u << b)) z.push_back(others[b]);
        if (!d_separated(dag, x, y, z)) continue;
        const bool has_smaller = std::any_of(separating.begin(), separating.end(),
                                             [s](unsigned t) { return (t & s) == t; });
        separating.push_back(s);
        if (!has_smaller) minimal.push_back(std::move(z));
    }
    return minimal;
}

std::vector<Assumption1Violation> check_assumption1(const Dag& truth, const WeightMatrix& w) {
    const int n = truth.size();
    if (n > kMaxEnumerationNodes) throw TooLarge();
    if (w.rows() != n || w.cols() != n) throw std::invalid_argument("weight matrix size mismatch");
    std::vector<Assumption1Violation> out;
    for (int x = 0; x < n; ++x) {
        for (int y = x + 1; y < n; ++y) {
            if (truth.adjacent(x, y)) continue;
            const double ixy = w(x, y);
            auto tie = [&](int v) { return std::max(w(x, v), w(y, v)); };
            bool separating_ok = false, redundant_ok = false;
            for (const NodeSet& z : minimal_separating_sets(truth, x, y)) {
                double weakest = std::numeric_limits<double>::infinity();
                for (int v : z) weakest = std::min(weakest, tie(v));
                if (weakest < ixy) continue;
                separating_ok = true;
                bool any_candidate = false, found = false;
                for (int v = 0; v < n; ++v) {
                    if (v == x || v == y || std::binary_search(z.begin(), z.end(), v)) continue;
                    any_candidate = true;
                    if (tie(v) < ixy) found = true;
                }
                if (found || !any_candidate) {
                    redundant_ok = true;
                    break;
                }
            }
            if (!separating_ok)
                out.push_back({truth.names()[x], truth.names()[y],
                               "no minimal separating set is at least as strongly tied as the pair"});
            else if (!redundant_ok)
                out.push_back({truth.names()[x], truth.names()[y], "no redundant set exists"});
        }
    }
    return out;
}

EvalReport evaluate(const Pdag& estimated, const Dag& truth, const Dataset* test_data, double ess) {
    EvalReport r;
    r.shd = shd(estimated, cpdag_from_dag(truth));
    r.causal_accuracy = causal_accuracy(estimated, truth);
    const EdgeErrors e = edge_errors(estimated, truth);
    r.extra_edges = e.extra;
    r.missing_edges = e.missing;
    if (test_data && test_data->kind() == DataKind::Discrete) r.bdeu = bdeu_score(estimated, *test_data, ess);
    return r;
}

std::vector<std::pair<std::string, std::optional<double>>> metric_values(const EvalReport& r) {
    return {
        {"shd", r.shd},
        {"causal_accuracy", r.causal_accuracy},
        {"bdeu", r.bdeu},
        {"extra_edges", r.extra_edges},
        {"missing_edges", r.missing_edges},
        {"ci_unique", static_cast<double>(r.ci_unique)},
        {"ci_total", static_cast<double>(r.ci_total)},
        {"runtime_ms", r.runtime_ms},
    };
}

RelativeReport relative_report(const EvalReport& variant, const EvalReport& baseline) {
    RelativeReport out;
    const auto v = metric_values(variant);
    const auto b = metric_values(baseline);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& [name, value] = v[i];
        const auto& base = b[i].second;
        if (!value || !base || *base == 0.0)
            out[name] = std::nullopt;
        else
            out[name] = *value / *base;
    }
    return out;
}

}  // namespace hccd
