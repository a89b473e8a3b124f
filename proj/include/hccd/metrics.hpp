#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hccd/citest.hpp"
#include "hccd/graph.hpp"

namespace hccd {

class NonDiscreteData : public DataKindMismatch {
public:
    NonDiscreteData() : DataKindMismatch("BDeu needs discrete data") {}
};

class TooLarge : public std::runtime_error {
public:
    TooLarge() : std::runtime_error("graph too large for separating-set enumeration") {}
};

inline constexpr double kDefaultEss = 1.0;
inline constexpr int kMaxEnumerationNodes = 12;

/// Structural Hamming distance between two pdags over the same named nodes:
/// one per pair whose adjacency differs, one per shared edge whose mark differs.
int shd(const Pdag& estimated, const Pdag& truth);

/// Fraction of the truth's directed edges u->v that the estimate also orients u->v.
double causal_accuracy(const Pdag& estimated, const Dag& truth);

/// Log BDeu contribution of one family.
double bdeu_family(const Dataset& data, int node, std::span<const int> parents, double ess);

/// Decomposable log BDeu score of a DAG (data columns matched by name).
double bdeu_score(const Dag& dag, const Dataset& data, double ess = kDefaultEss);

/// Scores a pdag through its consistent extension (or the acyclic fallback).
double bdeu_score(const Pdag& g, const Dataset& data, double ess = kDefaultEss);

struct EdgeErrors {
    int extra = 0;
    int missing = 0;
};

EdgeErrors edge_errors(const Pdag& estimated, const Dag& truth);

struct Assumption1Violation {
    std::string x;
    std::string y;
    std::string reason;
};

/// For every non-adjacent pair of the truth, checks the pairwise-strength
/// ordering against its minimal separating sets and the remaining variables.
std::vector<Assumption1Violation> check_assumption1(const Dag& truth, const WeightMatrix& w);

/// Minimal separating sets of (x, y) in the DAG, by exhaustive enumeration.
std::vector<NodeSet> minimal_separating_sets(const Dag& dag, int x, int y);

struct EvalReport {
    int shd = 0;
    double causal_accuracy = 0.0;
    std::optional<double> bdeu;
    int extra_edges = 0;
    int missing_edges = 0;
    long long ci_unique = 0;
    long long ci_total = 0;
    double runtime_ms = 0.0;
};

EvalReport evaluate(const Pdag& estimated, const Dag& truth, const Dataset* test_data = nullptr,
                    double ess = kDefaultEss);

/// Metric name -> variant/baseline ratio; empty when the baseline value is zero.
using RelativeReport = std::map<std::string, std::optional<double>>;

RelativeReport relative_report(const EvalReport& variant, const EvalReport& baseline);

/// Metric name -> value, in a fixed order used for reporting.
std::vector<std::pair<std::string, std::optional<double>>> metric_values(const EvalReport& r);

/// Reorders a pdag's nodes to follow `names`; throws NodeMismatch if the name sets differ.
Pdag align_to(const Pdag& g, const std::vector<std::string>& names);

}  // namespace hccd
