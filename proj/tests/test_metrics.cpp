#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "helpers.hpp"
#include "hccd/hccd.hpp"
#include "hccd/metrics.hpp"

using namespace hccd;
using namespace testing_support;

namespace {

constexpr int A = 0, B = 1, C = 2, D = 3, E = 4;

Dataset discrete_columns(const std::vector<std::vector<int>>& cols, const std::vector<std::string>& names,
                         std::vector<int> cards) {
    Eigen::MatrixXd m(cols[0].size(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < cols[j].size(); ++i) m(i, j) = cols[j][i];
    return Dataset(names, m, DataKind::Discrete, std::move(cards));
}

Dataset uniform_discrete(const std::vector<std::string>& names, const std::vector<int>& cards, int rows, Rng& rng) {
    std::vector<std::vector<int>> cols;
    for (int c : cards) {
        std::uniform_int_distribution<int> u(0, c - 1);
        std::vector<int> col(rows);
        for (auto& v : col) v = u(rng);
        cols.push_back(col);
    }
    return discrete_columns(cols, names, cards);
}

/// Family score written out with gamma functions over a count table keyed by parent values.
double family_by_hand(const Dataset& d, int node, const std::vector<int>& parents, double ess) {
    double q = 1;
    for (int p : parents) q *= d.cardinality(p);
    const int r = d.cardinality(node);
    std::map<std::vector<int>, std::vector<double>> table;
    for (int s = 0; s < d.samples(); ++s) {
        std::vector<int> key;
        for (int p : parents) key.push_back(static_cast<int>(d.values()(s, p)));
        auto& row = table[key];
        row.resize(r, 0.0);
        row[static_cast<int>(d.values()(s, node))] += 1;
    }
    double score = 0;
    for (const auto& [key, row] : table) {
        double nij = 0;
        for (double c : row) {
            nij += c;
            score += std::lgamma(ess / (q * r) + c) - std::lgamma(ess / (q * r));
        }
        score += std::lgamma(ess / q) - std::lgamma(ess / q + nij);
    }
    return score;
}

Pdag random_pdag(int n, Rng& rng) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("N" + std::to_string(i));
    Pdag g(names);
    std::uniform_int_distribution<int> mark(0, 3);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) switch (mark(rng)) {
                case 1: g.add_directed(i, j); break;
                case 2: g.add_directed(j, i); break;
                case 3: g.add_undirected(i, j); break;
                default: break;
            }
    return g;
}

}  // namespace

TEST_CASE("structural hamming distance") {
    const Pdag truth = cpdag_from_dag(fixture_dag());
    CHECK(shd(truth, truth) == 0);

    Pdag flipped = truth;
    flipped.remove_edge(A, D);
    flipped.add_directed(D, A);
    CHECK(shd(flipped, truth) == 1);

    Pdag undirected = truth;
    undirected.remove_edge(A, D);
    undirected.add_undirected(A, D);
    CHECK(shd(undirected, truth) == 1);

    CHECK(shd(Pdag(truth.names()), truth) == truth.edge_count());

    Pdag other({"A", "B", "C", "D", "Q"});
    CHECK_THROWS_AS(shd(other, truth), NodeMismatch);
}

TEST_CASE("shd matches nodes by name") {
    Pdag a({"A", "B", "C"});
    a.add_directed(0, 1);
    Pdag b({"C", "B", "A"});
    b.add_directed(2, 1);
    CHECK(shd(a, b) == 0);
    CHECK(align_to(b, a.names()) == a);
}

TEST_CASE("shd is a metric on random pdags") {
    Rng rng(1);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + trial % 7;
        const Pdag a = random_pdag(n, rng), b = random_pdag(n, rng), c = random_pdag(n, rng);
        CHECK(shd(a, b) == shd(b, a));
        CHECK(shd(a, c) <= shd(a, b) + shd(b, c));
        CHECK(shd(a, a) == 0);
    }
}

TEST_CASE("causal accuracy") {
    const Dag g = fixture_dag();
    CHECK(causal_accuracy(cpdag_from_dag(g), g) == 1.0);
    CHECK(causal_accuracy(Pdag(g.names()), g) == 0.0);

    const Dag collider = make_dag({"A", "B", "C"}, {{"A", "C"}, {"B", "C"}});
    Pdag est(collider.names());
    est.add_directed(0, 2);
    est.add_undirected(1, 2);
    CHECK(causal_accuracy(est, collider) == 0.5);
}

TEST_CASE("causal accuracy of the cpdag is the compelled fraction") {
    Rng rng(2);
    for (int trial = 0; trial < 60; ++trial) {
        const Dag g = random_small_dag(3 + trial % 3, 0.6, rng);
        if (g.edge_count() == 0) continue;
        const Pdag enumerated = brute_force_cpdag(g);
        int compelled = 0;
        for (auto [a, b] : skeleton_pairs(g))
            if (!enumerated.undirected(a, b)) ++compelled;
        CHECK(causal_accuracy(cpdag_from_dag(g), g) ==
              doctest::Approx(static_cast<double>(compelled) / g.edge_count()));
    }
}

TEST_CASE("bdeu of one binary variable seen once in each state") {
    const Dataset d = discrete_columns({{0, 1}}, {"X"}, {2});
    const Dag g = make_dag({"X"}, {});
    const double expected = std::log(std::tgamma(1.0) / std::tgamma(3.0) * std::pow(std::tgamma(1.5) / std::tgamma(0.5), 2));
    CHECK(bdeu_score(g, d, 1.0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(bdeu_score(g, d, 1.0) == doctest::Approx(-3 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("bdeu decomposes into family scores") {
    Rng rng(3);
    const Dag g = make_dag({"A", "B", "C", "D"}, {{"A", "C"}, {"B", "C"}, {"C", "D"}, {"A", "D"}});
    const Dataset d = sample_discrete_bn(g, 3, 0.5, 400, rng);
    double total = 0;
    for (int v = 0; v < 4; ++v) {
        const std::vector<int> parents(g.parents(v).begin(), g.parents(v).end());
        CHECK(bdeu_family(d, v, parents, 2.0) == doctest::Approx(family_by_hand(d, v, parents, 2.0)).epsilon(1e-10));
        total += family_by_hand(d, v, parents, 2.0);
    }
    CHECK(bdeu_score(g, d, 2.0) == doctest::Approx(total).epsilon(1e-10));
}

TEST_CASE("bdeu is score equivalent on small graphs") {
    Rng rng(4);
    for (int n = 2; n <= 4; ++n) {
        std::vector<std::string> names;
        std::vector<int> cards;
        for (int i = 0; i < n; ++i) {
            names.push_back("V" + std::to_string(i));
            cards.push_back(2 + i % 2);
        }
        const Dataset d = uniform_discrete(names, cards, 150, rng);
        for (const Dag& g : all_dags(names)) {
            const double s = bdeu_score(g, d);
            for (const Dag& member : equivalence_class(g)) REQUIRE(bdeu_score(member, d) == doctest::Approx(s).epsilon(1e-9));
            CHECK(bdeu_score(cpdag_from_dag(g), d) == doctest::Approx(s).epsilon(1e-9));
        }
    }
}

TEST_CASE("bdeu prefers the true graph for a strong dependence") {
    int wins = 0;
    const Dag truth = make_dag({"X", "Y"}, {{"X", "Y"}});
    const Dag empty = make_dag({"X", "Y"}, {});
    for (int seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        std::bernoulli_distribution coin(0.5), keep(0.9);
        std::vector<int> x(1000), y(1000);
        for (int i = 0; i < 1000; ++i) {
            x[i] = coin(rng);
            y[i] = keep(rng) ? x[i] : 1 - x[i];
        }
        const Dataset d = discrete_columns({x, y}, {"X", "Y"}, {2, 2});
        if (bdeu_score(truth, d) > bdeu_score(empty, d)) ++wins;
    }
    CHECK(wins >= 95);
}

TEST_CASE("bdeu rejects continuous data") {
    Eigen::MatrixXd m(3, 1);
    m << 0.1, 0.2, 0.3;
    const Dataset d({"X"}, m, DataKind::Continuous);
    CHECK_THROWS_AS(bdeu_score(make_dag({"X"}, {}), d), NonDiscreteData);
}

TEST_CASE("edge errors") {
    const Dag g = fixture_dag();
    const EdgeErrors exact = edge_errors(cpdag_from_dag(g), g);
    CHECK(exact.extra == 0);
    CHECK(exact.missing == 0);
    const EdgeErrors none = edge_errors(Pdag(g.names()), g);
    CHECK(none.extra == 0);
    CHECK(none.missing == g.edge_count());

    CiEngine e(std::make_shared<OracleSource>(g));
    const DiscoveryResult cl = clustcd_run(e, g.names(), all_vars(5), {{D, E}, {A, B, C}}, {});
    const EdgeErrors errs = edge_errors(cl.graph, g);
    CHECK(errs.extra >= 1);
    CHECK(cl.graph.adjacent(D, E));
}

TEST_CASE("minimal separating sets") {
    const Dag g = fixture_dag();
    CHECK(minimal_separating_sets(g, D, E) == std::vector<NodeSet>{{C}});
    CHECK(minimal_separating_sets(g, A, B) == std::vector<NodeSet>{{}});
    CHECK(minimal_separating_sets(g, A, D).empty());
}

TEST_CASE("assumption 1 diagnostic") {
    SUBCASE("faithful chain sample has no violation") {
        Rng rng(5);
        const Dag chain = make_dag({"A", "B", "C"}, {{"A", "B"}, {"B", "C"}});
        const Dataset d = sample_linear_gaussian(sample_edge_weights(chain, rng), 10000, rng);
        CHECK(check_assumption1(chain, pairwise_strength(d)).empty());
    }
    SUBCASE("a pair tied more strongly than its separator is reported") {
        const Dag chain = make_dag({"A", "B", "C"}, {{"A", "B"}, {"B", "C"}});
        WeightMatrix w(3, 3);
        w << 0, 0.2, 0.9, 0.2, 0, 0.2, 0.9, 0.2, 0;
        const auto v = check_assumption1(chain, w);
        REQUIRE(v.size() == 1);
        CHECK(v[0].x == "A");
        CHECK(v[0].y == "C");
    }
    SUBCASE("complete truth has nothing to check") {
        const Dag full = make_dag({"A", "B", "C"}, {{"A", "B"}, {"B", "C"}, {"A", "C"}});
        WeightMatrix w = WeightMatrix::Constant(3, 3, 0.5);
        w.diagonal().setZero();
        CHECK(check_assumption1(full, w).empty());
    }
    SUBCASE("reports only non-adjacent pairs, deterministically") {
        Rng rng(6);
        for (int trial = 0; trial < 20; ++trial) {
            const Dag g = random_small_dag(7, 0.4, rng);
            WeightMatrix w = WeightMatrix::Zero(7, 7);
            std::uniform_real_distribution<double> u(0, 1);
            for (int i = 0; i < 7; ++i)
                for (int j = i + 1; j < 7; ++j) w(i, j) = w(j, i) = u(rng);
            const auto first = check_assumption1(g, w);
            const auto second = check_assumption1(g, w);
            REQUIRE(first.size() == second.size());
            for (std::size_t k = 0; k < first.size(); ++k) {
                CHECK(first[k].x == second[k].x);
                CHECK(first[k].y == second[k].y);
                CHECK_FALSE(g.adjacent(g.index_of(first[k].x), g.index_of(first[k].y)));
            }
        }
    }
    SUBCASE("large graphs are refused") {
        Rng rng(7);
        const Dag big = random_small_dag(13, 0.2, rng);
        CHECK_THROWS_AS(check_assumption1(big, WeightMatrix::Zero(13, 13)), TooLarge);
    }
}

TEST_CASE("relative report") {
    EvalReport base;
    base.shd = 4;
    base.causal_accuracy = 0.5;
    base.extra_edges = 2;
    base.missing_edges = 3;
    base.ci_unique = 100;
    base.ci_total = 150;
    base.runtime_ms = 10;
    const RelativeReport same = relative_report(base, base);
    for (const auto& [name, ratio] : same) {
        if (name == "bdeu") {
            CHECK_FALSE(ratio.has_value());
            continue;
        }
        REQUIRE(ratio.has_value());
        CHECK(*ratio == 1.0);
    }
    EvalReport variant = base;
    variant.ci_unique = 80;
    variant.shd = 2;
    EvalReport zero_base = base;
    zero_base.shd = 0;
    CHECK(*relative_report(variant, base).at("ci_unique") == doctest::Approx(0.8));
    CHECK_FALSE(relative_report(variant, zero_base).at("shd").has_value());
}

TEST_CASE("evaluate bundles the metrics") {
    Rng rng(8);
    const Dag g = fixture_dag();
    const Dataset test = sample_discrete_bn(g, 2, 0.5, 300, rng);
    const EvalReport r = evaluate(cpdag_from_dag(g), g, &test);
    CHECK(r.shd == 0);
    CHECK(r.causal_accuracy == 1.0);
    REQUIRE(r.bdeu.has_value());
    CHECK(*r.bdeu == doctest::Approx(bdeu_score(g, test)));
    CHECK_FALSE(evaluate(cpdag_from_dag(g), g).bdeu.has_value());
}
