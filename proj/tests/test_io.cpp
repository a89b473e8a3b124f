#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "hccd/io.hpp"

using namespace hccd;
using namespace testing_support;

namespace {

Pdag random_named_pdag(int n, Rng& rng) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("node_" + std::to_string(i));
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

TEST_CASE("graph json round trip") {
    TempDir dir;
    Rng rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const Pdag g = random_named_pdag(1 + trial % 8, rng);
        write_graph_json(dir.file("g.json"), g);
        CHECK(load_graph_json(dir.file("g.json")) == g);
        CHECK(load_graph(dir.file("g.json")) == g);
    }
}

TEST_CASE("edge list format") {
    TempDir dir;
    spit(dir.file("e.txt"), "# truth\nA -> B\n\nC -- D\nE\n");
    const Pdag g = load_edge_list(dir.file("e.txt"));
    CHECK(g.names() == std::vector<std::string>{"A", "B", "C", "D", "E"});
    CHECK(g.directed(0, 1));
    CHECK(g.undirected(2, 3));
    CHECK(g.edge_count() == 2);
    CHECK(g.adjacents(4).empty());
}

TEST_CASE("edge list round trip keeps isolated nodes") {
    TempDir dir;
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const Pdag g = random_named_pdag(1 + trial % 8, rng);
        write_edge_list(dir.file("e.txt"), g);
        CHECK(load_edge_list(dir.file("e.txt")) == g);
        CHECK(load_graph(dir.file("e.txt")) == g);
    }
}

TEST_CASE("edge list errors") {
    TempDir dir;
    SUBCASE("malformed line cites its number") {
        spit(dir.file("e.txt"), "A -> B\nB => C\n");
        try {
            load_edge_list(dir.file("e.txt"));
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }
    SUBCASE("duplicate edge") {
        spit(dir.file("e.txt"), "A -> B\nB -- A\n");
        CHECK_THROWS_AS(load_edge_list(dir.file("e.txt")), ParseError);
    }
    SUBCASE("self loop") {
        spit(dir.file("e.txt"), "A -> A\n");
        CHECK_THROWS_AS(load_edge_list(dir.file("e.txt")), ParseError);
    }
    SUBCASE("dangling reference against a fixed node set") {
        spit(dir.file("e.txt"), "A -> Q\n");
        CHECK_THROWS_AS(load_edge_list(dir.file("e.txt"), std::vector<std::string>{"A", "B"}), UnknownNode);
    }
    SUBCASE("dangling reference in graph json") {
        spit(dir.file("g.json"), R"({"nodes":["A"],"edges":[{"from":"A","to":"Z","directed":true}]})");
        CHECK_THROWS_AS(load_graph_json(dir.file("g.json")), UnknownNode);
    }
    SUBCASE("broken json") {
        spit(dir.file("g.json"), "{\"nodes\": [");
        CHECK_THROWS_AS(load_graph_json(dir.file("g.json")), ParseError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_edge_list(dir.file("absent.txt")), IoError);
        CHECK_THROWS_AS(load_csv_dataset(dir.file("absent.csv")), IoError);
    }
}

TEST_CASE("continuous csv round trip is exact") {
    TempDir dir;
    Rng rng(3);
    std::normal_distribution<double> z;
    Eigen::MatrixXd m(25, 3);
    for (int i = 0; i < 25; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = z(rng) * 1e3;
    const Dataset d({"a", "b", "c"}, m, DataKind::Continuous);
    write_csv_dataset(dir.file("d.csv"), d);
    const Dataset back = load_csv_dataset(dir.file("d.csv"));
    CHECK(back.kind() == DataKind::Continuous);
    CHECK(back.names() == d.names());
    CHECK(back.values() == d.values());
}

TEST_CASE("discrete csv keeps its kind line") {
    TempDir dir;
    Eigen::MatrixXd m(4, 2);
    m << 0, 1, 2, 0, 1, 1, 0, 0;
    const Dataset d({"x", "y"}, m, DataKind::Discrete);
    write_csv_dataset(dir.file("d.csv"), d);
    CHECK(slurp(dir.file("d.csv")).rfind("#kind: discrete\nx,y\n0,1\n", 0) == 0);
    const Dataset back = load_csv_dataset(dir.file("d.csv"));
    CHECK(back.kind() == DataKind::Discrete);
    CHECK(back.cardinalities() == std::vector<int>{3, 2});
    CHECK(back.values() == m);
    CHECK(load_csv_dataset(dir.file("d.csv"), DataKind::Continuous).kind() == DataKind::Continuous);
}

TEST_CASE("csv without a kind line defaults to continuous") {
    TempDir dir;
    spit(dir.file("d.csv"), "p,q\n1,2\n3,4\n");
    const Dataset d = load_csv_dataset(dir.file("d.csv"));
    CHECK(d.kind() == DataKind::Continuous);
    CHECK(d.samples() == 2);
    CHECK(load_csv_dataset(dir.file("d.csv"), DataKind::Discrete).cardinalities() == std::vector<int>{4, 5});
}

TEST_CASE("csv errors cite the line") {
    TempDir dir;
    spit(dir.file("d.csv"), "p,q\n1,2\n3\n");
    try {
        load_csv_dataset(dir.file("d.csv"));
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }
    spit(dir.file("n.csv"), "p,q\n1,abc\n");
    CHECK_THROWS_AS(load_csv_dataset(dir.file("n.csv")), ParseError);
    spit(dir.file("k.csv"), "#kind: ordinal\np\n1\n");
    CHECK_THROWS_AS(load_csv_dataset(dir.file("k.csv")), ParseError);
    spit(dir.file("neg.csv"), "#kind: discrete\np\n-1\n");
    CHECK_THROWS_AS(load_csv_dataset(dir.file("neg.csv")), ParseError);
}

TEST_CASE("json report fragments") {
    ClusterTree t;
    t.vars = {0, 1, 2};
    t.k = 2;
    t.near_zero = {0.0, 0.01};
    ClusterTree a, b;
    a.vars = {0};
    b.vars = {1, 2};
    t.children = {a, b};
    const auto j = tree_to_json(t, {"A", "B", "C"});
    CHECK(j.at("vars") == nlohmann::json({"A", "B", "C"}));
    CHECK(j.at("k") == 2);
    CHECK(j.at("children").size() == 2);
    CHECK(j.at("children")[1].at("vars") == nlohmann::json({"B", "C"}));
    CHECK(j.at("near_zero_eigenvalues").size() == 2);

    EvalReport r;
    r.shd = 3;
    const auto e = eval_to_json(r);
    for (const char* key : {"shd", "causal_accuracy", "causal_accuracy_definition", "bdeu", "extra_edges",
                            "missing_edges", "ci_unique", "ci_total", "runtime_ms"})
        CHECK(e.contains(key));
    CHECK(e.at("bdeu").is_null());

    const auto rel = relative_to_json({{"shd", std::nullopt}, {"ci_unique", 0.5}});
    CHECK(rel.at("shd").at("undefined") == true);
    CHECK(rel.at("ci_unique").at("ratio") == 0.5);
}

TEST_CASE("kind names") {
    CHECK(parse_kind("discrete") == DataKind::Discrete);
    CHECK(parse_kind(" continuous ") == DataKind::Continuous);
    CHECK_FALSE(parse_kind("binary").has_value());
    CHECK(to_string(DataKind::Discrete) == "discrete");
}
