#include "hccd/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hccd {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) out.push_back(trim(field));
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int find_or_add(std::vector<std::string>& names, const std::string& name, bool fixed) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it != names.end()) return static_cast<int>(it - names.begin());
    if (fixed) throw UnknownNode(name);
    names.push_back(name);
    return static_cast<int>(names.size()) - 1;
}

}  // namespace

std::optional<DataKind> parse_kind(const std::string& text) {
    const std::string t = trim(text);
    if (t == "continuous") return DataKind::Continuous;
    if (t == "discrete") return DataKind::Discrete;
    return std::nullopt;
}

std::string to_string(DataKind kind) { return kind == DataKind::Discrete ? "discrete" : "continuous"; }

Dataset load_csv_dataset(const std::string& path, std::optional<DataKind> kind) {
    std::ifstream in = open_in(path);
    std::string line;
    int line_no = 0;
    std::optional<DataKind> declared;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            const std::string body = trim(std::string_view(t).substr(1));
            if (body.rfind("kind:", 0) == 0) {
                declared = parse_kind(body.substr(5));
                if (!declared) throw ParseError(path, line_no, "unknown data kind");
            }
            continue;
        }
        header = split(t, ',');
        break;
    }
    if (header.empty()) throw ParseError(path, line_no, "missing header row");
    const DataKind resolved = kind.value_or(declared.value_or(DataKind::Continuous));

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto fields = split(t, ',');
        if (fields.size() != header.size())
            throw ParseError(path, line_no,
                             "expected " + std::to_string(header.size()) + " columns, found " +
                                 std::to_string(fields.size()));
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) {
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc() || ptr != f.data() + f.size())
                throw ParseError(path, line_no, "not a number: '" + f + "'");
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(path, line_no, "no data rows");

    Eigen::MatrixXd values(rows.size(), header.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < header.size(); ++j) values(i, j) = rows[i][j];
    try {
        return Dataset(header, std::move(values), resolved);
    } catch (const std::invalid_argument& e) {
        throw ParseError(path, line_no, e.what());
    }
}

void write_csv_dataset(const std::string& path, const Dataset& data, bool with_kind_line) {
    std::ofstream out = open_out(path);
    if (with_kind_line) out << "#kind: " << to_string(data.kind()) << '\n';
    for (int j = 0; j < data.vars(); ++j) out << (j ? "," : "") << data.names()[j];
    out << '\n';
    const bool discrete = data.kind() == DataKind::Discrete;
    for (int i = 0; i < data.samples(); ++i) {
        for (int j = 0; j < data.vars(); ++j) {
            if (j) out << ',';
            if (discrete)
                out << static_cast<int>(data.values()(i, j));
            else
                out << format_double(data.values()(i, j));
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

Pdag load_edge_list(const std::string& path, const std::optional<std::vector<std::string>>& names) {
    std::ifstream in = open_in(path);
    std::vector<std::string> nodes = names.value_or(std::vector<std::string>{});
    const bool fixed = names.has_value();
    struct Edge {
        int from, to;
        bool directed;
        int line;
    };
    std::vector<Edge> edges;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::size_t pos = t.find("->");
        bool directed = true;
        if (pos == std::string::npos) {
            pos = t.find("--");
            directed = false;
        }
        if (pos == std::string::npos) {
            if (t.find_first_of(" \t") != std::string::npos)
                throw ParseError(path, line_no, "expected 'A -> B', 'A -- B' or a node name");
            find_or_add(nodes, t, fixed);
            continue;
        }
        const std::string a = trim(std::string_view(t).substr(0, pos));
        const std::string b = trim(std::string_view(t).substr(pos + 2));
        if (a.empty() || b.empty()) throw ParseError(path, line_no, "edge is missing an endpoint");
        if (a == b) throw ParseError(path, line_no, "self-loop");
        edges.push_back({find_or_add(nodes, a, fixed), find_or_add(nodes, b, fixed), directed, line_no});
    }
    Pdag g(nodes);
    for (const auto& e : edges) {
        if (g.adjacent(e.from, e.to)) throw ParseError(path, e.line, "duplicate edge");
        if (e.directed)
            g.add_directed(e.from, e.to);
        else
            g.add_undirected(e.from, e.to);
    }
    return g;
}

void write_edge_list(const std::string& path, const Pdag& g) {
    std::ofstream out = open_out(path);
    for (const auto& name : g.names()) out << name << '\n';
    for (int i = 0; i < g.size(); ++i) {
        for (int j = 0; j < g.size(); ++j) {
            if (g.directed(i, j))
                out << g.names()[i] << " -> " << g.names()[j] << '\n';
            else if (i < j && g.undirected(i, j))
                out << g.names()[i] << " -- " << g.names()[j] << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

nlohmann::json graph_to_json(const Pdag& g) {
    nlohmann::json edges = nlohmann::json::array();
    for (int i = 0; i < g.size(); ++i) {
        for (int j = 0; j < g.size(); ++j) {
            if (g.directed(i, j))
                edges.push_back({{"from", g.names()[i]}, {"to", g.names()[j]}, {"directed", true}});
            else if (i < j && g.undirected(i, j))
                edges.push_back({{"from", g.names()[i]}, {"to", g.names()[j]}, {"directed", false}});
        }
    }
    return {{"nodes", g.names()}, {"edges", edges}};
}

Pdag graph_from_json(const nlohmann::json& j) {
    Pdag g(j.at("nodes").get<std::vector<std::string>>());
    for (const auto& e : j.at("edges")) {
        const int a = g.index_of(e.at("from").get<std::string>());
        const int b = g.index_of(e.at("to").get<std::string>());
        if (e.at("directed").get<bool>())
            g.add_directed(a, b);
        else
            g.add_undirected(a, b);
    }
    return g;
}

void write_graph_json(const std::string& path, const Pdag& g) {
    write_text(path, graph_to_json(g).dump(2) + "\n");
}

Pdag load_graph_json(const std::string& path) {
    std::ifstream in = open_in(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
        return graph_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path, 0, e.what());
    }
}

Pdag load_graph(const std::string& path, const std::optional<std::vector<std::string>>& names) {
    const bool json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
    if (!json) return load_edge_list(path, names);
    Pdag g = load_graph_json(path);
    return names ? align_to(g, *names) : g;
}

nlohmann::json tree_to_json(const ClusterTree& tree, const std::vector<std::string>& names) {
    std::vector<std::string> vars;
    for (int v : tree.vars) vars.push_back(names[v]);
    nlohmann::json children = nlohmann::json::array();
    for (const auto& c : tree.children) children.push_back(tree_to_json(c, names));
    return {{"vars", vars}, {"k", tree.k}, {"near_zero_eigenvalues", tree.near_zero}, {"children", children}};
}

nlohmann::json eval_to_json(const EvalReport& r) {
    nlohmann::json j = {
        {"shd", r.shd},
        {"causal_accuracy", r.causal_accuracy},
        {"causal_accuracy_definition", "directed-edge recall against the true DAG"},
        {"extra_edges", r.extra_edges},
        {"missing_edges", r.missing_edges},
        {"ci_unique", r.ci_unique},
        {"ci_total", r.ci_total},
        {"runtime_ms", r.runtime_ms},
    };
    j["bdeu"] = r.bdeu ? nlohmann::json(*r.bdeu) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json relative_to_json(const RelativeReport& r) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, value] : r) {
        if (value)
            j[name] = {{"ratio", *value}, {"undefined", false}};
        else
            j[name] = {{"ratio", nullptr}, {"undefined", true}};
    }
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out = open_out(path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace hccd
