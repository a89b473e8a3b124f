#pragma once

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hccd/citest.hpp"
#include "hccd/graph.hpp"
#include "hccd/hccd.hpp"
#include "hccd/metrics.hpp"

namespace hccd {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& path, int line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

std::optional<DataKind> parse_kind(const std::string& text);
std::string to_string(DataKind kind);

/// Comma-separated, header row first. An optional leading "#kind: discrete"
/// (or continuous) line declares the kind; `kind` overrides it. Discrete
/// cardinalities are max code + 1 per column.
Dataset load_csv_dataset(const std::string& path, std::optional<DataKind> kind = {});
void write_csv_dataset(const std::string& path, const Dataset& data, bool with_kind_line = true);

/// One edge per line, "A -> B" or "A -- B"; '#' lines and blank lines are
/// ignored; a line holding a single name declares a node. When `names` is
/// given the graph uses exactly those nodes.
Pdag load_edge_list(const std::string& path, const std::optional<std::vector<std::string>>& names = {});
void write_edge_list(const std::string& path, const Pdag& g);

nlohmann::json graph_to_json(const Pdag& g);
Pdag graph_from_json(const nlohmann::json& j);
void write_graph_json(const std::string& path, const Pdag& g);
Pdag load_graph_json(const std::string& path);

/// Loads a graph from .json or edge-list text, picked by extension.
Pdag load_graph(const std::string& path, const std::optional<std::vector<std::string>>& names = {});

nlohmann::json tree_to_json(const ClusterTree& tree, const std::vector<std::string>& names);
nlohmann::json eval_to_json(const EvalReport& r);
nlohmann::json relative_to_json(const RelativeReport& r);

void write_text(const std::string& path, const std::string& text);

}  // namespace hccd
