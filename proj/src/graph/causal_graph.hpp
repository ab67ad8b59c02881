#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace mocg::graph {

enum class EdgeSource { PC, Continuous, Hybrid, User };
const char* to_string(EdgeSource s);
EdgeSource parse_edge_source(std::string_view text);

enum class Sign { Positive, Negative, Zero };
const char* to_string(Sign s);

struct EdgeEffect {
  std::vector<std::string> adjustment_set;
  double effect = 0;
  double standard_error = 0;
  double display_weight = 0;  // log(1 + |effect|)
  Sign sign = Sign::Zero;
  // Set for a multi-category treatment: the reported effect is the
  // largest-magnitude contrast against the first category.
  std::string contrast;
};

// Builds the display fields from a raw coefficient.
EdgeEffect make_effect(double coefficient);

struct GraphEdge {
  std::string from;
  std::string to;
  bool directed = true;  // undirected edges keep from < to
  std::set<EdgeSource> sources;
  std::optional<EdgeEffect> effect;
  std::string effect_error;
};

using NamePair = std::pair<std::string, std::string>;

struct CausalGraph {
  std::string id;
  std::string dataset_id;
  std::string outcome;
  std::vector<std::string> nodes;
  std::vector<GraphEdge> edges;
  std::int64_t version = 1;
  // Reference edge sets from the algorithms that did not supply the backbone.
  std::map<std::string, std::vector<NamePair>> overlays;

  bool has_node(const std::string& name) const;
  // Edge between a and b in either direction or undirected.
  const GraphEdge* find_pair(const std::string& a, const std::string& b) const;
  GraphEdge* find_pair(const std::string& a, const std::string& b);
  std::vector<std::string> parents(const std::string& v) const;
  std::vector<std::string> children(const std::string& v) const;

  // Directed path from `from` to `to` over directed edges (node list), if any.
  std::optional<std::vector<std::string>> directed_path(const std::string& from, const std::string& to) const;

  // Throws on unknown endpoints, duplicate pairs, self-loops, a missing
  // outcome or a directed cycle (detail names the cycle).
  void validate() const;
};

// Node names in an order compatible with all directed edges; undirected edges
// follow that order. Ties break by name.
std::vector<std::string> topological_names(const CausalGraph& g);

nlohmann::json to_json(const EdgeEffect& e);
nlohmann::json to_json(const GraphEdge& e);
nlohmann::json to_json(const CausalGraph& g);
CausalGraph graph_from_json(const nlohmann::json& doc);

}  // namespace mocg::graph
