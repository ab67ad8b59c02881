#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace mocg::discovery {

// (from, to) as indices into a node list. Undirected edges are stored with from < to.
using Edge = std::pair<std::size_t, std::size_t>;
using EdgeSet = std::set<Edge>;

inline Edge unordered(std::size_t a, std::size_t b) { return a < b ? Edge{a, b} : Edge{b, a}; }

struct Pdag {
  std::vector<std::string> nodes;
  EdgeSet directed;
  EdgeSet undirected;

  bool adjacent(std::size_t a, std::size_t b) const;
  bool has_directed(std::size_t from, std::size_t to) const { return directed.count({from, to}) > 0; }
  bool has_undirected(std::size_t a, std::size_t b) const { return undirected.count(unordered(a, b)) > 0; }
  // Throws if a self-loop, duplicate pair or directed cycle is present.
  void validate() const;
};

std::optional<std::vector<std::size_t>> topological_order(std::size_t n, const EdgeSet& directed);
bool is_acyclic(std::size_t n, const EdgeSet& directed);
// True when `to` is reachable from `from` along directed edges.
bool reachable(std::size_t n, const EdgeSet& directed, std::size_t from, std::size_t to);

nlohmann::json edges_to_json(const std::vector<std::string>& nodes, const EdgeSet& edges);
EdgeSet edges_from_json(const std::vector<std::string>& nodes, const nlohmann::json& arr);
nlohmann::json to_json(const Pdag& g);
// Reads {nodes, directed, undirected}; undirected pairs are normalized.
Pdag pdag_from_json(const nlohmann::json& doc);

}  // namespace mocg::discovery
