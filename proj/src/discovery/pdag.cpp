#include "discovery/pdag.hpp"

#include <algorithm>
#include <deque>

#include "common/error.hpp"

namespace mocg::discovery {

bool Pdag::adjacent(std::size_t a, std::size_t b) const {
  return has_directed(a, b) || has_directed(b, a) || has_undirected(a, b);
}

void Pdag::validate() const {
  const auto n = nodes.size();
  for (const auto& [a, b] : directed) {
    if (a == b || a >= n || b >= n) fail(ErrorCode::InvalidArgument, "invalid directed edge");
    if (has_directed(b, a) || has_undirected(a, b))
      fail(ErrorCode::InvalidArgument, "pair appears in more than one edge record");
  }
  for (const auto& [a, b] : undirected)
    if (a >= b || b >= n) fail(ErrorCode::InvalidArgument, "invalid undirected edge");
  if (!is_acyclic(n, directed)) fail(ErrorCode::Cycle, "directed part of PDAG has a cycle");
}

std::optional<std::vector<std::size_t>> topological_order(std::size_t n, const EdgeSet& directed) {
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<std::size_t>> out(n);
  for (const auto& [a, b] : directed) {
    out[a].push_back(b);
    ++indegree[b];
  }
  // Smallest ready index first, so the order is deterministic.
  std::set<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.insert(v);
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    const auto v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (auto w : out[v])
      if (--indegree[w] == 0) ready.insert(w);
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

bool is_acyclic(std::size_t n, const EdgeSet& directed) { return topological_order(n, directed).has_value(); }

bool reachable(std::size_t n, const EdgeSet& directed, std::size_t from, std::size_t to) {
  std::vector<std::vector<std::size_t>> out(n);
  for (const auto& [a, b] : directed) out[a].push_back(b);
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue{from};
  seen[from] = true;
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    if (v == to) return true;
    for (auto w : out[v])
      if (!seen[w]) {
        seen[w] = true;
        queue.push_back(w);
      }
  }
  return false;
}

nlohmann::json edges_to_json(const std::vector<std::string>& nodes, const EdgeSet& edges) {
  auto arr = nlohmann::json::array();
  for (const auto& [a, b] : edges) arr.push_back({nodes.at(a), nodes.at(b)});
  return arr;
}

EdgeSet edges_from_json(const std::vector<std::string>& nodes, const nlohmann::json& arr) {
  auto index = [&](const std::string& name) {
    const auto it = std::find(nodes.begin(), nodes.end(), name);
    if (it == nodes.end()) fail(ErrorCode::NotFound, "edge references unknown node '" + name + "'");
    return static_cast<std::size_t>(it - nodes.begin());
  };
  EdgeSet out;
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2) fail(ErrorCode::InvalidArgument, "edge must be a [from, to] pair");
    out.insert({index(e[0].get<std::string>()), index(e[1].get<std::string>())});
  }
  return out;
}

nlohmann::json to_json(const Pdag& g) {
  return {{"nodes", g.nodes},
          {"directed", edges_to_json(g.nodes, g.directed)},
          {"undirected", edges_to_json(g.nodes, g.undirected)}};
}

Pdag pdag_from_json(const nlohmann::json& doc) {
  try {
    Pdag g;
    g.nodes = doc.at("nodes").get<std::vector<std::string>>();
    g.directed = edges_from_json(g.nodes, doc.value("directed", nlohmann::json::array()));
    for (const auto& [a, b] : edges_from_json(g.nodes, doc.value("undirected", nlohmann::json::array())))
      g.undirected.insert(unordered(a, b));
    g.validate();
    return g;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed graph JSON: ") + e.what());
  }
}

}  // namespace mocg::discovery
