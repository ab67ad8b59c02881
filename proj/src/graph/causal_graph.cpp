#include "graph/causal_graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "common/error.hpp"

namespace mocg::graph {

const char* to_string(EdgeSource s) {
  switch (s) {
    case EdgeSource::PC: return "PC";
    case EdgeSource::Continuous: return "Continuous";
    case EdgeSource::Hybrid: return "Hybrid";
    case EdgeSource::User: return "User";
  }
  return "User";
}

EdgeSource parse_edge_source(std::string_view text) {
  for (auto s : {EdgeSource::PC, EdgeSource::Continuous, EdgeSource::Hybrid, EdgeSource::User})
    if (text == to_string(s)) return s;
  fail(ErrorCode::InvalidArgument, "unknown edge source '" + std::string(text) + "'");
}

const char* to_string(Sign s) {
  switch (s) {
    case Sign::Positive: return "Positive";
    case Sign::Negative: return "Negative";
    case Sign::Zero: return "Zero";
  }
  return "Zero";
}

EdgeEffect make_effect(double coefficient) {
  EdgeEffect e;
  e.effect = coefficient;
  e.display_weight = std::log1p(std::abs(coefficient));
  if (std::abs(coefficient) < 1e-9) {
    e.sign = Sign::Zero;
    e.display_weight = 0;
  } else {
    e.sign = coefficient > 0 ? Sign::Positive : Sign::Negative;
  }
  return e;
}

bool CausalGraph::has_node(const std::string& name) const {
  return std::find(nodes.begin(), nodes.end(), name) != nodes.end();
}

const GraphEdge* CausalGraph::find_pair(const std::string& a, const std::string& b) const {
  for (const auto& e : edges)
    if ((e.from == a && e.to == b) || (e.from == b && e.to == a)) return &e;
  return nullptr;
}

GraphEdge* CausalGraph::find_pair(const std::string& a, const std::string& b) {
  return const_cast<GraphEdge*>(static_cast<const CausalGraph&>(*this).find_pair(a, b));
}

std::vector<std::string> CausalGraph::parents(const std::string& v) const {
  std::vector<std::string> out;
  for (const auto& e : edges)
    if (e.directed && e.to == v) out.push_back(e.from);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> CausalGraph::children(const std::string& v) const {
  std::vector<std::string> out;
  for (const auto& e : edges)
    if (e.directed && e.from == v) out.push_back(e.to);
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::vector<std::string>> CausalGraph::directed_path(const std::string& from,
                                                                    const std::string& to) const {
  std::map<std::string, std::string> prev;
  std::queue<std::string> q;
  q.push(from);
  prev[from] = from;
  while (!q.empty()) {
    const auto u = q.front();
    q.pop();
    if (u == to) {
      std::vector<std::string> path{to};
      for (auto v = to; v != from;) {
        v = prev[v];
        path.push_back(v);
      }
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (const auto& c : children(u)) {
      if (prev.count(c)) continue;
      prev[c] = u;
      q.push(c);
    }
  }
  return std::nullopt;
}

void CausalGraph::validate() const {
  std::set<std::string> names;
  for (const auto& n : nodes) {
    if (n.empty()) fail(ErrorCode::InvalidArgument, "empty node name");
    if (!names.insert(n).second) fail(ErrorCode::InvalidArgument, "duplicate node '" + n + "'");
  }
  if (!outcome.empty() && !names.count(outcome))
    fail(ErrorCode::InvalidArgument, "outcome '" + outcome + "' is not a node");
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& e : edges) {
    if (!names.count(e.from) || !names.count(e.to))
      fail(ErrorCode::NotFound, "edge " + e.from + " -> " + e.to + " references an unknown node");
    if (e.from == e.to) fail(ErrorCode::InvalidArgument, "self-loop on '" + e.from + "'");
    if (!pairs.insert(std::minmax(e.from, e.to)).second)
      fail(ErrorCode::InvalidArgument, "duplicate edge between '" + e.from + "' and '" + e.to + "'");
  }
  for (const auto& e : edges) {
    if (!e.directed) continue;
    if (auto back = directed_path(e.to, e.from)) {
      back->push_back(e.to);
      fail(ErrorCode::Cycle, "graph contains a directed cycle", {{"cycle", *back}});
    }
  }
}

std::vector<std::string> topological_names(const CausalGraph& g) {
  std::map<std::string, int> indegree;
  for (const auto& n : g.nodes) indegree[n] = 0;
  for (const auto& e : g.edges)
    if (e.directed) ++indegree[e.to];
  std::set<std::string> ready;
  for (const auto& [n, d] : indegree)
    if (d == 0) ready.insert(n);
  std::vector<std::string> order;
  while (!ready.empty()) {
    const auto u = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(u);
    for (const auto& c : g.children(u))
      if (--indegree[c] == 0) ready.insert(c);
  }
  if (order.size() != g.nodes.size()) fail(ErrorCode::Cycle, "graph contains a directed cycle");
  return order;
}

nlohmann::json to_json(const EdgeEffect& e) {
  nlohmann::json j{{"effect", e.effect},
                   {"standard_error", e.standard_error},
                   {"display_weight", e.display_weight},
                   {"sign", to_string(e.sign)},
                   {"adjustment_set", e.adjustment_set}};
  if (!e.contrast.empty()) j["contrast"] = e.contrast;
  return j;
}

nlohmann::json to_json(const GraphEdge& e) {
  auto sources = nlohmann::json::array();
  for (auto s : e.sources) sources.push_back(to_string(s));
  nlohmann::json j{{"from", e.from}, {"to", e.to}, {"directed", e.directed}, {"sources", sources}};
  if (e.effect) {
    j["effect"] = e.effect->effect;
    j["display_weight"] = e.effect->display_weight;
    j["sign"] = to_string(e.effect->sign);
    j["estimate"] = to_json(*e.effect);
  } else {
    j["effect"] = nullptr;
    j["display_weight"] = nullptr;
    j["sign"] = nullptr;
  }
  if (!e.effect_error.empty()) j["effect_error"] = e.effect_error;
  return j;
}

nlohmann::json to_json(const CausalGraph& g) {
  auto edges = nlohmann::json::array();
  for (const auto& e : g.edges) edges.push_back(to_json(e));
  auto overlays = nlohmann::json::object();
  for (const auto& [name, list] : g.overlays) {
    auto arr = nlohmann::json::array();
    for (const auto& [a, b] : list) arr.push_back({a, b});
    overlays[name] = std::move(arr);
  }
  return {{"id", g.id},         {"dataset", g.dataset_id}, {"outcome", g.outcome},      {"nodes", g.nodes},
          {"edges", edges},     {"version", g.version},    {"overlays", overlays}};
}

CausalGraph graph_from_json(const nlohmann::json& doc) {
  try {
    CausalGraph g;
    g.id = doc.value("id", std::string());
    g.dataset_id = doc.value("dataset", std::string());
    g.outcome = doc.value("outcome", std::string());
    g.nodes = doc.at("nodes").get<std::vector<std::string>>();
    g.version = doc.value("version", std::int64_t{1});
    for (const auto& je : doc.value("edges", nlohmann::json::array())) {
      GraphEdge e;
      e.from = je.at("from").get<std::string>();
      e.to = je.at("to").get<std::string>();
      e.directed = je.value("directed", true);
      if (!e.directed && e.to < e.from) std::swap(e.from, e.to);
      for (const auto& s : je.value("sources", nlohmann::json::array()))
        e.sources.insert(parse_edge_source(s.get<std::string>()));
      if (je.contains("estimate") && je["estimate"].is_object()) {
        const auto& est = je["estimate"];
        EdgeEffect eff = make_effect(est.at("effect").get<double>());
        eff.standard_error = est.value("standard_error", 0.0);
        eff.adjustment_set = est.value("adjustment_set", std::vector<std::string>{});
        eff.contrast = est.value("contrast", std::string());
        e.effect = eff;
      } else if (je.contains("effect") && je["effect"].is_number()) {
        e.effect = make_effect(je["effect"].get<double>());
      }
      e.effect_error = je.value("effect_error", std::string());
      g.edges.push_back(std::move(e));
    }
    if (doc.contains("overlays") && doc["overlays"].is_object()) {
      for (const auto& [name, arr] : doc["overlays"].items()) {
        auto& list = g.overlays[name];
        for (const auto& p : arr) list.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
      }
    }
    g.validate();
    return g;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed graph JSON: ") + e.what());
  }
}

}  // namespace mocg::graph
