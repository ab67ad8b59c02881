#include "graph/from_snapshot.hpp"

#include "common/error.hpp"

namespace mocg::graph {

EdgeSource algorithm_source(const std::string& algorithm) {
  if (algorithm == "pc") return EdgeSource::PC;
  if (algorithm == "continuous") return EdgeSource::Continuous;
  if (algorithm == "hybrid") return EdgeSource::Hybrid;
  fail(ErrorCode::InvalidArgument, "unknown algorithm '" + algorithm + "'", {{"algorithm", algorithm}});
}

namespace {

std::optional<std::vector<GraphEdge>> algorithm_edges(const discovery::DiscoverySnapshot& s,
                                                      const std::string& algorithm) {
  const auto& v = s.variables;
  auto source = algorithm_source(algorithm);
  std::vector<GraphEdge> out;
  auto add = [&](const discovery::EdgeSet& es, bool directed) {
    for (auto [a, b] : es) {
      std::string from = v.at(a), to = v.at(b);
      if (!directed && to < from) std::swap(from, to);
      out.push_back({from, to, directed, {source}, std::nullopt, {}});
    }
  };
  switch (source) {
    case EdgeSource::PC:
      if (!s.pc) return std::nullopt;
      add(s.pc->directed, true);
      add(s.pc->undirected, false);
      break;
    case EdgeSource::Continuous:
      if (!s.continuous) return std::nullopt;
      add(s.continuous->edges, true);
      break;
    case EdgeSource::Hybrid:
      if (!s.hybrid) return std::nullopt;
      add(*s.hybrid, true);
      break;
    case EdgeSource::User:
      break;
  }
  return out;
}

}  // namespace

std::optional<CausalGraph> graph_from_snapshot(const discovery::DiscoverySnapshot& s, const std::string& dataset_id,
                                               const std::string& outcome, const std::string& algorithm) {
  auto backbone = algorithm_edges(s, algorithm);
  if (!backbone) return std::nullopt;
  CausalGraph g;
  g.dataset_id = dataset_id;
  g.outcome = outcome;
  g.nodes = s.variables;
  g.edges = std::move(*backbone);
  for (const std::string other : {"pc", "continuous", "hybrid"}) {
    if (other == algorithm) continue;
    auto edges = algorithm_edges(s, other);
    if (!edges) continue;
    auto& overlay = g.overlays[other];
    for (const auto& e : *edges) {
      overlay.emplace_back(e.from, e.to);
      if (auto* mine = g.find_pair(e.from, e.to)) mine->sources.insert(algorithm_source(other));
    }
  }
  return g;
}

}  // namespace mocg::graph
