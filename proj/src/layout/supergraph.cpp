#include "layout/supergraph.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "common/error.hpp"

namespace mocg::layout {

const SuperNode* SuperLayout::find(const std::string& name) const {
  for (const auto& n : nodes)
    if (n.name == name) return &n;
  return nullptr;
}

bool SuperLayout::has_graph(const std::string& id) const {
  return std::find(graph_ids.begin(), graph_ids.end(), id) != graph_ids.end();
}

namespace {

struct PairVotes {
  std::map<graph::NamePair, int> by_direction;
  int owners = 0;
  bool any_directed = false;
};

bool reaches(const std::map<std::string, std::vector<std::string>>& out, const std::string& from,
             const std::string& to) {
  std::vector<std::string> stack{from};
  std::set<std::string> seen{from};
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    if (v == to) return true;
    auto it = out.find(v);
    if (it == out.end()) continue;
    for (const auto& w : it->second)
      if (seen.insert(w).second) stack.push_back(w);
  }
  return false;
}

}  // namespace

SuperLayout build_supergraph(const std::vector<graph::CausalGraph>& graphs, const LayoutOptions& options) {
  if (graphs.size() < 2)
    fail(ErrorCode::InvalidArgument, "a supergraph needs at least two graphs", {{"count", graphs.size()}});
  SuperLayout s;
  std::map<std::string, std::size_t> node_index;
  std::map<graph::NamePair, PairVotes> votes;
  for (const auto& g : graphs) {
    if (s.has_graph(g.id)) fail(ErrorCode::InvalidArgument, "graph selected twice: " + g.id, {{"id", g.id}});
    s.graph_ids.push_back(g.id);
    for (const auto& name : g.nodes) {
      auto [it, fresh] = node_index.emplace(name, s.nodes.size());
      if (fresh) s.nodes.push_back({name, {}});
      s.nodes[it->second].membership.push_back(g.id);
    }
    auto topo = graph::topological_names(g);
    std::map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < topo.size(); ++i) position[topo[i]] = i;
    for (const auto& e : g.edges) {
      s.edges.push_back({e.from, e.to, e.directed, g.id});
      graph::NamePair dir{e.from, e.to};
      if (!e.directed && position[e.from] > position[e.to]) std::swap(dir.first, dir.second);
      graph::NamePair key = std::minmax(e.from, e.to);
      auto& v = votes[key];
      ++v.by_direction[dir];
      ++v.owners;
      v.any_directed = v.any_directed || e.directed;
    }
  }

  struct Candidate {
    graph::NamePair dir;
    int owners;
    bool directed;
  };
  std::vector<Candidate> candidates;
  for (const auto& [key, v] : votes) {
    graph::NamePair forward = key, backward{key.second, key.first};
    int f = v.by_direction.count(forward) ? v.by_direction.at(forward) : 0;
    int b = v.by_direction.count(backward) ? v.by_direction.at(backward) : 0;
    candidates.push_back({b > f ? backward : forward, v.owners, v.any_directed});
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.owners != b.owners) return a.owners > b.owners;
    return a.dir < b.dir;
  });

  std::map<std::string, std::vector<std::string>> out;
  std::vector<LayerEdge> layer_edges;
  for (const auto& c : candidates) {
    if (reaches(out, c.dir.second, c.dir.first)) {
      s.dropped.push_back(c.dir);
      continue;
    }
    out[c.dir.first].push_back(c.dir.second);
    layer_edges.push_back({c.dir.first, c.dir.second, c.directed});
  }

  std::vector<std::string> names;
  for (const auto& n : s.nodes) names.push_back(n.name);
  s.layout = layered_layout(names, layer_edges, options);
  return s;
}

std::vector<OwnedEdge> owned_edges(const SuperLayout& s, const std::string& graph_id) {
  std::vector<OwnedEdge> out;
  for (const auto& e : s.edges)
    if (e.owner == graph_id) out.push_back(e);
  return out;
}

LayeredLayout extract_subgraph(const SuperLayout& s, const std::string& graph_id) {
  if (!s.has_graph(graph_id)) fail(ErrorCode::NotFound, "graph not in supergraph: " + graph_id, {{"id", graph_id}});
  LayeredLayout sub;
  sub.unit = s.layout.unit;
  for (const auto& n : s.nodes) {
    if (std::find(n.membership.begin(), n.membership.end(), graph_id) == n.membership.end()) continue;
    const auto* p = s.layout.find(n.name);
    if (!p) fail(ErrorCode::Internal, "supergraph node without placement: " + n.name);
    sub.nodes.push_back(*p);
  }
  for (const auto& e : owned_edges(s, graph_id)) {
    EdgePlacement p;
    p.from = e.from;
    p.to = e.to;
    p.directed = e.directed;
    const auto* a = sub.find(e.from);
    const auto* b = sub.find(e.to);
    p.reversed = e.directed && a && b && a->rank > b->rank;
    for (const auto& le : s.layout.edges) {
      if (le.from == e.from && le.to == e.to) {
        p.bends = le.bends;
      } else if (le.from == e.to && le.to == e.from) {
        p.bends.assign(le.bends.rbegin(), le.bends.rend());
      } else {
        continue;
      }
      break;
    }
    sub.edges.push_back(std::move(p));
  }
  renumber_orders(sub);
  return sub;
}

}  // namespace mocg::layout
