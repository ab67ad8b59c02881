#pragma once

#include <string>
#include <vector>

#include "graph/causal_graph.hpp"
#include "layout/layered.hpp"

namespace mocg::layout {

struct SuperNode {
  std::string name;
  std::vector<std::string> membership;  // owning graph ids in selection order
  bool shared() const { return membership.size() >= 2; }
};

// One graph's record of an edge; graphs disagreeing on a direction each keep
// their own record.
struct OwnedEdge {
  std::string from;
  std::string to;
  bool directed = true;
  std::string owner;
};

struct SuperLayout {
  std::vector<std::string> graph_ids;
  std::vector<SuperNode> nodes;
  std::vector<OwnedEdge> edges;
  // Layout of the union; its edges carry the majority direction per pair.
  LayeredLayout layout;
  // Majority pairs left out of the layering because they closed a cycle.
  std::vector<graph::NamePair> dropped;

  const SuperNode* find(const std::string& name) const;
  bool has_graph(const std::string& id) const;
};

// Union of the graphs in selection order. Needs at least two graphs with
// distinct ids.
SuperLayout build_supergraph(const std::vector<graph::CausalGraph>& graphs, const LayoutOptions& options = {});

// Nodes and edges owned by one graph at their supergraph coordinates.
LayeredLayout extract_subgraph(const SuperLayout& s, const std::string& graph_id);

// Owned edges of one graph.
std::vector<OwnedEdge> owned_edges(const SuperLayout& s, const std::string& graph_id);

}  // namespace mocg::layout
