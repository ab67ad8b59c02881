#pragma once

#include <string>
#include <vector>

#include "graph/causal_graph.hpp"

namespace mocg::layout {

struct NodePlacement {
  std::string name;
  int rank = 0;
  int order = 0;
  double x = 0;
  double y = 0;
};

struct Point {
  double x = 0;
  double y = 0;
};

struct EdgePlacement {
  std::string from;
  std::string to;
  bool directed = true;
  // The cause sits on a deeper rank than the effect.
  bool reversed = false;
  // Interior points where the edge crosses intermediate ranks, from `from`
  // towards `to`.
  std::vector<Point> bends;
};

struct LayeredLayout {
  std::vector<NodePlacement> nodes;  // sorted by (rank, order)
  std::vector<EdgePlacement> edges;
  double unit = 1.0;

  const NodePlacement* find(const std::string& name) const;
  int rank_count() const;
};

// Edge used for layering; undirected edges still need a direction here.
struct LayerEdge {
  std::string from;
  std::string to;
  bool directed = true;
};

struct LayoutOptions {
  // Barycenter down/up sweep pairs. Zero keeps the initial name order.
  int sweeps = 8;
  // Down/up passes of the x-coordinate assignment.
  int x_passes = 4;
};

// Sugiyama-style layout: longest-path ranks (sources at 0), dummy nodes on
// long edges, barycenter ordering that keeps the best crossing count seen,
// and an integer x grid from isotonic fits toward neighbour barycenters.
// Throws Error(Cycle) if the layering edges are cyclic.
LayeredLayout layered_layout(const std::vector<std::string>& nodes, const std::vector<LayerEdge>& edges,
                             const LayoutOptions& options = {});

// Undirected edges are layered along topological_names(g).
LayeredLayout layered_layout(const graph::CausalGraph& g, const LayoutOptions& options = {});

// Pairwise crossings of edge segments between adjacent ranks, counting
// dummy segments of long edges.
long count_crossings(const LayeredLayout& layout);

// Reassigns `order` within each rank by ascending x (then name).
void renumber_orders(LayeredLayout& layout);

}  // namespace mocg::layout
