#pragma once

#include <map>
#include <string>
#include <vector>

#include "layout/layered.hpp"
#include "layout/supergraph.hpp"

namespace mocg::layout {

struct CompressedSubgraph {
  std::string graph_id;
  LayeredLayout layout;                // x holds the compressed coordinate
  std::map<std::string, double> delta; // compressed x minus supergraph x
};

struct CompressedLayout {
  std::vector<std::string> anchored;   // nodes shared by two or more graphs
  std::vector<double> anchor_source;   // sorted distinct supergraph x of anchors
  std::vector<double> anchor_target;   // unit-spaced outputs for anchor_source
  std::vector<CompressedSubgraph> subgraphs;
  // No node is shared: each subgraph was packed onto its own unit grid.
  bool fallback = false;

  const CompressedSubgraph* find(const std::string& graph_id) const;
};

// Horizontal compression of every subgraph of `s`. Shared nodes are pinned
// to consecutive integers starting at the smallest shared x. Unique nodes
// outside the anchored span step away from it one unit per distinct x;
// unique nodes between two anchor columns split the gap evenly by their
// distinct x values. Ranks and y stay as in the supergraph.
CompressedLayout compress(const SuperLayout& s);

}  // namespace mocg::layout
