#pragma once

#include <string>

#include "graph/causal_graph.hpp"
#include "json.hpp"
#include "layout/compress.hpp"
#include "layout/layered.hpp"
#include "layout/stress.hpp"
#include "layout/supergraph.hpp"

namespace mocg::layout {

nlohmann::json to_json(const LayeredLayout& layout);
nlohmann::json to_json(const SuperLayout& s);
nlohmann::json to_json(const CompressedLayout& c);
nlohmann::json to_json(const StressReport& r);

// Graph document with per-edge reversed flags and a `layout` map of node
// placements. Edges of `g` missing from the layout keep reversed = false.
nlohmann::json graph_with_layout(const graph::CausalGraph& g, const LayeredLayout& layout);

struct SvgOptions {
  double spacing = 90;  // pixels per layout unit
  double radius = 16;
  std::string title;
};

// Standalone SVG: one disk per node, a jagged ring around the outcome,
// dashed strokes for negative effects and stroke width growing with the
// display weight. `g` supplies effects and the outcome and may be null.
std::string to_svg(const LayeredLayout& layout, const graph::CausalGraph* g, const SvgOptions& options = {});

// Graphviz document with pinned positions.
std::string to_dot(const LayeredLayout& layout, const graph::CausalGraph* g, const std::string& name = "G");

}  // namespace mocg::layout
