#pragma once

#include <string>
#include <vector>

#include "graph/causal_graph.hpp"
#include "json.hpp"
#include "layout/compress.hpp"
#include "layout/layered.hpp"
#include "layout/stress.hpp"
#include "layout/supergraph.hpp"

namespace mocg::comparison {

enum class GlyphSide { Left, Right, None };
const char* to_string(GlyphSide side);

// Arrow glyph telling how far a node moved between the extracted and the
// compressed view. The arrow sits on the side the node came from.
struct GlyphMeta {
  std::string graph_id;
  std::string node;
  GlyphSide side = GlyphSide::None;
  int bars = 0;
};

constexpr int kMaxBars = 5;

// Moves under half a unit count as unmoved.
GlyphMeta make_glyph(std::string graph_id, std::string node, double delta, double unit = 1.0);

// Bounding box of a subgraph inside the supergraph extents, in [0,1]^2.
struct Thumbnail {
  std::string graph_id;
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

Thumbnail make_thumbnail(const layout::LayeredLayout& super, const layout::LayeredLayout& sub,
                         const std::string& graph_id);

// Pie slices per node, one per owning graph in selection order.
struct PaletteEntry {
  std::string node;
  std::vector<std::string> slices;
};

struct Grid {
  double unit = 1.0;
  int ranks = 0;
  std::vector<double> columns;  // labelled vertical grid lines
};

struct ComparisonSet {
  std::vector<graph::CausalGraph> graphs;
  layout::SuperLayout supergraph;
  std::vector<layout::LayeredLayout> extracted;  // parallel to graphs
  layout::CompressedLayout compressed;
  std::vector<GlyphMeta> glyphs;
  std::vector<Thumbnail> thumbnails;
  layout::StressReport stress;
  std::vector<PaletteEntry> palette;
  Grid grid;
};

// Builds all three views and their annotations. Needs two or more graphs.
ComparisonSet assemble(const std::vector<graph::CausalGraph>& graphs);

nlohmann::json to_json(const GlyphMeta& g);
nlohmann::json to_json(const ComparisonSet& set);

}  // namespace mocg::comparison
