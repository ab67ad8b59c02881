#include "comparison/comparison.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "layout/export.hpp"

namespace mocg::comparison {

using nlohmann::json;

const char* to_string(GlyphSide side) {
  switch (side) {
    case GlyphSide::Left: return "left";
    case GlyphSide::Right: return "right";
    case GlyphSide::None: return "none";
  }
  return "none";
}

GlyphMeta make_glyph(std::string graph_id, std::string node, double delta, double unit) {
  GlyphMeta g{std::move(graph_id), std::move(node), GlyphSide::None, 0};
  double moved = std::abs(delta) / unit;
  if (moved < 0.5) return g;
  g.bars = std::min<int>(kMaxBars, static_cast<int>(std::lround(moved)));
  g.side = delta > 0 ? GlyphSide::Left : GlyphSide::Right;
  return g;
}

Thumbnail make_thumbnail(const layout::LayeredLayout& super, const layout::LayeredLayout& sub,
                         const std::string& graph_id) {
  auto extent = [](const layout::LayeredLayout& l, double layout::NodePlacement::*field) {
    double lo = 0, hi = 0;
    bool first = true;
    for (const auto& n : l.nodes) {
      double v = n.*field;
      if (first || v < lo) lo = v;
      if (first || v > hi) hi = v;
      first = false;
    }
    return std::pair{lo, hi};
  };
  auto [sx0, sx1] = extent(super, &layout::NodePlacement::x);
  auto [sy0, sy1] = extent(super, &layout::NodePlacement::y);
  auto [x0, x1] = extent(sub, &layout::NodePlacement::x);
  auto [y0, y1] = extent(sub, &layout::NodePlacement::y);
  auto norm = [](double v, double lo, double hi) {
    if (hi - lo <= 0) return 0.0;
    return std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
  };
  return {graph_id, norm(x0, sx0, sx1), norm(y0, sy0, sy1), norm(x1, sx0, sx1), norm(y1, sy0, sy1)};
}

ComparisonSet assemble(const std::vector<graph::CausalGraph>& graphs) {
  if (graphs.size() < 2)
    fail(ErrorCode::InvalidArgument, "comparison needs at least two graphs", {{"count", graphs.size()}});
  ComparisonSet set;
  set.graphs = graphs;
  set.supergraph = layout::build_supergraph(graphs);
  set.compressed = layout::compress(set.supergraph);
  set.stress = layout::stress_report(set.supergraph, set.compressed);
  double unit = set.supergraph.layout.unit;

  double lo = 0, hi = 0;
  bool first = true;
  for (const auto& g : graphs) {
    auto sub = layout::extract_subgraph(set.supergraph, g.id);
    set.thumbnails.push_back(make_thumbnail(set.supergraph.layout, sub, g.id));
    set.extracted.push_back(std::move(sub));
    const auto* c = set.compressed.find(g.id);
    for (const auto& n : c->layout.nodes) {
      set.glyphs.push_back(make_glyph(g.id, n.name, c->delta.at(n.name), unit));
      if (first || n.x < lo) lo = n.x;
      if (first || n.x > hi) hi = n.x;
      first = false;
    }
  }
  for (const auto& n : set.supergraph.nodes) set.palette.push_back({n.name, n.membership});

  set.grid.unit = unit;
  set.grid.ranks = set.supergraph.layout.rank_count();
  for (double x = std::floor(lo / unit) * unit; x <= hi + 1e-9; x += unit) set.grid.columns.push_back(x);
  return set;
}

json to_json(const GlyphMeta& g) {
  return {{"graph_id", g.graph_id}, {"node", g.node}, {"side", to_string(g.side)}, {"bars", g.bars}};
}

json to_json(const ComparisonSet& set) {
  json graphs = json::object(), extracted = json::object();
  for (std::size_t i = 0; i < set.graphs.size(); ++i) {
    const auto& g = set.graphs[i];
    graphs[g.id] = graph::to_json(g);
    extracted[g.id] = layout::to_json(set.extracted[i]);
  }
  json glyphs = json::array();
  for (const auto& g : set.glyphs) glyphs.push_back(to_json(g));
  json thumbs = json::array();
  for (const auto& t : set.thumbnails)
    thumbs.push_back({{"graph_id", t.graph_id}, {"x0", t.x0}, {"y0", t.y0}, {"x1", t.x1}, {"y1", t.y1}});
  json palette = json::array();
  for (const auto& p : set.palette) palette.push_back({{"node", p.node}, {"slices", p.slices}});
  return {{"graph_ids", set.supergraph.graph_ids},
          {"graphs", graphs},
          {"supergraph", layout::to_json(set.supergraph)},
          {"extracted", extracted},
          {"compressed", layout::to_json(set.compressed)},
          {"glyphs", glyphs},
          {"thumbnails", thumbs},
          {"stress", layout::to_json(set.stress)},
          {"palette", palette},
          {"grid", {{"unit", set.grid.unit}, {"ranks", set.grid.ranks}, {"columns", set.grid.columns}}}};
}

}  // namespace mocg::comparison
