#include "layout/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace mocg::layout {

using nlohmann::json;

json to_json(const LayeredLayout& layout) {
  json nodes = json::object();
  for (const auto& n : layout.nodes) nodes[n.name] = {{"rank", n.rank}, {"order", n.order}, {"x", n.x}, {"y", n.y}};
  json edges = json::array();
  for (const auto& e : layout.edges) {
    json bends = json::array();
    for (const auto& b : e.bends) bends.push_back({b.x, b.y});
    edges.push_back({{"from", e.from}, {"to", e.to}, {"directed", e.directed}, {"reversed", e.reversed}, {"bends", bends}});
  }
  return {{"unit", layout.unit}, {"nodes", nodes}, {"edges", edges}};
}

json to_json(const SuperLayout& s) {
  json nodes = json::array();
  for (const auto& n : s.nodes) nodes.push_back({{"name", n.name}, {"membership", n.membership}});
  json edges = json::array();
  for (const auto& e : s.edges)
    edges.push_back({{"from", e.from}, {"to", e.to}, {"directed", e.directed}, {"owner", e.owner}});
  json dropped = json::array();
  for (const auto& [a, b] : s.dropped) dropped.push_back({{"from", a}, {"to", b}});
  return {{"graph_ids", s.graph_ids}, {"nodes", nodes}, {"edges", edges}, {"layout", to_json(s.layout)},
          {"dropped", dropped}};
}

json to_json(const CompressedLayout& c) {
  json subs = json::array();
  for (const auto& sub : c.subgraphs)
    subs.push_back({{"graph_id", sub.graph_id}, {"layout", to_json(sub.layout)}, {"delta", sub.delta}});
  return {{"anchored", c.anchored},
          {"anchor_source", c.anchor_source},
          {"anchor_target", c.anchor_target},
          {"fallback", c.fallback},
          {"subgraphs", subs}};
}

json to_json(const StressReport& r) {
  json out = json::array();
  for (const auto& row : r)
    out.push_back({{"graph_id", row.graph_id}, {"extracted", row.extracted}, {"compressed", row.compressed}});
  return out;
}

namespace {

const EdgePlacement* find_edge(const LayeredLayout& layout, const std::string& from, const std::string& to) {
  for (const auto& e : layout.edges)
    if (e.from == from && e.to == to) return &e;
  return nullptr;
}

const graph::GraphEdge* find_graph_edge(const graph::CausalGraph* g, const EdgePlacement& e) {
  if (!g) return nullptr;
  for (const auto& ge : g->edges)
    if (ge.from == e.from && ge.to == e.to) return &ge;
  return nullptr;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

json graph_with_layout(const graph::CausalGraph& g, const LayeredLayout& layout) {
  json doc = graph::to_json(g);
  for (auto& e : doc["edges"]) {
    const auto* p = find_edge(layout, e["from"].get<std::string>(), e["to"].get<std::string>());
    e["reversed"] = p ? p->reversed : false;
  }
  doc["layout"] = to_json(layout)["nodes"];
  return doc;
}

std::string to_svg(const LayeredLayout& layout, const graph::CausalGraph* g, const SvgOptions& options) {
  double margin = options.radius * 2.5;
  double max_x = 0, max_y = 0;
  for (const auto& n : layout.nodes) {
    max_x = std::max(max_x, n.x);
    max_y = std::max(max_y, n.y);
  }
  auto px = [&](double x) { return margin + x * options.spacing; };
  auto py = [&](double y) { return margin + y * options.spacing; };
  double width = px(max_x) + margin, height = py(max_y) + margin;

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
     << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n";
  if (!options.title.empty()) os << "  <title>" << xml_escape(options.title) << "</title>\n";
  os << "  <defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"6\" "
        "markerHeight=\"6\" orient=\"auto-start-reverse\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#333\"/></marker></defs>\n";

  os << "  <g class=\"edges\">\n";
  for (const auto& e : layout.edges) {
    const auto* a = layout.find(e.from);
    const auto* b = layout.find(e.to);
    if (!a || !b) continue;
    std::vector<Point> pts{{px(a->x), py(a->y)}};
    for (const auto& p : e.bends) pts.push_back({px(p.x), py(p.y)});
    pts.push_back({px(b->x), py(b->y)});
    // Trim both ends to the disk rims.
    auto trim = [&](Point& end, const Point& toward) {
      double dx = toward.x - end.x, dy = toward.y - end.y, len = std::hypot(dx, dy);
      if (len > options.radius) {
        end.x += dx / len * options.radius;
        end.y += dy / len * options.radius;
      }
    };
    trim(pts.front(), pts[1]);
    trim(pts.back(), pts[pts.size() - 2]);

    const auto* ge = find_graph_edge(g, e);
    double weight = ge && ge->effect ? ge->effect->display_weight : 0.0;
    bool negative = ge && ge->effect && ge->effect->sign == graph::Sign::Negative;
    os << "    <polyline class=\"edge\" fill=\"none\" stroke=\"#333\" stroke-width=\"" << num(1.0 + 2.0 * weight)
       << "\"";
    if (negative) os << " stroke-dasharray=\"6,4\"";
    if (e.directed) os << " marker-end=\"url(#arrow)\"";
    os << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) os << (i ? " " : "") << num(pts[i].x) << ',' << num(pts[i].y);
    os << "\"/>\n";
  }
  os << "  </g>\n  <g class=\"nodes\">\n";
  for (const auto& n : layout.nodes) {
    double cx = px(n.x), cy = py(n.y);
    os << "    <g class=\"node\" id=\"node-" << xml_escape(n.name) << "\">\n";
    if (g && g->outcome == n.name) {
      os << "      <polygon class=\"outcome\" fill=\"none\" stroke=\"#c0392b\" points=\"";
      int spikes = 16;
      for (int k = 0; k < 2 * spikes; ++k) {
        double r = options.radius * (k % 2 ? 1.2 : 1.45);
        double t = std::numbers::pi * k / spikes;
        os << (k ? " " : "") << num(cx + r * std::cos(t)) << ',' << num(cy + r * std::sin(t));
      }
      os << "\"/>\n";
    }
    os << "      <circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(options.radius)
       << "\" fill=\"#f5f5f5\" stroke=\"#333\"/>\n"
       << "      <text x=\"" << num(cx) << "\" y=\"" << num(cy + options.radius + 12)
       << "\" text-anchor=\"middle\" font-size=\"11\">" << xml_escape(n.name) << "</text>\n"
       << "    </g>\n";
  }
  os << "  </g>\n</svg>\n";
  return os.str();
}

std::string to_dot(const LayeredLayout& layout, const graph::CausalGraph* g, const std::string& name) {
  std::ostringstream os;
  os << "digraph " << dot_quote(name) << " {\n  node [shape=circle];\n";
  for (const auto& n : layout.nodes) {
    os << "  " << dot_quote(n.name) << " [pos=\"" << num(n.x) << ',' << num(-n.y) << "!\"";
    if (g && g->outcome == n.name) os << ", peripheries=2";
    os << "];\n";
  }
  for (const auto& e : layout.edges) {
    os << "  " << dot_quote(e.from) << " -> " << dot_quote(e.to);
    std::vector<std::string> attrs;
    if (!e.directed) attrs.push_back("dir=none");
    if (const auto* ge = find_graph_edge(g, e); ge && ge->effect) {
      if (ge->effect->sign == graph::Sign::Negative) attrs.push_back("style=dashed");
      attrs.push_back("penwidth=" + num(1.0 + 2.0 * ge->effect->display_weight));
    }
    if (!attrs.empty()) {
      os << " [";
      for (std::size_t i = 0; i < attrs.size(); ++i) os << (i ? ", " : "") << attrs[i];
      os << "]";
    }
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace mocg::layout
