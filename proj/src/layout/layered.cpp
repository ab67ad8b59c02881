#include "layout/layered.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "common/error.hpp"

namespace mocg::layout {

const NodePlacement* LayeredLayout::find(const std::string& name) const {
  for (const auto& n : nodes)
    if (n.name == name) return &n;
  return nullptr;
}

int LayeredLayout::rank_count() const {
  int r = 0;
  for (const auto& n : nodes) r = std::max(r, n.rank + 1);
  return r;
}

namespace {

struct Vertex {
  std::string key;  // name, or a synthetic key for dummies
  bool dummy = false;
  int rank = 0;
  std::vector<int> up, down;
  double x = 0;
};

// Chain of vertices an edge passes through, endpoints included.
struct Route {
  int edge = 0;
  std::vector<int> path;
};

std::vector<int> longest_path_ranks(int n, const std::vector<std::pair<int, int>>& arcs,
                                    const std::vector<std::string>& names) {
  std::vector<std::vector<int>> out(n);
  std::vector<int> indeg(n, 0);
  for (auto [u, v] : arcs) {
    out[u].push_back(v);
    ++indeg[v];
  }
  std::vector<int> rank(n, 0), queue;
  for (int v = 0; v < n; ++v)
    if (indeg[v] == 0) queue.push_back(v);
  std::size_t head = 0;
  while (head < queue.size()) {
    int u = queue[head++];
    for (int v : out[u]) {
      rank[v] = std::max(rank[v], rank[u] + 1);
      if (--indeg[v] == 0) queue.push_back(v);
    }
  }
  if (static_cast<int>(queue.size()) != n) {
    nlohmann::json members = nlohmann::json::array();
    for (int v = 0; v < n; ++v)
      if (indeg[v] > 0) members.push_back(names[v]);
    fail(ErrorCode::Cycle, "layering edges contain a cycle", {{"nodes", members}});
  }
  return rank;
}

using Layers = std::vector<std::vector<int>>;

long layer_crossings(const std::vector<Vertex>& vs, const std::vector<int>& upper, const std::vector<int>& pos) {
  std::vector<std::pair<int, int>> segs;
  for (int u : upper)
    for (int v : vs[u].down) segs.emplace_back(pos[u], pos[v]);
  long c = 0;
  for (std::size_t i = 0; i < segs.size(); ++i)
    for (std::size_t j = i + 1; j < segs.size(); ++j) {
      auto [a1, b1] = segs[i];
      auto [a2, b2] = segs[j];
      if ((a1 < a2 && b1 > b2) || (a1 > a2 && b1 < b2)) ++c;
    }
  return c;
}

std::vector<int> positions(const Layers& layers, std::size_t n) {
  std::vector<int> pos(n, 0);
  for (const auto& layer : layers)
    for (std::size_t i = 0; i < layer.size(); ++i) pos[layer[i]] = static_cast<int>(i);
  return pos;
}

long total_crossings(const std::vector<Vertex>& vs, const Layers& layers) {
  auto pos = positions(layers, vs.size());
  long c = 0;
  for (std::size_t r = 0; r + 1 < layers.size(); ++r) c += layer_crossings(vs, layers[r], pos);
  return c;
}

void sort_by_barycenter(const std::vector<Vertex>& vs, std::vector<int>& layer, const std::vector<int>& pos,
                        bool use_up) {
  std::vector<std::pair<double, int>> keyed;
  for (int v : layer) {
    const auto& nb = use_up ? vs[v].up : vs[v].down;
    double b = pos[v];
    if (!nb.empty()) {
      b = 0;
      for (int u : nb) b += pos[u];
      b /= static_cast<double>(nb.size());
    }
    keyed.emplace_back(b, v);
  }
  std::stable_sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return vs[a.second].key < vs[b.second].key;
  });
  for (std::size_t i = 0; i < layer.size(); ++i) layer[i] = keyed[i].second;
}

void order_layers(const std::vector<Vertex>& vs, Layers& layers, int sweeps) {
  Layers best = layers;
  long best_c = total_crossings(vs, layers);
  for (int s = 0; s < sweeps && best_c > 0; ++s) {
    for (int pass = 0; pass < 2; ++pass) {
      bool down = pass == 0;
      int R = static_cast<int>(layers.size());
      for (int i = 1; i < R; ++i) {
        int r = down ? i : R - 1 - i;
        auto pos = positions(layers, vs.size());
        sort_by_barycenter(vs, layers[r], pos, down);
      }
      long c = total_crossings(vs, layers);
      if (c < best_c) {
        best_c = c;
        best = layers;
      }
    }
  }
  layers = best;
}

// Least-squares fit of non-decreasing values to targets (pool adjacent
// violators).
std::vector<double> isotonic(const std::vector<double>& t) {
  struct Block {
    double sum;
    int count;
  };
  std::vector<Block> blocks;
  for (double v : t) {
    blocks.push_back({v, 1});
    while (blocks.size() > 1) {
      auto& b = blocks[blocks.size() - 1];
      auto& a = blocks[blocks.size() - 2];
      if (a.sum / a.count <= b.sum / b.count) break;
      a.sum += b.sum;
      a.count += b.count;
      blocks.pop_back();
    }
  }
  std::vector<double> out;
  out.reserve(t.size());
  for (const auto& b : blocks) out.insert(out.end(), b.count, b.sum / b.count);
  return out;
}

void place_layer(std::vector<Vertex>& vs, const std::vector<int>& layer, bool use_up) {
  std::vector<double> y(layer.size());
  for (std::size_t k = 0; k < layer.size(); ++k) {
    const auto& v = vs[layer[k]];
    const auto& nb = use_up ? v.up : v.down;
    double target = v.x;
    if (!nb.empty()) {
      target = 0;
      for (int u : nb) target += vs[u].x;
      target /= static_cast<double>(nb.size());
    }
    y[k] = target - static_cast<double>(k);
  }
  y = isotonic(y);
  for (std::size_t k = 0; k < layer.size(); ++k) vs[layer[k]].x = std::round(y[k]) + static_cast<double>(k);
}

void assign_x(std::vector<Vertex>& vs, const Layers& layers, int passes) {
  for (const auto& layer : layers)
    for (std::size_t k = 0; k < layer.size(); ++k) vs[layer[k]].x = static_cast<double>(k);
  int R = static_cast<int>(layers.size());
  for (int p = 0; p < passes; ++p) {
    for (int r = 1; r < R; ++r) place_layer(vs, layers[r], true);
    for (int r = R - 2; r >= 0; --r) place_layer(vs, layers[r], false);
  }
  double lo = 0;
  bool first = true;
  for (const auto& v : vs)
    if (first || v.x < lo) {
      lo = v.x;
      first = false;
    }
  for (auto& v : vs) v.x -= lo;
}

}  // namespace

LayeredLayout layered_layout(const std::vector<std::string>& nodes, const std::vector<LayerEdge>& edges,
                             const LayoutOptions& options) {
  if (nodes.empty()) fail(ErrorCode::InvalidArgument, "layout needs at least one node");
  std::map<std::string, int> index;
  for (const auto& name : nodes)
    if (!index.emplace(name, static_cast<int>(index.size())).second)
      fail(ErrorCode::InvalidArgument, "duplicate node " + name, {{"node", name}});
  int n = static_cast<int>(nodes.size());

  std::vector<std::pair<int, int>> arcs;
  for (const auto& e : edges) {
    auto a = index.find(e.from), b = index.find(e.to);
    if (a == index.end() || b == index.end())
      fail(ErrorCode::InvalidArgument, "edge endpoint is not a node", {{"from", e.from}, {"to", e.to}});
    if (a->second == b->second) fail(ErrorCode::InvalidArgument, "self-loop on " + e.from);
    arcs.emplace_back(a->second, b->second);
  }
  auto rank = longest_path_ranks(n, arcs, nodes);

  std::vector<Vertex> vs(n);
  for (int v = 0; v < n; ++v) {
    vs[v].key = nodes[v];
    vs[v].rank = rank[v];
  }
  std::vector<Route> routes;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    auto [u, v] = arcs[i];
    Route route{static_cast<int>(i), {u}};
    int prev = u;
    for (int r = rank[u] + 1; r < rank[v]; ++r) {
      Vertex d;
      d.key = nodes[u] + "\x1f" + nodes[v] + "\x1f" + std::to_string(r);
      d.dummy = true;
      d.rank = r;
      vs.push_back(d);
      int id = static_cast<int>(vs.size()) - 1;
      vs[prev].down.push_back(id);
      vs[id].up.push_back(prev);
      route.path.push_back(id);
      prev = id;
    }
    vs[prev].down.push_back(v);
    vs[v].up.push_back(prev);
    route.path.push_back(v);
    routes.push_back(std::move(route));
  }

  int R = 1 + *std::max_element(rank.begin(), rank.end());
  Layers layers(R);
  for (int v = 0; v < static_cast<int>(vs.size()); ++v) layers[vs[v].rank].push_back(v);
  for (auto& layer : layers)
    std::sort(layer.begin(), layer.end(), [&](int a, int b) { return vs[a].key < vs[b].key; });

  order_layers(vs, layers, options.sweeps);
  assign_x(vs, layers, options.x_passes);

  LayeredLayout out;
  for (const auto& layer : layers) {
    int order = 0;
    for (int v : layer) {
      if (vs[v].dummy) continue;
      out.nodes.push_back({vs[v].key, vs[v].rank, order++, vs[v].x, static_cast<double>(vs[v].rank) * out.unit});
    }
  }
  for (const auto& route : routes) {
    const auto& e = edges[route.edge];
    EdgePlacement p;
    p.from = e.from;
    p.to = e.to;
    p.directed = e.directed;
    p.reversed = false;  // layering direction always points down
    for (std::size_t k = 1; k + 1 < route.path.size(); ++k) {
      const auto& d = vs[route.path[k]];
      p.bends.push_back({d.x, static_cast<double>(d.rank) * out.unit});
    }
    out.edges.push_back(std::move(p));
  }
  return out;
}

LayeredLayout layered_layout(const graph::CausalGraph& g, const LayoutOptions& options) {
  auto topo = graph::topological_names(g);
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < topo.size(); ++i) position[topo[i]] = i;

  std::vector<LayerEdge> edges;
  std::vector<bool> flipped;
  for (const auto& e : g.edges) {
    bool flip = !e.directed && position[e.from] > position[e.to];
    edges.push_back(flip ? LayerEdge{e.to, e.from, false} : LayerEdge{e.from, e.to, e.directed});
    flipped.push_back(flip);
  }
  auto layout = layered_layout(g.nodes, edges, options);
  // Report undirected edges with the endpoints as stored in the graph.
  for (std::size_t i = 0; i < layout.edges.size(); ++i) {
    if (!flipped[i]) continue;
    auto& p = layout.edges[i];
    std::swap(p.from, p.to);
    std::reverse(p.bends.begin(), p.bends.end());
  }
  return layout;
}

long count_crossings(const LayeredLayout& layout) {
  struct Segment {
    int rank;
    double top, bottom;
  };
  std::vector<Segment> segs;
  for (const auto& e : layout.edges) {
    const auto* a = layout.find(e.from);
    const auto* b = layout.find(e.to);
    if (!a || !b) continue;
    std::vector<std::pair<int, double>> pts;
    pts.emplace_back(a->rank, a->x);
    for (const auto& p : e.bends) pts.emplace_back(static_cast<int>(std::lround(p.y / layout.unit)), p.x);
    pts.emplace_back(b->rank, b->x);
    if (pts.front().first > pts.back().first) std::reverse(pts.begin(), pts.end());
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      if (pts[k + 1].first != pts[k].first + 1) continue;  // same-rank or skipping segment
      segs.push_back({pts[k].first, pts[k].second, pts[k + 1].second});
    }
  }
  long c = 0;
  for (std::size_t i = 0; i < segs.size(); ++i)
    for (std::size_t j = i + 1; j < segs.size(); ++j) {
      if (segs[i].rank != segs[j].rank) continue;
      double dt = segs[i].top - segs[j].top, db = segs[i].bottom - segs[j].bottom;
      if ((dt < 0 && db > 0) || (dt > 0 && db < 0)) ++c;
    }
  return c;
}

void renumber_orders(LayeredLayout& layout) {
  std::sort(layout.nodes.begin(), layout.nodes.end(), [](const NodePlacement& a, const NodePlacement& b) {
    if (a.rank != b.rank) return a.rank < b.rank;
    if (a.x != b.x) return a.x < b.x;
    return a.name < b.name;
  });
  int rank = -1, order = 0;
  for (auto& n : layout.nodes) {
    if (n.rank != rank) {
      rank = n.rank;
      order = 0;
    }
    n.order = order++;
  }
}

}  // namespace mocg::layout
