#include "layout/stress.hpp"

#include <cmath>
#include <deque>

#include "common/error.hpp"

namespace mocg::layout {

double stress_x(const std::map<std::string, double>& x, const std::vector<graph::NamePair>& edges, double unit) {
  std::vector<std::string> names;
  std::map<std::string, int> index;
  for (const auto& [name, _] : x) {
    index[name] = static_cast<int>(names.size());
    names.push_back(name);
  }
  int n = static_cast<int>(names.size());
  std::vector<std::vector<int>> adj(n);
  for (const auto& [a, b] : edges) {
    auto ia = index.find(a), ib = index.find(b);
    if (ia == index.end() || ib == index.end())
      fail(ErrorCode::InvalidArgument, "edge endpoint has no coordinate", {{"from", a}, {"to", b}});
    adj[ia->second].push_back(ib->second);
    adj[ib->second].push_back(ia->second);
  }
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = x.at(names[i]);

  double total = 0;
  std::vector<int> dist(n);
  for (int s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    std::deque<int> queue{s};
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int v : adj[u])
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
    }
    for (int t = s + 1; t < n; ++t) {
      if (dist[t] <= 0) continue;
      double d = dist[t];
      double r = std::abs(xs[s] - xs[t]) - unit * d;
      total += r * r / (d * d);
    }
  }
  return total;
}

double stress_x(const LayeredLayout& layout) {
  std::map<std::string, double> x;
  for (const auto& p : layout.nodes) x[p.name] = p.x;
  std::vector<graph::NamePair> edges;
  for (const auto& e : layout.edges) edges.emplace_back(e.from, e.to);
  return stress_x(x, edges, layout.unit);
}

StressReport stress_report(const SuperLayout& s, const CompressedLayout& c) {
  StressReport report;
  for (const auto& id : s.graph_ids) {
    const auto* sub = c.find(id);
    if (!sub) fail(ErrorCode::Internal, "compressed layout lacks graph " + id);
    report.push_back({id, stress_x(extract_subgraph(s, id)), stress_x(sub->layout)});
  }
  return report;
}

}  // namespace mocg::layout
