#pragma once

#include <map>
#include <string>
#include <vector>

#include "graph/causal_graph.hpp"
#include "layout/compress.hpp"
#include "layout/layered.hpp"

namespace mocg::layout {

// Sum over node pairs of d^-2 (|x_i - x_j| - unit * d)^2 with d the
// undirected hop distance; disconnected pairs contribute nothing.
double stress_x(const std::map<std::string, double>& x, const std::vector<graph::NamePair>& edges, double unit = 1.0);

// Stress of a layout over its own edges.
double stress_x(const LayeredLayout& layout);

struct StressRow {
  std::string graph_id;
  double extracted = 0;
  double compressed = 0;
};

using StressReport = std::vector<StressRow>;

StressReport stress_report(const SuperLayout& s, const CompressedLayout& c);

}  // namespace mocg::layout
