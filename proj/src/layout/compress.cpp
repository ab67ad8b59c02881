#include "layout/compress.hpp"

#include <algorithm>
#include <cmath>

namespace mocg::layout {

const CompressedSubgraph* CompressedLayout::find(const std::string& graph_id) const {
  for (const auto& sub : subgraphs)
    if (sub.graph_id == graph_id) return &sub;
  return nullptr;
}

namespace {

constexpr double kSame = 1e-9;

std::vector<double> distinct_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x - out.back() > kSame) out.push_back(x);
  return out;
}

// Index of the value within kSame in a sorted list, or -1.
int locate(const std::vector<double>& sorted, double x) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), x - kSame);
  if (it != sorted.end() && std::abs(*it - x) <= kSame) return static_cast<int>(it - sorted.begin());
  return -1;
}

// Piecewise-linear through the sampled (x, x') pairs, slope 1 outside; used
// for edge bends, which are not nodes.
double interpolate(const std::vector<std::pair<double, double>>& samples, double x) {
  if (samples.empty()) return x;
  if (x <= samples.front().first) return samples.front().second + (x - samples.front().first);
  if (x >= samples.back().first) return samples.back().second + (x - samples.back().first);
  auto hi = std::upper_bound(samples.begin(), samples.end(), x,
                             [](double v, const std::pair<double, double>& s) { return v < s.first; });
  auto lo = hi - 1;
  double t = (x - lo->first) / (hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

}  // namespace

CompressedLayout compress(const SuperLayout& s) {
  CompressedLayout out;
  std::vector<double> anchor_x;
  for (const auto& n : s.nodes) {
    if (!n.shared()) continue;
    out.anchored.push_back(n.name);
    if (const auto* p = s.layout.find(n.name)) anchor_x.push_back(p->x);
  }
  out.anchor_source = distinct_sorted(anchor_x);
  for (std::size_t i = 0; i < out.anchor_source.size(); ++i)
    out.anchor_target.push_back(out.anchor_source.front() + static_cast<double>(i));
  out.fallback = out.anchor_source.empty();
  const auto& L = out.anchor_source;
  const auto& Lxi = out.anchor_target;

  for (const auto& id : s.graph_ids) {
    CompressedSubgraph sub;
    sub.graph_id = id;
    sub.layout = extract_subgraph(s, id);

    std::vector<double> unique_x, all_x;
    for (const auto& p : sub.layout.nodes) {
      all_x.push_back(p.x);
      if (!s.find(p.name)->shared()) unique_x.push_back(p.x);
    }

    std::vector<std::pair<double, double>> mapping;  // distinct x -> x'
    if (out.fallback) {
      auto xs = distinct_sorted(all_x);
      for (std::size_t i = 0; i < xs.size(); ++i) mapping.emplace_back(xs[i], static_cast<double>(i));
    } else {
      for (std::size_t i = 0; i < L.size(); ++i) mapping.emplace_back(L[i], Lxi[i]);
      auto xs = distinct_sorted(unique_x);
      std::vector<double> left, right;
      std::vector<std::vector<double>> gaps(L.size());
      for (double x : xs) {
        if (locate(L, x) >= 0) continue;  // lines up with an anchor column
        if (x < L.front()) {
          left.push_back(x);
        } else if (x > L.back()) {
          right.push_back(x);
        } else {
          auto k = std::upper_bound(L.begin(), L.end(), x) - L.begin() - 1;
          gaps[k].push_back(x);
        }
      }
      for (std::size_t k = 0; k < left.size(); ++k)
        mapping.emplace_back(left[left.size() - 1 - k], Lxi.front() - static_cast<double>(k + 1));
      for (std::size_t k = 0; k < right.size(); ++k)
        mapping.emplace_back(right[k], Lxi.back() + static_cast<double>(k + 1));
      for (std::size_t k = 0; k < gaps.size(); ++k) {
        double step = 1.0 / static_cast<double>(gaps[k].size() + 1);
        for (std::size_t m = 0; m < gaps[k].size(); ++m)
          mapping.emplace_back(gaps[k][m], Lxi[k] + static_cast<double>(m + 1) * step);
      }
      std::sort(mapping.begin(), mapping.end());
    }

    std::vector<double> keys;
    for (const auto& m : mapping) keys.push_back(m.first);
    for (auto& p : sub.layout.nodes) {
      double xi = mapping[locate(keys, p.x)].second;
      sub.delta[p.name] = xi - p.x;
      p.x = xi;
    }
    for (auto& e : sub.layout.edges)
      for (auto& b : e.bends) b.x = interpolate(mapping, b.x);
    renumber_orders(sub.layout);
    out.subgraphs.push_back(std::move(sub));
  }
  return out;
}

}  // namespace mocg::layout
