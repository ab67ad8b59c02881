#include "eval/metrics.hpp"

#include <algorithm>
#include <map>

#include "common/error.hpp"

namespace mocg::eval {

using discovery::Edge;
using discovery::EdgeSet;
using discovery::Pdag;
using discovery::unordered;

namespace {

// Re-indexes `g` onto the node order of `reference`; node sets must match.
Pdag align(const Pdag& g, const std::vector<std::string>& reference) {
  auto a = g.nodes, b = reference;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) fail(ErrorCode::InvalidArgument, "prediction and truth have different node sets");
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < reference.size(); ++i) index[reference[i]] = i;
  Pdag out{reference, {}, {}};
  for (const auto& [u, v] : g.directed) out.directed.insert({index[g.nodes[u]], index[g.nodes[v]]});
  for (const auto& [u, v] : g.undirected) out.undirected.insert(unordered(index[g.nodes[u]], index[g.nodes[v]]));
  return out;
}

EdgeSet skeleton(const Pdag& g) {
  EdgeSet s = g.undirected;
  for (const auto& [u, v] : g.directed) s.insert(unordered(u, v));
  return s;
}

}  // namespace

MetricRow score_prediction(const Pdag& pred_in, const Pdag& truth) {
  const Pdag pred = align(pred_in, truth.nodes);
  const auto ts = skeleton(truth), ps = skeleton(pred);
  const std::size_t d = truth.nodes.size();
  const std::size_t pairs = d * (d - 1) / 2;

  std::size_t hit = 0, extra = 0;
  for (const auto& e : ps) (ts.count(e) ? hit : extra) += 1;
  MetricRow row;
  row.accuracy = ts.empty() ? 1.0 : static_cast<double>(hit) / static_cast<double>(ts.size());
  const std::size_t non_edges = pairs - ts.size();
  row.fpr = non_edges == 0 ? 0.0 : static_cast<double>(extra) / static_cast<double>(non_edges);

  std::size_t hamming = extra;
  for (const auto& e : ts) {
    if (!ps.count(e)) {
      ++hamming;
      continue;
    }
    const bool truth_fwd = truth.has_directed(e.first, e.second);
    const bool truth_bwd = truth.has_directed(e.second, e.first);
    if (pred.has_undirected(e.first, e.second)) continue;
    const bool pred_fwd = pred.has_directed(e.first, e.second);
    if ((truth_fwd && !pred_fwd) || (truth_bwd && pred_fwd)) ++hamming;
    // An undirected truth edge matched by a directed prediction is not counted.
  }
  row.hamming = hamming;
  return row;
}

Pdag union_graph(const std::vector<NamedPrediction>& preds, const std::vector<std::string>& nodes) {
  // Per pair: orientation votes; -1 marks an undirected or conflicting record.
  std::map<Edge, int> state;
  for (const auto& p : preds) {
    const Pdag g = align(p.graph, nodes);
    auto vote = [&](Edge pair, int orient) {
      auto [it, inserted] = state.emplace(pair, orient);
      if (!inserted && it->second != orient) it->second = -1;
    };
    for (const auto& [u, v] : g.directed) vote(unordered(u, v), u < v ? 0 : 1);
    for (const auto& e : g.undirected) vote(e, -1);
  }
  Pdag out{nodes, {}, {}};
  for (const auto& [pair, orient] : state) {
    if (orient == 0)
      out.directed.insert(pair);
    else if (orient == 1)
      out.directed.insert({pair.second, pair.first});
    else
      out.undirected.insert(pair);
  }
  return out;
}

MetricReport eval_metrics(const std::vector<NamedPrediction>& preds, const Pdag& truth) {
  MetricReport report;
  for (const auto& p : preds) {
    auto row = score_prediction(p.graph, truth);
    row.algorithm = p.algorithm;
    report.rows.push_back(std::move(row));
  }
  report.union_row = score_prediction(union_graph(preds, truth.nodes), truth);
  report.union_row.algorithm = "union";
  return report;
}

nlohmann::json to_json(const MetricRow& row) {
  return {{"algorithm", row.algorithm}, {"accuracy", row.accuracy}, {"fpr", row.fpr}, {"hamming", row.hamming}};
}

nlohmann::json to_json(const MetricReport& report) {
  auto rows = nlohmann::json::array();
  for (const auto& r : report.rows) rows.push_back(to_json(r));
  return {{"rows", std::move(rows)}, {"union", to_json(report.union_row)}};
}

}  // namespace mocg::eval
