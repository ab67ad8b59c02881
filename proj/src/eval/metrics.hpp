#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "discovery/pdag.hpp"
#include "json.hpp"

namespace mocg::eval {

struct MetricRow {
  std::string algorithm;
  double accuracy = 0;  // recall of the true skeleton; 1 when the truth has no edges
  double fpr = 0;       // extra skeleton edges over true non-edges; 0 when there are none
  std::size_t hamming = 0;
};

struct MetricReport {
  std::vector<MetricRow> rows;
  MetricRow union_row;
};

struct NamedPrediction {
  std::string algorithm;
  discovery::Pdag graph;
};

// Hamming counts 1 per missing, extra or misoriented edge. An undirected
// predicted edge over a true directed edge counts 0.
MetricRow score_prediction(const discovery::Pdag& pred, const discovery::Pdag& truth);

// Per-algorithm rows plus a union row: a pair is in the union when any
// prediction has it, and directed there only when every prediction holding it
// has the same directed orientation.
MetricReport eval_metrics(const std::vector<NamedPrediction>& preds, const discovery::Pdag& truth);

discovery::Pdag union_graph(const std::vector<NamedPrediction>& preds, const std::vector<std::string>& nodes);

nlohmann::json to_json(const MetricRow& row);
nlohmann::json to_json(const MetricReport& report);

}  // namespace mocg::eval
