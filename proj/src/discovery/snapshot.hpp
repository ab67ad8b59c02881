#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "discovery/continuous.hpp"
#include "discovery/hybrid.hpp"
#include "discovery/pdag.hpp"
#include "json.hpp"

namespace mocg::discovery {

enum class AlgoStatus { Pending, Running, Paused, Done, Stopped, Failed };
const char* to_string(AlgoStatus s);
AlgoStatus parse_algo_status(std::string_view text);

struct AlgoState {
  AlgoStatus status = AlgoStatus::Pending;
  std::string message;  // set for Failed
};

struct JobConfig {
  std::string dataset_id;
  std::vector<std::string> variables;  // includes the outcome
  std::string outcome;
  double ci_alpha = 0.05;
  ContinuousConfig continuous;
  double hybrid_lambda = 0.0;  // non-positive selects ln(n)/2
  std::uint64_t rng_seed = 0;
  bool run_pc = true;
  bool run_continuous = true;
  bool run_hybrid = true;

  void validate() const;
};

nlohmann::json to_json(const JobConfig& c);
// Missing fields keep their defaults; the result is validated.
JobConfig job_config_from_json(const nlohmann::json& doc);

struct ContinuousState {
  WeightMatrix weights;
  EdgeSet edges;  // thresholding of weights.A at the configured tau
  LossTrace losses;
  int epoch = 0;
  double h = 0;
  double rho = 0;
};

struct DiscoverySnapshot {
  std::vector<std::string> variables;
  std::optional<Pdag> pc;
  std::optional<ContinuousState> continuous;
  std::optional<EdgeSet> hybrid;
  AlgoState pc_status, continuous_status, hybrid_status;
  std::vector<std::string> diagnostics;
};

nlohmann::json to_json(const ContinuousState& s, const std::vector<std::string>& names);
nlohmann::json loss_json(const LossRecord& r);
nlohmann::json to_json(const DiscoverySnapshot& s);
DiscoverySnapshot snapshot_from_json(const nlohmann::json& doc);

}  // namespace mocg::discovery
