#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "common/error.hpp"
#include "dataset/dataset.hpp"
#include "discovery/job.hpp"
#include "graph/causal_graph.hpp"
#include "json.hpp"
#include "service/edits.hpp"
#include "service/store.hpp"

namespace mocg::service {

struct ServiceConfig {
  std::filesystem::path data_dir = "mocg-data";
  double ci_alpha = 0.05;
  double threshold = 0.3;
  int max_epochs = 300;
  // Job snapshots are persisted every this many epochs while training.
  int checkpoint_epochs = 10;
};

// Application logic behind the HTTP routes. Every method returns the JSON
// body of a successful response and throws mocg::Error otherwise. Mutations
// are on disk before they return.
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  const ServiceConfig& config() const { return config_; }

  nlohmann::json add_dataset(const std::string& csv);
  nlohmann::json dataset_variables(const std::string& id);
  nlohmann::json correlations(const std::string& id, const std::string& outcome, std::size_t top);
  nlohmann::json matrix(const std::string& id, const std::vector<std::string>& vars);

  nlohmann::json create_job(const nlohmann::json& body);
  nlohmann::json job_snapshot(const std::string& id);
  // action is pause, resume or stop.
  nlohmann::json job_control(const std::string& id, const std::string& action);
  // Events after `after`, each carrying its seq. `done` is set once the job
  // has finished and every event has been returned.
  std::vector<nlohmann::json> job_events(const std::string& id, std::uint64_t after,
                                         std::chrono::milliseconds timeout, bool* done);

  // {job, algorithm = "pc" | "continuous" | "hybrid"}; the other algorithms'
  // edges become overlays.
  nlohmann::json create_graph(const nlohmann::json& body);
  nlohmann::json get_graph(const std::string& id);
  nlohmann::json apply_edit(const std::string& id, const nlohmann::json& op);
  nlohmann::json save_graph(const std::string& id);
  nlohmann::json history();
  // {graph_ids: [...]} naming history entries or live graphs.
  nlohmann::json compare(const nlohmann::json& body);

  // Stops and joins all running jobs.
  void shutdown();

 private:
  std::shared_ptr<const dataset::MixedDataset> load_dataset(const std::string& id);
  std::shared_ptr<discovery::DiscoveryJob> live_job(const std::string& id);
  void persist_job(const discovery::DiscoveryJob& job);
  std::shared_ptr<std::mutex> graph_guard(const std::string& id);
  graph::CausalGraph read_graph(const std::string& id);
  // Fills missing effect estimates; returns whether anything changed.
  bool refresh_effects(graph::CausalGraph& g);
  graph::CausalGraph comparison_graph(const std::string& id);

  ServiceConfig config_;
  Store store_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const dataset::MixedDataset>> datasets_;
  std::map<std::string, std::shared_ptr<discovery::DiscoveryJob>> jobs_;
  std::map<std::string, std::shared_ptr<std::mutex>> graph_guards_;
  std::mutex job_files_mu_;
};

// HTTP status for an error code.
int http_status(ErrorCode code);
nlohmann::json error_body(const Error& e);

}  // namespace mocg::service
