#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "dataset/dataset.hpp"
#include "discovery/snapshot.hpp"
#include "json.hpp"

namespace mocg::discovery {

enum class JobState { Running, Paused, Done, Stopped, Failed };
const char* to_string(JobState s);
JobState parse_job_state(std::string_view text);
inline bool finished(JobState s) { return s == JobState::Done || s == JobState::Stopped || s == JobState::Failed; }

struct JobEvent {
  std::uint64_t seq = 0;  // 1-based position in the job's event log
  nlohmann::json data;    // always carries "type"
};

class DiscoveryJob;

struct JobHooks {
  // Called on the worker after each epoch has been published and before the
  // next pause check.
  std::function<void(DiscoveryJob&, int epoch)> on_epoch;
  // Called on the worker once the job has finished.
  std::function<void(DiscoveryJob&)> on_finish;
};

// Runs PC, then the hybrid learner, then the continuous learner epoch by
// epoch on one background thread. Control requests are honored between
// epochs; snapshots are immutable and can be read from any thread.
class DiscoveryJob {
 public:
  DiscoveryJob(std::string id, std::shared_ptr<const dataset::MixedDataset> ds, JobConfig config,
               JobHooks hooks = {});
  ~DiscoveryJob();
  DiscoveryJob(const DiscoveryJob&) = delete;
  DiscoveryJob& operator=(const DiscoveryJob&) = delete;

  const std::string& id() const { return id_; }
  const JobConfig& config() const { return config_; }

  // Blocks until the worker is parked at an epoch boundary. Throws Conflict
  // on a finished job.
  JobState pause();
  // Non-blocking variant; safe to call from on_epoch.
  void request_pause();
  JobState resume();
  // Finalizes the current state as the result and waits for the worker.
  JobState stop();

  JobState state() const;
  std::shared_ptr<const DiscoverySnapshot> snapshot() const;
  nlohmann::json status_json() const;

  void wait() const;
  bool wait_for(std::chrono::milliseconds timeout) const;

  // Events with seq > after; waits up to `timeout` when none are available
  // and the job is still active.
  std::vector<JobEvent> events_after(std::uint64_t after, std::chrono::milliseconds timeout) const;

 private:
  void run();
  void run_continuous();
  void publish(std::shared_ptr<DiscoverySnapshot> next, nlohmann::json event);
  void set_state(JobState s);
  void check_controllable(std::unique_lock<std::mutex>& lock) const;

  std::string id_;
  std::shared_ptr<const dataset::MixedDataset> ds_;
  JobConfig config_;
  JobHooks hooks_;

  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  JobState state_ = JobState::Running;
  bool pause_requested_ = false;
  bool parked_ = false;
  bool stop_requested_ = false;
  std::shared_ptr<const DiscoverySnapshot> snapshot_;
  std::vector<JobEvent> events_;
  std::thread worker_;
};

}  // namespace mocg::discovery
