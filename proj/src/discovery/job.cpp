#include "discovery/job.hpp"

#include "common/error.hpp"
#include "discovery/pc.hpp"

namespace mocg::discovery {

const char* to_string(JobState s) {
  switch (s) {
    case JobState::Running: return "Running";
    case JobState::Paused: return "Paused";
    case JobState::Done: return "Done";
    case JobState::Stopped: return "Stopped";
    case JobState::Failed: return "Failed";
  }
  return "Failed";
}

JobState parse_job_state(std::string_view text) {
  for (auto s : {JobState::Running, JobState::Paused, JobState::Done, JobState::Stopped, JobState::Failed})
    if (text == to_string(s)) return s;
  fail(ErrorCode::InvalidArgument, "unknown job state '" + std::string(text) + "'");
}

DiscoveryJob::DiscoveryJob(std::string id, std::shared_ptr<const dataset::MixedDataset> ds, JobConfig config,
                           JobHooks hooks)
    : id_(std::move(id)), ds_(std::move(ds)), config_(std::move(config)), hooks_(std::move(hooks)) {
  if (!ds_) fail(ErrorCode::InvalidArgument, "job needs a dataset");
  config_.validate();
  ds_->indices_of(config_.variables);  // unknown names fail here, not on the worker
  auto initial = std::make_shared<DiscoverySnapshot>();
  initial->variables = config_.variables;
  auto skipped = [](bool run) { return AlgoState{run ? AlgoStatus::Pending : AlgoStatus::Stopped, {}}; };
  initial->pc_status = skipped(config_.run_pc);
  initial->continuous_status = skipped(config_.run_continuous);
  initial->hybrid_status = skipped(config_.run_hybrid);
  snapshot_ = initial;
  events_.push_back({1, {{"type", "status"}, {"state", "Running"}}});
  worker_ = std::thread([this] { run(); });
}

DiscoveryJob::~DiscoveryJob() {
  {
    std::lock_guard lock(mu_);
    stop_requested_ = true;
  }
  cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

void DiscoveryJob::check_controllable(std::unique_lock<std::mutex>&) const {
  if (finished(state_))
    fail(ErrorCode::Conflict, std::string("job is ") + to_string(state_), {{"state", to_string(state_)}});
}

JobState DiscoveryJob::pause() {
  std::unique_lock lock(mu_);
  check_controllable(lock);
  pause_requested_ = true;
  cv_.notify_all();
  cv_.wait(lock, [&] { return parked_ || finished(state_); });
  return state_;
}

void DiscoveryJob::request_pause() {
  std::lock_guard lock(mu_);
  if (!finished(state_)) pause_requested_ = true;
  cv_.notify_all();
}

JobState DiscoveryJob::resume() {
  std::unique_lock lock(mu_);
  check_controllable(lock);
  pause_requested_ = false;
  cv_.notify_all();
  cv_.wait(lock, [&] { return !parked_ || finished(state_); });
  return state_;
}

JobState DiscoveryJob::stop() {
  std::unique_lock lock(mu_);
  check_controllable(lock);
  stop_requested_ = true;
  cv_.notify_all();
  cv_.wait(lock, [&] { return finished(state_); });
  return state_;
}

JobState DiscoveryJob::state() const {
  std::lock_guard lock(mu_);
  return state_;
}

std::shared_ptr<const DiscoverySnapshot> DiscoveryJob::snapshot() const {
  std::lock_guard lock(mu_);
  return snapshot_;
}

nlohmann::json DiscoveryJob::status_json() const {
  std::lock_guard lock(mu_);
  auto doc = to_json(*snapshot_);
  doc["id"] = id_;
  doc["state"] = to_string(state_);
  return doc;
}

void DiscoveryJob::wait() const {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return finished(state_); });
}

bool DiscoveryJob::wait_for(std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  return cv_.wait_for(lock, timeout, [&] { return finished(state_); });
}

std::vector<JobEvent> DiscoveryJob::events_after(std::uint64_t after, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return events_.size() > after || finished(state_); });
  if (after >= events_.size()) return {};
  return {events_.begin() + static_cast<std::ptrdiff_t>(after), events_.end()};
}

void DiscoveryJob::publish(std::shared_ptr<DiscoverySnapshot> next, nlohmann::json event) {
  {
    std::lock_guard lock(mu_);
    snapshot_ = std::move(next);
    events_.push_back({events_.size() + 1, std::move(event)});
  }
  cv_.notify_all();
}

void DiscoveryJob::set_state(JobState s) {
  {
    std::lock_guard lock(mu_);
    state_ = s;
    events_.push_back({events_.size() + 1, {{"type", "status"}, {"state", to_string(s)}}});
  }
  cv_.notify_all();
}

void DiscoveryJob::run() {
  auto next = [this] { return std::make_shared<DiscoverySnapshot>(*snapshot()); };
  auto stopping = [this] {
    std::lock_guard lock(mu_);
    return stop_requested_;
  };
  const auto& vars = config_.variables;

  if (config_.run_pc && !stopping()) {
    auto s = next();
    try {
      s->pc = run_pc(*ds_, vars, config_.ci_alpha);
      s->pc_status = {AlgoStatus::Done, {}};
    } catch (const std::exception& e) {
      s->pc_status = {AlgoStatus::Failed, e.what()};
    }
    nlohmann::json ev{{"type", "pc"}, {"status", to_string(s->pc_status.status)}};
    if (s->pc) {
      ev["directed"] = edges_to_json(vars, s->pc->directed);
      ev["undirected"] = edges_to_json(vars, s->pc->undirected);
    }
    publish(s, std::move(ev));
  }

  if (config_.run_hybrid && !stopping()) {
    auto s = next();
    try {
      const auto r = run_hybrid(*ds_, vars, {config_.ci_alpha, config_.hybrid_lambda});
      s->hybrid = r.edges;
      s->hybrid_status = {AlgoStatus::Done, {}};
      s->diagnostics.insert(s->diagnostics.end(), r.diagnostics.begin(), r.diagnostics.end());
    } catch (const std::exception& e) {
      s->hybrid_status = {AlgoStatus::Failed, e.what()};
    }
    nlohmann::json ev{{"type", "hybrid"}, {"status", to_string(s->hybrid_status.status)}};
    if (s->hybrid) ev["edges"] = edges_to_json(vars, *s->hybrid);
    publish(s, std::move(ev));
  }

  if (config_.run_continuous) run_continuous();

  // Anything that never started was cut short by a stop request.
  auto s = next();
  for (auto* st : {&s->pc_status, &s->hybrid_status, &s->continuous_status})
    if (st->status == AlgoStatus::Pending || st->status == AlgoStatus::Running || st->status == AlgoStatus::Paused)
      st->status = AlgoStatus::Stopped;
  publish(s, {{"type", "final"}});

  JobState final_state = JobState::Done;
  for (const auto* st : {&s->pc_status, &s->hybrid_status, &s->continuous_status}) {
    if (st->status == AlgoStatus::Failed) final_state = JobState::Failed;
  }
  if (final_state == JobState::Done && stopping()) final_state = JobState::Stopped;
  set_state(final_state);
  if (hooks_.on_finish) hooks_.on_finish(*this);
}

void DiscoveryJob::run_continuous() {
  std::unique_ptr<ContinuousLearner> learner;
  auto fail_with = [this](const std::string& msg) {
    auto s = std::make_shared<DiscoverySnapshot>(*snapshot());
    s->continuous_status = {AlgoStatus::Failed, msg};
    publish(s, {{"type", "continuous"}, {"status", "Failed"}, {"message", msg}});
  };
  try {
    learner = std::make_unique<ContinuousLearner>(*ds_, config_.variables, config_.continuous, config_.rng_seed);
  } catch (const std::exception& e) {
    fail_with(e.what());
    return;
  }

  for (int epoch = 1; epoch <= config_.continuous.max_epochs; ++epoch) {
    {
      std::unique_lock lock(mu_);
      if (pause_requested_ && !stop_requested_) {
        parked_ = true;
        state_ = JobState::Paused;
        auto paused = std::make_shared<DiscoverySnapshot>(*snapshot_);
        paused->continuous_status = {AlgoStatus::Paused, {}};
        snapshot_ = paused;
        events_.push_back({events_.size() + 1, {{"type", "status"}, {"state", "Paused"}, {"epoch", epoch - 1}}});
        cv_.notify_all();
        cv_.wait(lock, [&] { return !pause_requested_ || stop_requested_; });
        parked_ = false;
        if (!stop_requested_) {
          state_ = JobState::Running;
          auto running = std::make_shared<DiscoverySnapshot>(*snapshot_);
          running->continuous_status = {AlgoStatus::Running, {}};
          snapshot_ = running;
          events_.push_back({events_.size() + 1, {{"type", "status"}, {"state", "Running"}, {"epoch", epoch - 1}}});
        }
        cv_.notify_all();
      }
      if (stop_requested_) {
        auto s = std::make_shared<DiscoverySnapshot>(*snapshot_);
        s->continuous_status = {AlgoStatus::Stopped, {}};
        snapshot_ = s;
        return;
      }
    }

    LossRecord rec;
    try {
      rec = learner->step();
    } catch (const std::exception& e) {
      fail_with(e.what());
      return;
    }

    auto s = std::make_shared<DiscoverySnapshot>(*snapshot());
    ContinuousState cs;
    cs.weights = learner->weight_matrix();
    cs.edges = learner->edges();
    cs.losses = learner->trace();
    cs.epoch = learner->epoch();
    cs.h = learner->h();
    cs.rho = learner->rho();
    s->continuous_status = {epoch == config_.continuous.max_epochs ? AlgoStatus::Done : AlgoStatus::Running, {}};
    nlohmann::json ev{{"type", "epoch"},
                      {"epoch", cs.epoch},
                      {"loss", loss_json(rec)},
                      {"edges", edges_to_json(config_.variables, cs.edges)},
                      {"h", cs.h}};
    auto full = to_json(cs, config_.variables);
    ev["matrix"] = full["matrix"];
    s->continuous = std::move(cs);
    publish(s, std::move(ev));
    if (hooks_.on_epoch) hooks_.on_epoch(*this, epoch);
  }
}

}  // namespace mocg::discovery
