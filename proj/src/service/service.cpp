#include "service/service.hpp"

#include <ctime>

#include "comparison/comparison.hpp"
#include "effects/effects.hpp"
#include "graph/from_snapshot.hpp"

namespace mocg::service {

using nlohmann::json;
using discovery::DiscoveryJob;
using discovery::JobState;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return 400;
    case ErrorCode::NotFound: return 404;
    case ErrorCode::Conflict: return 409;
    case ErrorCode::Cycle:
    case ErrorCode::Numeric: return 422;
    case ErrorCode::Io:
    case ErrorCode::Internal: return 500;
  }
  return 500;
}

json error_body(const Error& e) {
  return {{"code", to_string(e.code())}, {"message", e.what()}, {"detail", e.detail()}};
}

namespace {

std::string utc_now() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool needs_effects(const graph::CausalGraph& g) {
  for (const auto& e : g.edges)
    if (e.directed && !e.effect && e.effect_error.empty()) return true;
  return false;
}

discovery::AlgoStatus settle(discovery::AlgoStatus s) {
  using discovery::AlgoStatus;
  return (s == AlgoStatus::Pending || s == AlgoStatus::Running || s == AlgoStatus::Paused) ? AlgoStatus::Stopped : s;
}

}  // namespace

Service::Service(ServiceConfig config) : config_(std::move(config)), store_(config_.data_dir) {
  // Jobs cut off by a previous shutdown or crash cannot resume their worker.
  for (auto doc : store_.list(Kind::Job)) {
    auto state = discovery::parse_job_state(doc.at("state").get<std::string>());
    if (discovery::finished(state)) continue;
    auto snap = discovery::snapshot_from_json(doc.at("snapshot"));
    for (auto* st : {&snap.pc_status, &snap.hybrid_status, &snap.continuous_status}) st->status = settle(st->status);
    doc["state"] = to_string(JobState::Stopped);
    doc["snapshot"] = discovery::to_json(snap);
    store_.put(Kind::Job, doc.at("id").get<std::string>(), doc);
  }
}

Service::~Service() { shutdown(); }

void Service::shutdown() {
  std::map<std::string, std::shared_ptr<DiscoveryJob>> jobs;
  {
    std::lock_guard lock(mu_);
    jobs.swap(jobs_);
  }
  for (auto& [_, job] : jobs) {
    try {
      if (!discovery::finished(job->state())) job->stop();
    } catch (const Error&) {
      // finished concurrently
    }
  }
  jobs.clear();  // joins the workers
}

std::shared_ptr<const dataset::MixedDataset> Service::load_dataset(const std::string& id) {
  {
    std::lock_guard lock(mu_);
    if (auto it = datasets_.find(id); it != datasets_.end()) return it->second;
  }
  auto csv = store_.dataset_csv(id);
  if (!csv) fail(ErrorCode::NotFound, "unknown dataset '" + id + "'", {{"id", id}});
  auto ds = std::make_shared<const dataset::MixedDataset>(dataset::load_csv(*csv));
  std::lock_guard lock(mu_);
  return datasets_.emplace(id, ds).first->second;
}

json Service::add_dataset(const std::string& csv) {
  auto ds = std::make_shared<const dataset::MixedDataset>(dataset::load_csv(csv));
  auto id = store_.put_dataset(csv);
  {
    std::lock_guard lock(mu_);
    datasets_.emplace(id, ds);
  }
  return {{"id", id},
          {"rows", ds->row_count()},
          {"columns", ds->column_count()},
          {"dropped_rows", ds->dropped_rows()},
          {"variables", dataset::variables_json(*ds)}};
}

json Service::dataset_variables(const std::string& id) {
  auto ds = load_dataset(id);
  return {{"id", id}, {"rows", ds->row_count()}, {"variables", dataset::variables_json(*ds)}};
}

json Service::correlations(const std::string& id, const std::string& outcome, std::size_t top) {
  if (outcome.empty()) fail(ErrorCode::InvalidArgument, "outcome is required");
  auto ds = load_dataset(id);
  auto report = dataset::pearson_correlations(*ds, outcome);
  auto doc = dataset::to_json(report);
  doc["top"] = dataset::top_n(report, top == 0 ? report.entries.size() : top);
  return doc;
}

json Service::matrix(const std::string& id, const std::vector<std::string>& vars) {
  auto ds = load_dataset(id);
  std::vector<std::string> names = vars;
  if (names.empty())
    for (const auto& v : ds->variables()) names.push_back(v.name);
  return dataset::to_json(dataset::pairwise_summaries(*ds, names));
}

void Service::persist_job(const DiscoveryJob& job) {
  // Read and write under one lock so an older snapshot never lands last.
  std::lock_guard lock(job_files_mu_);
  auto status = job.status_json();
  json doc{{"id", job.id()}, {"config", discovery::to_json(job.config())}, {"state", status["state"]}};
  status.erase("id");
  status.erase("state");
  doc["snapshot"] = status;
  store_.put(Kind::Job, job.id(), doc);
}

json Service::create_job(const json& body) {
  if (!body.is_object()) fail(ErrorCode::InvalidArgument, "job config must be an object");
  json doc = body;
  if (!doc.contains("ci_alpha")) doc["ci_alpha"] = config_.ci_alpha;
  if (!doc.contains("continuous") || !doc["continuous"].is_object()) doc["continuous"] = json::object();
  if (!doc["continuous"].contains("threshold")) doc["continuous"]["threshold"] = config_.threshold;
  if (!doc["continuous"].contains("max_epochs")) doc["continuous"]["max_epochs"] = config_.max_epochs;
  auto cfg = discovery::job_config_from_json(doc);
  auto ds = load_dataset(cfg.dataset_id);

  auto id = store_.next_id(Kind::Job);
  discovery::JobHooks hooks;
  int every = std::max(1, config_.checkpoint_epochs);
  hooks.on_epoch = [this, every](DiscoveryJob& job, int epoch) {
    if (epoch % every == 0) persist_job(job);
  };
  hooks.on_finish = [this](DiscoveryJob& job) { persist_job(job); };
  auto job = std::make_shared<DiscoveryJob>(id, ds, cfg, hooks);
  {
    std::lock_guard lock(mu_);
    jobs_[id] = job;
  }
  persist_job(*job);
  auto out = job->status_json();
  out["config"] = discovery::to_json(cfg);
  return out;
}

std::shared_ptr<DiscoveryJob> Service::live_job(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = jobs_.find(id);
  return it == jobs_.end() ? nullptr : it->second;
}

json Service::job_snapshot(const std::string& id) {
  if (auto job = live_job(id)) return job->status_json();
  auto doc = store_.get(Kind::Job, id);
  if (!doc) fail(ErrorCode::NotFound, "unknown job '" + id + "'", {{"id", id}});
  auto out = doc->at("snapshot");
  out["id"] = id;
  out["state"] = doc->at("state");
  return out;
}

json Service::job_control(const std::string& id, const std::string& action) {
  auto job = live_job(id);
  if (!job) {
    auto doc = store_.get(Kind::Job, id);
    if (!doc) fail(ErrorCode::NotFound, "unknown job '" + id + "'", {{"id", id}});
    fail(ErrorCode::Conflict, "job is " + doc->at("state").get<std::string>(), {{"state", doc->at("state")}});
  }
  if (action == "pause") {
    job->pause();
  } else if (action == "resume") {
    job->resume();
  } else if (action == "stop") {
    job->stop();
  } else {
    fail(ErrorCode::InvalidArgument, "unknown action '" + action + "'", {{"action", action}});
  }
  persist_job(*job);
  return job->status_json();
}

std::vector<json> Service::job_events(const std::string& id, std::uint64_t after, std::chrono::milliseconds timeout,
                                      bool* done) {
  std::vector<json> out;
  auto job = live_job(id);
  if (!job) {
    auto doc = store_.get(Kind::Job, id);
    if (!doc) fail(ErrorCode::NotFound, "unknown job '" + id + "'", {{"id", id}});
    // Finished before this process started: only the final state survives.
    if (after == 0) out.push_back({{"seq", 1}, {"type", "final"}, {"state", doc->at("state")}, {"snapshot", doc->at("snapshot")}});
    if (done) *done = true;
    return out;
  }
  auto collect = [&](const std::vector<discovery::JobEvent>& evs) {
    for (const auto& e : evs) {
      auto d = e.data;
      d["seq"] = e.seq;
      out.push_back(std::move(d));
    }
  };
  collect(job->events_after(after, timeout));
  bool finished = discovery::finished(job->state());
  if (finished) collect(job->events_after(after + out.size(), std::chrono::milliseconds(0)));
  if (done) *done = finished;
  return out;
}

std::shared_ptr<std::mutex> Service::graph_guard(const std::string& id) {
  std::lock_guard lock(mu_);
  auto& g = graph_guards_[id];
  if (!g) g = std::make_shared<std::mutex>();
  return g;
}

graph::CausalGraph Service::read_graph(const std::string& id) {
  auto doc = store_.get(Kind::Graph, id);
  if (!doc) fail(ErrorCode::NotFound, "unknown graph '" + id + "'", {{"id", id}});
  return graph::graph_from_json(*doc);
}

bool Service::refresh_effects(graph::CausalGraph& g) {
  if (!needs_effects(g)) return false;
  std::shared_ptr<const dataset::MixedDataset> ds;
  try {
    ds = load_dataset(g.dataset_id);
  } catch (const Error& e) {
    for (auto& edge : g.edges)
      if (edge.directed && !edge.effect) edge.effect_error = e.what();
    return true;
  }
  effects::estimate_all(*ds, g);
  return true;
}

json Service::create_graph(const json& body) {
  if (!body.is_object() || !body.contains("job") || !body["job"].is_string())
    fail(ErrorCode::InvalidArgument, "graph request needs a job id");
  std::string algorithm = body.value("algorithm", std::string("pc"));
  graph::algorithm_source(algorithm);
  auto job_id = body["job"].get<std::string>();

  discovery::DiscoverySnapshot snap;
  discovery::JobConfig cfg;
  if (auto job = live_job(job_id)) {
    snap = *job->snapshot();
    cfg = job->config();
  } else {
    auto doc = store_.get(Kind::Job, job_id);
    if (!doc) fail(ErrorCode::NotFound, "unknown job '" + job_id + "'", {{"id", job_id}});
    snap = discovery::snapshot_from_json(doc->at("snapshot"));
    cfg = discovery::job_config_from_json(doc->at("config"));
  }
  auto built = graph::graph_from_snapshot(snap, cfg.dataset_id, cfg.outcome, algorithm);
  if (!built)
    fail(ErrorCode::InvalidArgument, algorithm + " result is not available yet", {{"algorithm", algorithm}, {"job", job_id}});
  auto g = std::move(*built);
  g.id = store_.next_id(Kind::Graph);
  g.validate();
  refresh_effects(g);
  auto guard = graph_guard(g.id);
  std::lock_guard lock(*guard);
  store_.put(Kind::Graph, g.id, graph::to_json(g));
  return graph::to_json(g);
}

json Service::get_graph(const std::string& id) {
  auto guard = graph_guard(id);
  std::lock_guard lock(*guard);
  auto g = read_graph(id);
  if (refresh_effects(g)) store_.put(Kind::Graph, id, graph::to_json(g));
  return graph::to_json(g);
}

json Service::apply_edit(const std::string& id, const json& op_doc) {
  auto op = edit_from_json(op_doc);
  auto guard = graph_guard(id);
  std::lock_guard lock(*guard);
  auto g = service::apply_edit(read_graph(id), op);
  store_.put(Kind::Graph, id, graph::to_json(g));
  return graph::to_json(g);
}

json Service::save_graph(const std::string& id) {
  auto guard = graph_guard(id);
  std::lock_guard lock(*guard);
  auto g = read_graph(id);
  if (refresh_effects(g)) store_.put(Kind::Graph, id, graph::to_json(g));
  auto hid = store_.next_id(Kind::History);
  json entry{{"id", hid}, {"graph_id", id}, {"outcome", g.outcome}, {"saved_at", utc_now()}, {"graph", graph::to_json(g)}};
  store_.put(Kind::History, hid, entry);
  return entry;
}

json Service::history() { return store_.list(Kind::History); }

graph::CausalGraph Service::comparison_graph(const std::string& id) {
  if (auto entry = store_.get(Kind::History, id)) {
    auto g = graph::graph_from_json(entry->at("graph"));
    g.id = id;
    return g;
  }
  if (store_.get(Kind::Graph, id)) return graph::graph_from_json(get_graph(id));
  fail(ErrorCode::NotFound, "unknown graph or history entry '" + id + "'", {{"id", id}});
}

json Service::compare(const json& body) {
  if (!body.is_object() || !body.contains("graph_ids") || !body["graph_ids"].is_array())
    fail(ErrorCode::InvalidArgument, "comparison needs graph_ids");
  std::vector<std::string> ids;
  for (const auto& v : body["graph_ids"]) {
    if (!v.is_string()) fail(ErrorCode::InvalidArgument, "graph ids must be strings");
    ids.push_back(v.get<std::string>());
  }
  if (ids.size() < 2) fail(ErrorCode::InvalidArgument, "comparison needs at least two graphs", {{"count", ids.size()}});
  std::vector<graph::CausalGraph> graphs;
  for (const auto& id : ids) graphs.push_back(comparison_graph(id));
  return comparison::to_json(comparison::assemble(graphs));
}

}  // namespace mocg::service
