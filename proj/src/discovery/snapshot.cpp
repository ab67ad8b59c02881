#include "discovery/snapshot.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "common/error.hpp"

namespace mocg::discovery {

const char* to_string(AlgoStatus s) {
  switch (s) {
    case AlgoStatus::Pending: return "Pending";
    case AlgoStatus::Running: return "Running";
    case AlgoStatus::Paused: return "Paused";
    case AlgoStatus::Done: return "Done";
    case AlgoStatus::Stopped: return "Stopped";
    case AlgoStatus::Failed: return "Failed";
  }
  return "Failed";
}

AlgoStatus parse_algo_status(std::string_view text) {
  for (auto s : {AlgoStatus::Pending, AlgoStatus::Running, AlgoStatus::Paused, AlgoStatus::Done,
                 AlgoStatus::Stopped, AlgoStatus::Failed})
    if (text == to_string(s)) return s;
  fail(ErrorCode::InvalidArgument, "unknown status '" + std::string(text) + "'");
}

void JobConfig::validate() const {
  if (variables.size() < 2) fail(ErrorCode::InvalidArgument, "a job needs at least 2 variables");
  std::set<std::string> seen(variables.begin(), variables.end());
  if (seen.size() != variables.size()) fail(ErrorCode::InvalidArgument, "duplicate variable in job");
  if (!outcome.empty() && !seen.count(outcome))
    fail(ErrorCode::InvalidArgument, "outcome '" + outcome + "' is not among the selected variables");
  if (!(ci_alpha > 0 && ci_alpha < 1)) fail(ErrorCode::InvalidArgument, "ci_alpha must lie in (0, 1)");
  if (!(continuous.threshold > 0)) fail(ErrorCode::InvalidArgument, "threshold must be positive");
  if (continuous.max_epochs < 1) fail(ErrorCode::InvalidArgument, "max_epochs must be at least 1");
  if (continuous.hidden_width < 1) fail(ErrorCode::InvalidArgument, "hidden_width must be at least 1");
  if (!run_pc && !run_continuous && !run_hybrid) fail(ErrorCode::InvalidArgument, "no algorithm selected");
}

nlohmann::json to_json(const JobConfig& c) {
  std::vector<std::string> algos;
  if (c.run_pc) algos.push_back("pc");
  if (c.run_continuous) algos.push_back("continuous");
  if (c.run_hybrid) algos.push_back("hybrid");
  const auto& k = c.continuous;
  return {{"dataset", c.dataset_id},
          {"variables", c.variables},
          {"outcome", c.outcome},
          {"ci_alpha", c.ci_alpha},
          {"algorithms", algos},
          {"rng_seed", c.rng_seed},
          {"hybrid", {{"lambda", c.hybrid_lambda}}},
          {"continuous",
           {{"max_epochs", k.max_epochs},
            {"hidden_width", k.hidden_width},
            {"threshold", k.threshold},
            {"iterations_per_epoch", k.iterations_per_epoch},
            {"update_interval", k.update_interval},
            {"rho_init", k.rho_init},
            {"rho_multiplier", k.rho_multiplier},
            {"rho_max", k.rho_max},
            {"h_shrink", k.h_shrink},
            {"h_tolerance", k.h_tolerance},
            {"encoder_anchor", k.encoder_anchor}}}};
}

JobConfig job_config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) fail(ErrorCode::InvalidArgument, "job config must be a JSON object");
  JobConfig c;
  try {
    c.dataset_id = doc.value("dataset", std::string());
    c.variables = doc.at("variables").get<std::vector<std::string>>();
    c.outcome = doc.value("outcome", std::string());
    if (!c.outcome.empty() && std::find(c.variables.begin(), c.variables.end(), c.outcome) == c.variables.end())
      c.variables.push_back(c.outcome);
    c.ci_alpha = doc.value("ci_alpha", c.ci_alpha);
    c.rng_seed = doc.value("rng_seed", c.rng_seed);
    if (doc.contains("algorithms")) {
      c.run_pc = c.run_continuous = c.run_hybrid = false;
      for (const auto& a : doc["algorithms"]) {
        const auto name = a.get<std::string>();
        if (name == "pc")
          c.run_pc = true;
        else if (name == "continuous")
          c.run_continuous = true;
        else if (name == "hybrid")
          c.run_hybrid = true;
        else
          fail(ErrorCode::InvalidArgument, "unknown algorithm '" + name + "'");
      }
    }
    if (doc.contains("hybrid")) c.hybrid_lambda = doc["hybrid"].value("lambda", c.hybrid_lambda);
    if (doc.contains("continuous")) {
      const auto& j = doc["continuous"];
      auto& k = c.continuous;
      k.max_epochs = j.value("max_epochs", k.max_epochs);
      k.hidden_width = j.value("hidden_width", k.hidden_width);
      k.threshold = j.value("threshold", k.threshold);
      k.iterations_per_epoch = j.value("iterations_per_epoch", k.iterations_per_epoch);
      k.update_interval = j.value("update_interval", k.update_interval);
      k.rho_init = j.value("rho_init", k.rho_init);
      k.rho_multiplier = j.value("rho_multiplier", k.rho_multiplier);
      k.rho_max = j.value("rho_max", k.rho_max);
      k.h_shrink = j.value("h_shrink", k.h_shrink);
      k.h_tolerance = j.value("h_tolerance", k.h_tolerance);
      k.encoder_anchor = j.value("encoder_anchor", k.encoder_anchor);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed job config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json loss_json(const LossRecord& r) {
  return {{"epoch", r.epoch}, {"elbo", r.elbo}, {"nll", r.nll}, {"mse", r.mse}};
}

nlohmann::json to_json(const ContinuousState& s, const std::vector<std::string>& names) {
  auto matrix = nlohmann::json::array();
  for (Eigen::Index i = 0; i < s.weights.A.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < s.weights.A.cols(); ++j) row.push_back(s.weights.A(i, j));
    matrix.push_back(std::move(row));
  }
  auto losses = nlohmann::json::array();
  for (const auto& r : s.losses) losses.push_back(loss_json(r));
  return {{"variables", s.weights.variables},
          {"matrix", std::move(matrix)},
          {"edges", edges_to_json(names, s.edges)},
          {"losses", std::move(losses)},
          {"epoch", s.epoch},
          {"h", s.h},
          {"rho", s.rho}};
}

nlohmann::json to_json(const DiscoverySnapshot& s) {
  nlohmann::json doc;
  doc["variables"] = s.variables;
  doc["pc"] = s.pc ? nlohmann::json{{"directed", edges_to_json(s.variables, s.pc->directed)},
                                    {"undirected", edges_to_json(s.variables, s.pc->undirected)}}
                   : nlohmann::json(nullptr);
  doc["continuous"] = s.continuous ? to_json(*s.continuous, s.variables) : nlohmann::json(nullptr);
  doc["hybrid"] = s.hybrid ? nlohmann::json{{"edges", edges_to_json(s.variables, *s.hybrid)}} : nlohmann::json(nullptr);
  doc["status"] = {{"pc", to_string(s.pc_status.status)},
                   {"continuous", to_string(s.continuous_status.status)},
                   {"hybrid", to_string(s.hybrid_status.status)}};
  nlohmann::json errors = nlohmann::json::object();
  if (!s.pc_status.message.empty()) errors["pc"] = s.pc_status.message;
  if (!s.continuous_status.message.empty()) errors["continuous"] = s.continuous_status.message;
  if (!s.hybrid_status.message.empty()) errors["hybrid"] = s.hybrid_status.message;
  doc["errors"] = std::move(errors);
  doc["diagnostics"] = s.diagnostics;
  return doc;
}

DiscoverySnapshot snapshot_from_json(const nlohmann::json& doc) {
  try {
    DiscoverySnapshot s;
    s.variables = doc.at("variables").get<std::vector<std::string>>();
    if (doc.contains("pc") && !doc["pc"].is_null()) {
      nlohmann::json g = doc["pc"];
      g["nodes"] = s.variables;
      s.pc = pdag_from_json(g);
    }
    if (doc.contains("continuous") && !doc["continuous"].is_null()) {
      const auto& c = doc["continuous"];
      ContinuousState st;
      st.weights.variables = c.at("variables").get<std::vector<std::string>>();
      const auto& m = c.at("matrix");
      const auto d = static_cast<Eigen::Index>(m.size());
      st.weights.A.resize(d, d);
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) st.weights.A(i, j) = m.at(i).at(j).get<double>();
      st.edges = edges_from_json(s.variables, c.at("edges"));
      for (const auto& r : c.at("losses"))
        st.losses.push_back({r.at("epoch").get<int>(), r.at("elbo").get<double>(), r.at("nll").get<double>(),
                             r.at("mse").get<double>()});
      st.epoch = c.value("epoch", 0);
      st.h = c.value("h", 0.0);
      st.rho = c.value("rho", 0.0);
      s.continuous = std::move(st);
    }
    if (doc.contains("hybrid") && !doc["hybrid"].is_null())
      s.hybrid = edges_from_json(s.variables, doc["hybrid"].at("edges"));
    const auto& st = doc.at("status");
    s.pc_status.status = parse_algo_status(st.at("pc").get<std::string>());
    s.continuous_status.status = parse_algo_status(st.at("continuous").get<std::string>());
    s.hybrid_status.status = parse_algo_status(st.at("hybrid").get<std::string>());
    const auto errors = doc.value("errors", nlohmann::json::object());
    s.pc_status.message = errors.value("pc", std::string());
    s.continuous_status.message = errors.value("continuous", std::string());
    s.hybrid_status.message = errors.value("hybrid", std::string());
    s.diagnostics = doc.value("diagnostics", std::vector<std::string>{});
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed snapshot JSON: ") + e.what());
  }
}

}  // namespace mocg::discovery
