#include "mocg/mocg.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <set>

#include "comparison/comparison.hpp"
#include "common/error.hpp"
#include "dataset/dataset.hpp"
#include "discovery/job.hpp"
#include "effects/effects.hpp"
#include "eval/metrics.hpp"
#include "eval/synth.hpp"
#include "graph/from_snapshot.hpp"
#include "layout/export.hpp"
#include "layout/stress.hpp"
#include "service/http_server.hpp"
#include "service/service.hpp"
#include "service/store.hpp"

using nlohmann::json;

struct mocg_dataset {
  std::shared_ptr<const mocg::dataset::MixedDataset> data;
  std::string id;
};

struct mocg_server {
  std::unique_ptr<mocg::service::Service> service;
  std::unique_ptr<mocg::service::HttpServer> http;
};

namespace {

thread_local std::string last_error;

mocg_status status_of(mocg::ErrorCode code) {
  using mocg::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return MOCG_INVALID_ARGUMENT;
    case ErrorCode::NotFound: return MOCG_NOT_FOUND;
    case ErrorCode::Conflict: return MOCG_CONFLICT;
    case ErrorCode::Cycle: return MOCG_CYCLE;
    case ErrorCode::Numeric: return MOCG_NUMERIC;
    case ErrorCode::Io: return MOCG_IO;
    case ErrorCode::Internal: return MOCG_INTERNAL;
  }
  return MOCG_INTERNAL;
}

mocg_status record(mocg::ErrorCode code, const std::string& message, const json& detail = nullptr) {
  last_error = json{{"code", mocg::to_string(code)}, {"message", message}, {"detail", detail}}.dump();
  return status_of(code);
}

template <class F>
mocg_status guarded(F&& fn) {
  try {
    fn();
    return MOCG_OK;
  } catch (const mocg::Error& e) {
    return record(e.code(), e.what(), e.detail());
  } catch (const json::exception& e) {
    return record(mocg::ErrorCode::InvalidArgument, e.what());
  } catch (const std::exception& e) {
    return record(mocg::ErrorCode::Internal, e.what());
  } catch (...) {
    return record(mocg::ErrorCode::Internal, "unknown failure");
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* name) {
  if (!p) mocg::fail(mocg::ErrorCode::InvalidArgument, std::string(name) + " must not be null");
}

json parse(const char* text, const char* name) {
  require(text, name);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    mocg::fail(mocg::ErrorCode::InvalidArgument, std::string(name) + " is not valid JSON: " + e.what());
  }
}

mocg_dataset* make_dataset(std::string bytes) {
  auto ds = std::make_shared<const mocg::dataset::MixedDataset>(mocg::dataset::load_csv(bytes));
  return new mocg_dataset{ds, "ds-" + mocg::service::sha256_hex(bytes).substr(0, 12)};
}

// Accepts a graph document or any object wrapping one under "graph".
mocg::graph::CausalGraph graph_doc(const json& doc) {
  if (doc.is_object() && doc.contains("graph") && doc["graph"].is_object()) return mocg::graph::graph_from_json(doc["graph"]);
  return mocg::graph::graph_from_json(doc);
}

json view(const std::string& id, const mocg::layout::LayeredLayout& l, const mocg::graph::CausalGraph* g) {
  namespace L = mocg::layout;
  json v{{"id", id}, {"layout", L::to_json(l)}, {"svg", L::to_svg(l, g, {90, 16, id})}, {"dot", L::to_dot(l, g, id)}};
  if (g) v["graph"] = L::graph_with_layout(*g, l);
  return v;
}

}  // namespace

extern "C" {

const char* mocg_version(void) { return "0.1.0"; }

const char* mocg_last_error(void) { return last_error.c_str(); }

void mocg_free(char* s) { std::free(s); }

mocg_status mocg_dataset_open(const char* csv_path, mocg_dataset** out) {
  return guarded([&] {
    require(csv_path, "csv_path");
    require(out, "out");
    *out = make_dataset(mocg::service::read_file(csv_path));
  });
}

mocg_status mocg_dataset_parse(const char* bytes, size_t len, mocg_dataset** out) {
  return guarded([&] {
    require(bytes, "bytes");
    require(out, "out");
    *out = make_dataset(std::string(bytes, len));
  });
}

void mocg_dataset_close(mocg_dataset* ds) { delete ds; }

mocg_status mocg_dataset_describe(const mocg_dataset* ds, char** json_out) {
  return guarded([&] {
    require(ds, "ds");
    require(json_out, "json_out");
    const auto& d = *ds->data;
    *json_out = dup(json{{"id", ds->id},
                         {"rows", d.row_count()},
                         {"columns", d.column_count()},
                         {"dropped_rows", d.dropped_rows()},
                         {"variables", mocg::dataset::variables_json(d)}}
                        .dump());
  });
}

mocg_status mocg_dataset_correlations(const mocg_dataset* ds, const char* outcome, size_t top, char** json_out) {
  return guarded([&] {
    require(ds, "ds");
    require(outcome, "outcome");
    require(json_out, "json_out");
    auto report = mocg::dataset::pearson_correlations(*ds->data, outcome);
    auto doc = mocg::dataset::to_json(report);
    doc["top"] = mocg::dataset::top_n(report, top == 0 ? std::max<std::size_t>(1, report.entries.size()) : top);
    *json_out = dup(doc.dump());
  });
}

mocg_status mocg_discover(const mocg_dataset* ds, const char* request_json, char** json_out) {
  return guarded([&] {
    require(ds, "ds");
    require(json_out, "json_out");
    auto req = parse(request_json, "request_json");
    if (!req.is_object() || !req.contains("outcome"))
      mocg::fail(mocg::ErrorCode::InvalidArgument, "request needs an outcome");
    auto outcome = req["outcome"].get<std::string>();

    std::vector<std::string> vars;
    if (req.contains("variables")) {
      vars = req["variables"].get<std::vector<std::string>>();
    } else {
      auto report = mocg::dataset::pearson_correlations(*ds->data, outcome);
      std::size_t top = req.value("top", std::size_t{0});
      if (top == 0) top = report.entries.size();
      if (top > 0) vars = mocg::dataset::top_n(report, top);
    }
    json cfg_doc = req;
    cfg_doc.erase("top");
    cfg_doc.erase("backbone");
    cfg_doc["dataset"] = ds->id;
    cfg_doc["variables"] = vars;
    auto cfg = mocg::discovery::job_config_from_json(cfg_doc);

    mocg::discovery::DiscoveryJob job("batch", ds->data, cfg);
    job.wait();
    auto snap = job.snapshot();

    std::vector<std::string> order;
    if (req.contains("backbone")) order.push_back(req["backbone"].get<std::string>());
    for (const char* a : {"pc", "hybrid", "continuous"}) order.push_back(a);
    json result{{"job", job.status_json()}, {"graph", nullptr}};
    for (const auto& algorithm : order) {
      auto g = mocg::graph::graph_from_snapshot(*snap, ds->id, cfg.outcome, algorithm);
      if (!g) continue;
      g->id = "g-" + cfg.outcome;
      mocg::effects::estimate_all(*ds->data, *g);
      result["graph"] = mocg::graph::to_json(*g);
      result["backbone"] = algorithm;
      break;
    }
    *json_out = dup(result.dump());
  });
}

mocg_status mocg_synthesize(const char* kind, size_t n, uint64_t seed, char** csv_out, char** truth_json_out) {
  return guarded([&] {
    require(kind, "kind");
    auto s = mocg::eval::synthesize(kind, n, seed);
    std::vector<std::string> names;
    for (const auto& v : s.data.variables()) names.push_back(v.name);
    mocg::discovery::Pdag truth{names, s.truth, {}};
    std::string csv = mocg::eval::to_csv(s.data);
    std::string t = mocg::discovery::to_json(truth).dump();
    char* c = csv_out ? dup(csv) : nullptr;
    if (truth_json_out) {
      try {
        *truth_json_out = dup(t);
      } catch (...) {
        std::free(c);
        throw;
      }
    }
    if (csv_out) *csv_out = c;
  });
}

mocg_status mocg_evaluate(const char* predictions_json, const char* truth_json, char** json_out) {
  return guarded([&] {
    require(json_out, "json_out");
    auto preds_doc = parse(predictions_json, "predictions_json");
    auto truth = mocg::discovery::pdag_from_json(parse(truth_json, "truth_json"));
    if (!preds_doc.is_array() || preds_doc.empty())
      mocg::fail(mocg::ErrorCode::InvalidArgument, "predictions must be a non-empty array");
    std::vector<mocg::eval::NamedPrediction> preds;
    for (const auto& p : preds_doc)
      preds.push_back({p.at("algorithm").get<std::string>(), mocg::discovery::pdag_from_json(p.at("graph"))});
    *json_out = dup(mocg::eval::to_json(mocg::eval::eval_metrics(preds, truth)).dump());
  });
}

mocg_status mocg_layout(const char* graphs_json, const char* mode, char** json_out) {
  return guarded([&] {
    namespace L = mocg::layout;
    require(mode, "mode");
    require(json_out, "json_out");
    std::string m = mode;
    if (m != "super" && m != "extracted" && m != "compressed")
      mocg::fail(mocg::ErrorCode::InvalidArgument, "unknown layout mode '" + m + "'", {{"mode", m}});
    auto docs = parse(graphs_json, "graphs_json");
    if (!docs.is_array() || docs.empty()) mocg::fail(mocg::ErrorCode::InvalidArgument, "graphs must be a non-empty array");

    std::vector<mocg::graph::CausalGraph> graphs;
    std::set<std::string> seen;
    for (const auto& d : docs) {
      auto g = graph_doc(d);
      if (g.id.empty()) g.id = "g";
      std::string base = g.id;
      for (int k = 2; !seen.insert(g.id).second; ++k) g.id = base + "-" + std::to_string(k);
      graphs.push_back(std::move(g));
    }

    json out{{"mode", m}, {"views", json::array()}, {"stress", json::array()}};
    if (graphs.size() == 1) {
      auto l = L::layered_layout(graphs[0]);
      double s = L::stress_x(l);
      out["views"].push_back(view(graphs[0].id, l, &graphs[0]));
      out["stress"].push_back({{"graph_id", graphs[0].id}, {"extracted", s}, {"compressed", s}});
      *json_out = dup(out.dump());
      return;
    }
    auto set = mocg::comparison::assemble(graphs);
    if (m == "super") {
      out["views"].push_back(view("super", set.supergraph.layout, nullptr));
    } else {
      for (std::size_t i = 0; i < graphs.size(); ++i) {
        const auto& l = m == "extracted" ? set.extracted[i] : set.compressed.subgraphs[i].layout;
        out["views"].push_back(view(graphs[i].id, l, &graphs[i]));
      }
    }
    out["stress"] = L::to_json(set.stress);
    out["comparison"] = mocg::comparison::to_json(set);
    *json_out = dup(out.dump());
  });
}

mocg_status mocg_compare_history(const char* data_dir, const char* ids_json, char** json_out) {
  return guarded([&] {
    require(data_dir, "data_dir");
    require(json_out, "json_out");
    auto ids = parse(ids_json, "ids_json").get<std::vector<std::string>>();
    mocg::service::Store store(data_dir);
    std::vector<mocg::graph::CausalGraph> graphs;
    for (const auto& id : ids) {
      if (auto entry = store.get(mocg::service::Kind::History, id)) {
        auto g = mocg::graph::graph_from_json(entry->at("graph"));
        g.id = id;
        graphs.push_back(std::move(g));
      } else if (auto doc = store.get(mocg::service::Kind::Graph, id)) {
        graphs.push_back(mocg::graph::graph_from_json(*doc));
      } else {
        mocg::fail(mocg::ErrorCode::NotFound, "unknown history entry '" + id + "'", {{"id", id}});
      }
    }
    *json_out = dup(mocg::comparison::to_json(mocg::comparison::assemble(graphs)).dump());
  });
}

mocg_status mocg_server_open(const char* data_dir, const char* config_json, mocg_server** out) {
  return guarded([&] {
    require(data_dir, "data_dir");
    require(out, "out");
    mocg::service::ServiceConfig cfg;
    cfg.data_dir = data_dir;
    if (config_json) {
      auto doc = parse(config_json, "config_json");
      cfg.ci_alpha = doc.value("ci_alpha", cfg.ci_alpha);
      cfg.threshold = doc.value("threshold", cfg.threshold);
      cfg.max_epochs = doc.value("max_epochs", cfg.max_epochs);
    }
    auto server = std::make_unique<mocg_server>();
    server->service = std::make_unique<mocg::service::Service>(cfg);
    server->http = std::make_unique<mocg::service::HttpServer>(*server->service);
    *out = server.release();
  });
}

mocg_status mocg_server_bind(mocg_server* server, const char* host, int port, int* bound_port) {
  return guarded([&] {
    require(server, "server");
    require(host, "host");
    int bound = server->http->bind(host, port);
    if (bound_port) *bound_port = bound;
  });
}

mocg_status mocg_server_run(mocg_server* server) {
  return guarded([&] {
    require(server, "server");
    if (!server->http->run()) mocg::fail(mocg::ErrorCode::Io, "server stopped with an error");
  });
}

void mocg_server_stop(mocg_server* server) {
  if (server) server->http->stop();
}

void mocg_server_close(mocg_server* server) {
  if (!server) return;
  server->http->stop();
  server->http.reset();
  server->service.reset();
  delete server;
}

}  // extern "C"
