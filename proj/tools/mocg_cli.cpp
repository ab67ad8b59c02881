// Command-line driver over the mocg C API.
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mocg/mocg.h"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kUser = 1, kInternal = 2 };

// Failure carrying the process exit code.
struct Failure {
  int code;
  std::string message;
};

void check(mocg_status s) {
  if (s == MOCG_OK) return;
  std::string msg = mocg_last_error();
  try {
    auto doc = json::parse(msg);
    msg = doc.value("code", std::string("error")) + ": " + doc.value("message", std::string());
    if (doc.contains("detail") && !doc["detail"].is_null()) msg += " " + doc["detail"].dump();
  } catch (const json::exception&) {
  }
  throw Failure{s == MOCG_INTERNAL ? kInternal : kUser, msg};
}

// Owns a string returned by the library.
struct Owned {
  char* p = nullptr;
  ~Owned() { mocg_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct Dataset {
  mocg_dataset* h = nullptr;
  explicit Dataset(const std::string& path) { check(mocg_dataset_open(path.c_str(), &h)); }
  ~Dataset() { mocg_dataset_close(h); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kUser, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(slurp(path));
  } catch (const json::parse_error& e) {
    throw Failure{kUser, path + ": " + e.what()};
  }
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Failure{kUser, "cannot write " + out};
  f << text;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// Predictions held by one --pred file: a bare {nodes, directed, undirected}
// graph, or a discover result with one prediction per algorithm.
void collect_predictions(const std::string& path, json& preds) {
  auto doc = read_json(path);
  if (doc.contains("job")) {
    const auto& job = doc["job"];
    auto nodes = job.at("variables");
    if (job.contains("pc") && !job["pc"].is_null())
      preds.push_back({{"algorithm", "pc"},
                       {"graph", {{"nodes", nodes}, {"directed", job["pc"]["directed"]}, {"undirected", job["pc"]["undirected"]}}}});
    if (job.contains("hybrid") && !job["hybrid"].is_null())
      preds.push_back({{"algorithm", "hybrid"}, {"graph", {{"nodes", nodes}, {"directed", job["hybrid"]["edges"]}}}});
    if (job.contains("continuous") && !job["continuous"].is_null())
      preds.push_back({{"algorithm", "continuous"}, {"graph", {{"nodes", nodes}, {"directed", job["continuous"]["edges"]}}}});
    return;
  }
  preds.push_back({{"algorithm", fs::path(path).stem().string()}, {"graph", doc}});
}

std::string safe_name(const std::string& id) {
  std::string out;
  for (char c : id) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out;
}

int serve(const std::string& addr, const std::string& data_dir, const json& cfg) {
  auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw Failure{kUser, "address must be host:port"};
  std::string host = addr.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(addr.substr(colon + 1));
  } catch (const std::exception&) {
    throw Failure{kUser, "bad port in " + addr};
  }

  // Block the termination signals before any thread starts; a dedicated
  // thread waits for them and stops the server.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  mocg_server* server = nullptr;
  check(mocg_server_open(data_dir.c_str(), cfg.dump().c_str(), &server));
  int bound = 0;
  if (mocg_server_bind(server, host.c_str(), port, &bound) != MOCG_OK) {
    std::string err = mocg_last_error();
    mocg_server_close(server);
    throw Failure{kUser, err};
  }
  std::cout << "listening on http://" << host << ":" << bound << std::endl;

  std::thread waiter([server, set] {
    int sig = 0;
    sigwait(&set, &sig);
    mocg_server_stop(server);
  });
  mocg_status s = mocg_server_run(server);
  // Wake the waiter if the server ended on its own.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  mocg_server_close(server);
  check(s);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-outcome causal discovery, layout and comparison"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mocg_version()));

  auto* ingest = app.add_subcommand("ingest", "Load a CSV and print its variables");
  std::string ingest_csv;
  ingest->add_option("csv", ingest_csv, "CSV file")->required();

  auto* discover = app.add_subcommand("discover", "Run causal discovery on a CSV");
  std::string d_dataset, d_outcome, d_algos = "pc,continuous,hybrid", d_out, d_backbone;
  std::size_t d_top = 0;
  std::uint64_t d_seed = 0;
  double d_alpha = 0.05, d_threshold = 0.3;
  int d_epochs = 300;
  discover->add_option("--dataset", d_dataset, "CSV file")->required();
  discover->add_option("--outcome", d_outcome, "Outcome variable")->required();
  discover->add_option("--top", d_top, "Keep the N variables most correlated with the outcome (0 = all)");
  discover->add_option("--algos", d_algos, "Comma-separated subset of pc,continuous,hybrid");
  discover->add_option("--out", d_out, "Output JSON file (default stdout)");
  discover->add_option("--seed", d_seed, "Random seed");
  discover->add_option("--alpha", d_alpha, "CI test level");
  discover->add_option("--threshold", d_threshold, "Edge weight threshold for the continuous learner");
  discover->add_option("--max-epochs", d_epochs, "Continuous learner epochs");
  discover->add_option("--backbone", d_backbone, "Algorithm supplying the graph edges");

  auto* layout = app.add_subcommand("layout", "Lay out one or more graphs");
  std::vector<std::string> l_graphs;
  std::string l_mode = "compressed", l_svg, l_dot, l_out;
  bool l_stress = false;
  layout->add_option("--graphs", l_graphs, "Graph JSON files")->required();
  layout->add_option("--mode", l_mode, "super, extracted or compressed")
      ->check(CLI::IsMember({"super", "extracted", "compressed"}));
  layout->add_option("--svg", l_svg, "Directory for SVG files");
  layout->add_option("--dot", l_dot, "Directory for DOT files");
  layout->add_option("--out", l_out, "Write the layout JSON here");
  layout->add_flag("--stress", l_stress, "Print horizontal stress per graph");

  auto* compare = app.add_subcommand("compare", "Compare saved history entries");
  std::string c_history, c_out;
  std::vector<std::string> c_ids;
  compare->add_option("--history", c_history, "Service data directory")->required();
  compare->add_option("--ids", c_ids, "History entry ids")->required();
  compare->add_option("--out", c_out, "Output JSON file (default stdout)");

  auto* evaluate = app.add_subcommand("eval", "Score predicted graphs against a truth graph");
  std::vector<std::string> e_pred;
  std::string e_truth;
  bool e_json = false;
  evaluate->add_option("--pred", e_pred, "Prediction files")->required();
  evaluate->add_option("--truth", e_truth, "Truth graph file")->required();
  evaluate->add_flag("--json", e_json, "Print the report as JSON");

  auto* synth = app.add_subcommand("synth", "Generate synthetic data with a known graph");
  std::string s_kind, s_out, s_truth;
  std::size_t s_n = 1000;
  std::uint64_t s_seed = 0;
  synth->add_option("--kind", s_kind, "chain, fork, collider, mixed-sem, linear-sem, confounded or benchmark")->required();
  synth->add_option("--n", s_n, "Rows");
  synth->add_option("--seed", s_seed, "Random seed");
  synth->add_option("--out", s_out, "CSV file (default stdout)");
  synth->add_option("--truth", s_truth, "Write the true graph here");

  auto* srv = app.add_subcommand("serve", "Run the HTTP service");
  const char* env_addr = std::getenv("MOCG_ADDR");
  const char* env_dir = std::getenv("MOCG_DATA_DIR");
  std::string v_addr = env_addr ? env_addr : "127.0.0.1:8787";
  std::string v_dir = env_dir ? env_dir : "mocg-data";
  double v_alpha = 0.05, v_threshold = 0.3;
  int v_epochs = 300;
  srv->add_option("--addr", v_addr, "Listen address host:port");
  srv->add_option("--data-dir", v_dir, "Data directory");
  srv->add_option("--ci-alpha", v_alpha, "Default CI test level");
  srv->add_option("--threshold", v_threshold, "Default continuous edge threshold");
  srv->add_option("--max-epochs", v_epochs, "Default continuous epochs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUser;
  }

  try {
    if (*ingest) {
      Dataset ds(ingest_csv);
      Owned out;
      check(mocg_dataset_describe(ds.h, &out.p));
      emit(json::parse(out.str()).dump(2), "");
    } else if (*discover) {
      Dataset ds(d_dataset);
      json req{{"outcome", d_outcome}, {"top", d_top}, {"algorithms", split(d_algos)}, {"ci_alpha", d_alpha},
               {"rng_seed", d_seed}, {"continuous", {{"max_epochs", d_epochs}, {"threshold", d_threshold}}}};
      if (!d_backbone.empty()) req["backbone"] = d_backbone;
      Owned out;
      check(mocg_discover(ds.h, req.dump().c_str(), &out.p));
      emit(json::parse(out.str()).dump(2), d_out);
    } else if (*layout) {
      json graphs = json::array();
      for (const auto& path : l_graphs) graphs.push_back(read_json(path));
      Owned out;
      check(mocg_layout(graphs.dump().c_str(), l_mode.c_str(), &out.p));
      auto doc = json::parse(out.str());
      for (bool svg : {true, false}) {
        const auto& dir = svg ? l_svg : l_dot;
        if (dir.empty()) continue;
        fs::create_directories(dir);
        for (const auto& v : doc["views"]) {
          auto name = safe_name(v["id"].get<std::string>()) + "." + l_mode + (svg ? ".svg" : ".dot");
          emit(v[svg ? "svg" : "dot"].get<std::string>(), (fs::path(dir) / name).string());
        }
      }
      if (l_stress)
        for (const auto& row : doc["stress"])
          std::printf("stress %s extracted %.4f compressed %.4f\n", row["graph_id"].get<std::string>().c_str(),
                      row["extracted"].get<double>(), row["compressed"].get<double>());
      if (!l_out.empty()) emit(doc.dump(2), l_out);
      if (l_out.empty() && !l_stress && l_svg.empty() && l_dot.empty()) emit(doc.dump(2), "");
    } else if (*compare) {
      json ids = c_ids;
      Owned out;
      check(mocg_compare_history(c_history.c_str(), ids.dump().c_str(), &out.p));
      emit(json::parse(out.str()).dump(2), c_out);
    } else if (*evaluate) {
      json preds = json::array();
      for (const auto& p : e_pred) collect_predictions(p, preds);
      auto truth = read_json(e_truth);
      Owned out;
      check(mocg_evaluate(preds.dump().c_str(), truth.dump().c_str(), &out.p));
      auto report = json::parse(out.str());
      if (e_json) {
        emit(report.dump(2), "");
      } else {
        auto line = [](const json& row) {
          std::printf("%-12s accuracy %.3f fpr %.3f hamming %d\n", row["algorithm"].get<std::string>().c_str(),
                      row["accuracy"].get<double>(), row["fpr"].get<double>(), row["hamming"].get<int>());
        };
        for (const auto& row : report["rows"]) line(row);
        if (report["rows"].size() > 1) line(report["union"]);
      }
    } else if (*synth) {
      Owned csv, truth;
      check(mocg_synthesize(s_kind.c_str(), s_n, s_seed, &csv.p, &truth.p));
      emit(csv.str(), s_out);
      if (!s_truth.empty()) emit(json::parse(truth.str()).dump(2), s_truth);
    } else if (*srv) {
      return serve(v_addr, v_dir, {{"ci_alpha", v_alpha}, {"threshold", v_threshold}, {"max_epochs", v_epochs}});
    }
  } catch (const Failure& f) {
    std::cerr << "mocg: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "mocg: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}
