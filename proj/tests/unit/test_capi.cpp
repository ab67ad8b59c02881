#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>
#include <fstream>
#include <filesystem>
#include <memory>
#include <string>
#include <thread>

#include "json.hpp"
#include "mocg/mocg.h"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Takes ownership of a string returned by the library.
std::string take(char* s) {
  REQUIRE(s != nullptr);
  std::string out(s);
  mocg_free(s);
  return out;
}

json take_json(char* s) { return json::parse(take(s)); }

json last_error() { return json::parse(mocg_last_error()); }

struct Dataset {
  mocg_dataset* ptr = nullptr;
  ~Dataset() { mocg_dataset_close(ptr); }
};

const std::string kFixtures = MOCG_FIXTURES;

}  // namespace

TEST_CASE("version string") {
  CHECK(std::strlen(mocg_version()) > 0);
  CHECK(std::string(mocg_version()).find('.') != std::string::npos);
}

TEST_CASE("datasets from a file and from bytes") {
  Dataset file;
  REQUIRE(mocg_dataset_open((kFixtures + "/synthetic/benchmark.csv").c_str(), &file.ptr) == MOCG_OK);
  char* out = nullptr;
  REQUIRE(mocg_dataset_describe(file.ptr, &out) == MOCG_OK);
  auto doc = take_json(out);
  CHECK(doc["rows"] == 1000);
  CHECK(doc["variables"].size() == 7);

  std::string csv = "a,b,c\n1,2,x\n2,4.1,y\n3,5.9,x\n4,8.2,y\n";
  Dataset bytes;
  REQUIRE(mocg_dataset_parse(csv.data(), csv.size(), &bytes.ptr) == MOCG_OK);
  REQUIRE(mocg_dataset_correlations(bytes.ptr, "b", 1, &out) == MOCG_OK);
  auto corr = take_json(out);
  REQUIRE(corr["top"].size() == 1);
  CHECK(corr["top"][0] == "a");
  CHECK(corr["entries"][0]["variable"] == "a");
  CHECK(corr["entries"][0]["r"].get<double>() > 0.99);
}

TEST_CASE("failures set status and last error") {
  mocg_dataset* ds = nullptr;
  CHECK(mocg_dataset_open("/nonexistent/file.csv", &ds) == MOCG_IO);
  CHECK(ds == nullptr);
  CHECK(last_error()["code"] == "io");

  std::string dup = "a,a\n1,2\n";
  CHECK(mocg_dataset_parse(dup.data(), dup.size(), &ds) == MOCG_INVALID_ARGUMENT);
  auto err = last_error();
  CHECK(err["code"] == "invalid_argument");
  CHECK(err["message"].get<std::string>().size() > 0);

  CHECK(mocg_dataset_parse(nullptr, 0, &ds) == MOCG_INVALID_ARGUMENT);
  CHECK(mocg_dataset_describe(nullptr, nullptr) == MOCG_INVALID_ARGUMENT);

  std::string csv = "a,b\n1,2\n2,3\n3,5\n";
  Dataset ok;
  REQUIRE(mocg_dataset_parse(csv.data(), csv.size(), &ok.ptr) == MOCG_OK);
  char* out = nullptr;
  CHECK(mocg_dataset_correlations(ok.ptr, "zzz", 0, &out) == MOCG_NOT_FOUND);
  CHECK(out == nullptr);
  CHECK(mocg_discover(ok.ptr, "{not json", &out) == MOCG_INVALID_ARGUMENT);
  CHECK(mocg_synthesize("nope", 10, 1, &out, nullptr) == MOCG_INVALID_ARGUMENT);
  CHECK(mocg_layout("[]", "sideways", &out) == MOCG_INVALID_ARGUMENT);
}

TEST_CASE("errors are per thread") {
  mocg_dataset* ds = nullptr;
  CHECK(mocg_dataset_open("/nonexistent.csv", &ds) == MOCG_IO);
  std::string other;
  std::thread([&] { other = mocg_last_error(); }).join();
  CHECK(other.empty());
  CHECK(last_error()["code"] == "io");
}

TEST_CASE("synthesize, discover and evaluate") {
  char* csv = nullptr;
  char* truth = nullptr;
  REQUIRE(mocg_synthesize("collider", 10000, 7, &csv, &truth) == MOCG_OK);
  std::string table = take(csv);
  std::string truth_doc = take(truth);
  CHECK(json::parse(truth_doc)["directed"].size() == 2);

  Dataset ds;
  REQUIRE(mocg_dataset_parse(table.data(), table.size(), &ds.ptr) == MOCG_OK);
  char* out = nullptr;
  REQUIRE(mocg_discover(ds.ptr, R"({"outcome": "Z", "algorithms": ["pc"]})", &out) == MOCG_OK);
  auto result = take_json(out);
  auto pc = result["job"]["pc"];
  CHECK(pc["directed"] == json::parse(truth_doc)["directed"]);
  CHECK(pc["undirected"].empty());
  CHECK(result["graph"]["outcome"] == "Z");
  for (const auto& e : result["graph"]["edges"]) CHECK(e.contains("effect"));

  json preds = json::array({{{"algorithm", "pc"}, {"graph", {{"nodes", result["job"]["variables"]}, {"directed", pc["directed"]}, {"undirected", pc["undirected"]}}}}});
  REQUIRE(mocg_evaluate(preds.dump().c_str(), truth_doc.c_str(), &out) == MOCG_OK);
  auto metrics = take_json(out);
  REQUIRE(metrics["rows"].size() == 1);
  CHECK(metrics["rows"][0]["accuracy"] == 1.0);
  CHECK(metrics["rows"][0]["hamming"] == 0);

  REQUIRE(mocg_synthesize("chain", 50, 1, nullptr, &truth) == MOCG_OK);
  CHECK(json::parse(take(truth))["nodes"].size() == 3);
}

TEST_CASE("layout modes") {
  json graphs = json::array();
  for (const char* name : {"income", "health", "cognition"}) {
    std::ifstream in(kFixtures + "/three_outcome/" + name + ".json");
    REQUIRE(in);
    graphs.push_back(json::parse(in));
  }
  char* out = nullptr;
  REQUIRE(mocg_layout(graphs.dump().c_str(), "compressed", &out) == MOCG_OK);
  auto doc = take_json(out);
  CHECK(doc["mode"] == "compressed");
  REQUIRE(doc["views"].size() == 3);
  REQUIRE(doc["stress"].size() == 3);
  for (const auto& s : doc["stress"]) CHECK(s["compressed"].get<double>() <= s["extracted"].get<double>());
  for (const auto& v : doc["views"]) CHECK(v["svg"].get<std::string>().find("</svg>") != std::string::npos);

  REQUIRE(mocg_layout(graphs.dump().c_str(), "super", &out) == MOCG_OK);
  CHECK(take_json(out)["views"].size() == 1);

  json one = json::array({graphs[0]});
  REQUIRE(mocg_layout(one.dump().c_str(), "compressed", &out) == MOCG_OK);
  CHECK(take_json(out)["views"].size() == 1);

  json cyclic = graphs[0];
  cyclic["edges"].push_back({{"from", cyclic["outcome"]}, {"to", cyclic["nodes"][0]}, {"directed", true}, {"sources", {"User"}}});
  cyclic["edges"].push_back({{"from", cyclic["nodes"][0]}, {"to", cyclic["outcome"]}, {"directed", true}, {"sources", {"User"}}});
  auto status = mocg_layout(json::array({cyclic}).dump().c_str(), "extracted", &out);
  CHECK(status != MOCG_OK);
}

TEST_CASE("server lifecycle and stored history") {
  auto dir = fs::temp_directory_path() / ("mocg-capi-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  mocg_server* server = nullptr;
  REQUIRE(mocg_server_open(dir.c_str(), R"({"max_epochs": 5})", &server) == MOCG_OK);
  int port = 0;
  REQUIRE(mocg_server_bind(server, "127.0.0.1", 0, &port) == MOCG_OK);
  CHECK(port > 0);
  std::thread runner([&] { mocg_server_run(server); });
  std::this_thread::sleep_for(std::chrono::milliseconds(100));
  mocg_server_stop(server);
  runner.join();
  mocg_server_close(server);

  char* out = nullptr;
  CHECK(mocg_compare_history(dir.c_str(), R"(["h-1", "h-2"])", &out) == MOCG_NOT_FOUND);
  CHECK(mocg_compare_history(dir.c_str(), "{}", &out) == MOCG_INVALID_ARGUMENT);
  fs::remove_all(dir);
}
