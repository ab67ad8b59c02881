#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr folded into stdout.
Run mocg(const std::string& args) {
  std::string cmd = std::string("'") + MOCG_CLI + "' " + args + " 2>&1";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("mocg-cli-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

const std::string kFixtures = MOCG_FIXTURES;

std::string fixture_graphs() {
  std::string out;
  for (const char* name : {"income", "health", "cognition"}) out += kFixtures + "/three_outcome/" + name + ".json ";
  return out;
}

}  // namespace

TEST_CASE("synth, discover and eval on a collider") {
  Scratch s;
  auto synth = mocg("synth --kind collider --n 10000 --seed 7 --out " + (s / "c.csv") + " --truth " + (s / "t.json"));
  REQUIRE(synth.code == 0);

  auto discover = mocg("discover --dataset " + (s / "c.csv") + " --outcome Z --algos pc --out " + (s / "d.json"));
  REQUIRE(discover.code == 0);
  auto doc = json::parse(slurp(s / "d.json"));
  std::set<std::pair<std::string, std::string>> edges;
  for (const auto& e : doc["graph"]["edges"]) {
    CHECK(e["directed"] == true);
    edges.insert({e["from"].get<std::string>(), e["to"].get<std::string>()});
  }
  CHECK(edges == std::set<std::pair<std::string, std::string>>{{"X", "Z"}, {"Y", "Z"}});

  auto eval = mocg("eval --pred " + (s / "d.json") + " --truth " + (s / "t.json"));
  REQUIRE(eval.code == 0);
  CHECK(eval.out.find("accuracy 1.000") != std::string::npos);
  CHECK(eval.out.find("hamming 0") != std::string::npos);
}

TEST_CASE("synth is deterministic under a seed") {
  auto a = mocg("synth --kind mixed-sem --n 200 --seed 5");
  auto b = mocg("synth --kind mixed-sem --n 200 --seed 5");
  auto c = mocg("synth --kind mixed-sem --n 200 --seed 6");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
}

TEST_CASE("compressed layout reduces stress on the fixture") {
  Scratch s;
  auto r = mocg("layout --graphs " + fixture_graphs() + "--mode compressed --stress --svg " + (s / "svg") + " --dot " +
                (s / "dot") + " --out " + (s / "layout.json"));
  REQUIRE(r.code == 0);
  std::regex line(R"(stress (\S+) extracted ([0-9.eE+-]+) compressed ([0-9.eE+-]+))");
  int lines = 0;
  for (std::sregex_iterator it(r.out.begin(), r.out.end(), line), end; it != end; ++it) {
    CHECK(std::stod((*it)[3]) <= std::stod((*it)[2]));
    ++lines;
  }
  CHECK(lines == 3);

  for (const char* name : {"income", "health", "cognition"}) {
    auto svg = slurp(s.dir / "svg" / (std::string(name) + ".compressed.svg"));
    CHECK(svg.find("</svg>") != std::string::npos);
    std::regex node_id(R"re(id="node-([^"]+)")re");
    std::set<std::string> seen;
    for (std::sregex_iterator it(svg.begin(), svg.end(), node_id), end; it != end; ++it)
      CHECK(seen.insert((*it)[1]).second);
    CHECK(seen.size() >= 5);
    CHECK(slurp(s.dir / "dot" / (std::string(name) + ".compressed.dot")).find("digraph") != std::string::npos);
  }
  CHECK(json::parse(slurp(s / "layout.json"))["views"].size() == 3);
}

TEST_CASE("layout output is deterministic") {
  auto a = mocg("layout --graphs " + fixture_graphs() + "--mode super --stress");
  auto b = mocg("layout --graphs " + fixture_graphs() + "--mode super --stress");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("user errors exit with status 1") {
  auto missing = mocg("discover --dataset /nonexistent.csv --outcome Z");
  CHECK(missing.code == 1);
  CHECK(missing.out.find("io") != std::string::npos);
  CHECK(mocg("synth --kind bogus").code == 1);
  CHECK(mocg("layout --graphs /nonexistent.json").code == 1);
  CHECK(mocg("ingest " + kFixtures + "/synthetic/benchmark.csv").code == 0);
}
