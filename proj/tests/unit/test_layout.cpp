#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "common/error.hpp"
#include "layout/compress.hpp"
#include "layout/export.hpp"
#include "layout/layered.hpp"
#include "layout/stress.hpp"
#include "layout/supergraph.hpp"
#include "support/corpus.hpp"

using namespace mocg;
using namespace mocg::layout;
using graph::CausalGraph;
using testing::hand_super;
using testing::rank_sequences;
using testing::xs;

namespace {

CausalGraph make_graph(std::string id, std::vector<std::string> nodes,
                       std::vector<std::pair<std::string, std::string>> edges, std::string outcome) {
  CausalGraph g;
  g.id = std::move(id);
  g.nodes = std::move(nodes);
  g.outcome = std::move(outcome);
  for (auto& [a, b] : edges) g.edges.push_back({a, b, true, {graph::EdgeSource::PC}, {}, {}});
  return g;
}

CausalGraph load_fixture(const std::string& name) {
  std::ifstream in(std::string(MOCG_FIXTURES) + "/three_outcome/" + name + ".json");
  REQUIRE(in);
  return graph::graph_from_json(nlohmann::json::parse(in));
}

// Independent crossing counter: every edge becomes a polyline through its
// bends, one segment per pair of adjacent ranks; two segments between the
// same ranks cross when their endpoints swap sides.
long brute_force_crossings(const LayeredLayout& l) {
  struct Seg {
    int rank;
    double top, bottom;
  };
  std::vector<Seg> segs;
  for (const auto& e : l.edges) {
    const auto* a = l.find(e.from);
    const auto* b = l.find(e.to);
    std::vector<std::pair<int, double>> pts{{a->rank, a->x}};
    int step = b->rank > a->rank ? 1 : -1;
    int r = a->rank;
    for (const auto& p : e.bends) pts.push_back({r += step, p.x});
    pts.push_back({b->rank, b->x});
    std::sort(pts.begin(), pts.end());
    for (std::size_t i = 1; i < pts.size(); ++i) segs.push_back({pts[i - 1].first, pts[i - 1].second, pts[i].second});
  }
  long crossings = 0;
  for (std::size_t i = 0; i < segs.size(); ++i)
    for (std::size_t j = i + 1; j < segs.size(); ++j)
      if (segs[i].rank == segs[j].rank && (segs[i].top - segs[j].top) * (segs[i].bottom - segs[j].bottom) < 0)
        ++crossings;
  return crossings;
}

void check_layout_invariants(const LayeredLayout& l) {
  std::set<std::pair<int, int>> slots;
  std::map<int, std::vector<const NodePlacement*>> by_rank;
  for (const auto& n : l.nodes) {
    CHECK(n.rank >= 0);
    CHECK(n.order >= 0);
    CHECK(slots.insert({n.rank, n.order}).second);
    by_rank[n.rank].push_back(&n);
  }
  double last_y = -1e300;
  for (auto& [rank, nodes] : by_rank) {
    std::sort(nodes.begin(), nodes.end(), [](auto* a, auto* b) { return a->order < b->order; });
    CHECK(nodes.front()->y > last_y);
    last_y = nodes.front()->y;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      CHECK(nodes[i]->y == nodes.front()->y);
      if (i > 0) CHECK(nodes[i]->x > nodes[i - 1]->x);
    }
  }
  for (const auto& e : l.edges) {
    const auto* a = l.find(e.from);
    const auto* b = l.find(e.to);
    REQUIRE(a);
    REQUIRE(b);
    CHECK(e.reversed == (e.directed && a->rank > b->rank));
    CHECK(e.bends.size() == static_cast<std::size_t>(std::abs(a->rank - b->rank) - 1));
  }
}

}  // namespace

TEST_SUITE("layered") {
  TEST_CASE("single edge") {
    auto l = layered_layout({"A", "B"}, {{"A", "B", true}});
    CHECK(l.find("A")->rank == 0);
    CHECK(l.find("B")->rank == 1);
    REQUIRE(l.edges.size() == 1);
    CHECK_FALSE(l.edges[0].reversed);
  }

  TEST_CASE("diamond") {
    auto l = layered_layout({"D", "C", "B", "A"}, {{"A", "B"}, {"A", "C"}, {"B", "D"}, {"C", "D"}});
    CHECK(l.find("A")->rank == 0);
    CHECK(l.find("B")->rank == 1);
    CHECK(l.find("C")->rank == 1);
    CHECK(l.find("D")->rank == 2);
    CHECK(l.find("B")->order == 0);
    CHECK(l.find("C")->order == 1);
    CHECK(l.rank_count() == 3);
    check_layout_invariants(l);
    CHECK(count_crossings(l) == 0);
  }

  TEST_CASE("isolated nodes sit on rank 0") {
    auto l = layered_layout({"A", "B", "Z"}, {{"A", "B"}});
    CHECK(l.find("Z")->rank == 0);
  }

  TEST_CASE("long edges get one bend per skipped rank") {
    auto l = layered_layout({"A", "B", "C", "D"}, {{"A", "B"}, {"B", "C"}, {"C", "D"}, {"A", "D"}});
    for (const auto& e : l.edges)
      if (e.from == "A" && e.to == "D") CHECK(e.bends.size() == 2);
    check_layout_invariants(l);
  }

  TEST_CASE("cycles are rejected") {
    try {
      layered_layout({"A", "B", "C"}, {{"A", "B"}, {"B", "C"}, {"C", "A"}});
      FAIL("expected a cycle error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Cycle);
    }
  }

  TEST_CASE("causal graph overload layers undirected edges along a topological order") {
    auto g = make_graph("g", {"A", "B", "C"}, {{"A", "B"}}, "C");
    g.edges.push_back({"B", "C", false, {graph::EdgeSource::PC}, {}, {}});
    auto l = layered_layout(g);
    CHECK(l.find("C")->rank == 2);
    for (const auto& e : l.edges) CHECK_FALSE(e.reversed);
  }

  TEST_CASE("reversed flags follow the ranks of cause and effect") {
    SuperLayout s = build_supergraph({make_graph("a", {"X", "Y", "Z"}, {{"X", "Y"}, {"X", "Z"}, {"Y", "Z"}}, "Z"),
                                      make_graph("b", {"X", "Y", "Z"}, {{"X", "Y"}, {"X", "Z"}, {"Y", "Z"}}, "Z"),
                                      make_graph("c", {"X", "Y", "Z"}, {{"X", "Y"}, {"X", "Z"}, {"Z", "Y"}}, "Y")});
    auto c = extract_subgraph(s, "c");
    bool saw = false;
    for (const auto& e : c.edges)
      if (e.from == "Z" && e.to == "Y") {
        CHECK(e.reversed);
        saw = true;
      }
    CHECK(saw);
    check_layout_invariants(c);
  }

  TEST_CASE("random corpus: invariants, determinism and crossing reduction") {
    std::mt19937_64 rng(2024);
    long improved = 0;
    for (int t = 0; t < 50; ++t) {
      int n = std::uniform_int_distribution<int>(5, 14)(rng);
      auto d = testing::random_dag(rng, n, 0.3);
      auto l = layered_layout(d.nodes, d.edges);
      check_layout_invariants(l);
      auto again = layered_layout(d.nodes, d.edges);
      CHECK(xs(again) == xs(l));
      CHECK(count_crossings(l) == brute_force_crossings(l));

      LayoutOptions initial;
      initial.sweeps = 0;
      auto base = layered_layout(d.nodes, d.edges, initial);
      CHECK(count_crossings(base) == brute_force_crossings(base));
      CHECK(brute_force_crossings(l) <= brute_force_crossings(base));
      if (brute_force_crossings(l) < brute_force_crossings(base)) ++improved;
    }
    CHECK(improved > 0);
  }
}

TEST_SUITE("supergraph") {
  TEST_CASE("shared outcome node") {
    auto s = build_supergraph({make_graph("a", {"Age", "Income score"}, {{"Age", "Income score"}}, "Income score"),
                               make_graph("b", {"Income score", "Health"}, {{"Income score", "Health"}}, "Health")});
    CHECK(s.find("Income score")->membership == std::vector<std::string>{"a", "b"});
    CHECK(s.find("Age")->membership.size() == 1);
  }

  TEST_CASE("disjoint graphs") {
    auto s = build_supergraph(
        {make_graph("a", {"A", "B"}, {{"A", "B"}}, "B"), make_graph("b", {"C", "D"}, {{"C", "D"}}, "D")});
    CHECK(s.nodes.size() == 4);
    for (const auto& n : s.nodes) CHECK(n.membership.size() == 1);
    check_layout_invariants(s.layout);
  }

  TEST_CASE("three-outcome fixture") {
    std::vector<CausalGraph> gs{load_fixture("income"), load_fixture("health"), load_fixture("cognition")};
    auto s = build_supergraph(gs);
    std::set<std::string> expected;
    for (const auto& g : gs) expected.insert(g.nodes.begin(), g.nodes.end());
    CHECK(s.nodes.size() == expected.size());
    CHECK(s.layout.nodes.size() == expected.size());
    int shared = 0;
    for (const auto& n : s.nodes) shared += n.shared();
    CHECK(shared >= 3);

    std::set<std::string> recovered;
    for (const auto& g : gs) {
      auto sub = extract_subgraph(s, g.id);
      check_layout_invariants(sub);
      CHECK(sub.nodes.size() == g.nodes.size());
      for (const auto& n : sub.nodes) {
        recovered.insert(n.name);
        CHECK(n.x == s.layout.find(n.name)->x);
        CHECK(n.rank == s.layout.find(n.name)->rank);
      }
      CHECK(sub.edges.size() == g.edges.size());
      for (const auto& e : sub.edges) CHECK(g.find_pair(e.from, e.to) != nullptr);
    }
    CHECK(recovered == expected);
  }

  TEST_CASE("direction conflicts keep per-owner records") {
    auto s = build_supergraph({make_graph("a", {"X", "Y"}, {{"X", "Y"}}, "Y"),
                               make_graph("b", {"X", "Y"}, {{"X", "Y"}}, "Y"),
                               make_graph("c", {"X", "Y"}, {{"Y", "X"}}, "X")});
    CHECK(s.edges.size() == 3);
    REQUIRE(s.layout.edges.size() == 1);
    CHECK(s.layout.edges[0].from == "X");
    auto c = owned_edges(s, "c");
    REQUIRE(c.size() == 1);
    CHECK(c[0].from == "Y");
  }

  TEST_CASE("tied directions favour the smaller source") {
    auto s = build_supergraph(
        {make_graph("a", {"X", "Y"}, {{"Y", "X"}}, "X"), make_graph("b", {"X", "Y"}, {{"X", "Y"}}, "Y")});
    REQUIRE(s.layout.edges.size() == 1);
    CHECK(s.layout.edges[0].from == "X");
  }

  TEST_CASE("errors") {
    auto g = make_graph("a", {"A", "B"}, {{"A", "B"}}, "B");
    CHECK_THROWS_AS(build_supergraph({g}), Error);
    CHECK_THROWS_AS(build_supergraph({g, g}), Error);
    auto s = build_supergraph({g, make_graph("b", {"A", "C"}, {{"A", "C"}}, "C")});
    try {
      extract_subgraph(s, "zzz");
      FAIL("expected not found");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotFound);
    }
  }
}

TEST_SUITE("compress") {
  const std::vector<std::string> both{"G1", "G2"};

  SuperLayout golden() {
    return hand_super({"G1", "G2"}, {{"S1", 0, 2, both},
                                     {"S2", 1, 4, both},
                                     {"S3", 1, 7, both},
                                     {"S4", 2, 7, both},
                                     {"S5", 2, 12, both},
                                     {"U1", 0, 0, {"G1"}},
                                     {"U2", 1, 5, {"G1"}},
                                     {"U3", 2, 6, {"G1"}},
                                     {"V1", 0, 9, {"G2"}},
                                     {"V2", 1, 14, {"G2"}}});
  }

  TEST_CASE("golden trace") {
    auto c = compress(golden());
    CHECK_FALSE(c.fallback);
    CHECK(c.anchor_source == std::vector<double>{2, 4, 7, 12});
    CHECK(c.anchor_target == std::vector<double>{2, 3, 4, 5});

    std::map<std::string, double> g1{{"S1", 2},      {"S2", 3},      {"S3", 4}, {"S4", 4}, {"S5", 5},
                                     {"U1", 1},      {"U2", 10.0 / 3}, {"U3", 11.0 / 3}};
    std::map<std::string, double> g2{{"S1", 2}, {"S2", 3}, {"S3", 4}, {"S4", 4}, {"S5", 5}, {"V1", 4.5}, {"V2", 6}};
    auto a = xs(c.find("G1")->layout);
    auto b = xs(c.find("G2")->layout);
    REQUIRE(a.size() == g1.size());
    REQUIRE(b.size() == g2.size());
    for (auto& [n, x] : g1) CHECK(a[n] == doctest::Approx(x).epsilon(1e-12));
    for (auto& [n, x] : g2) CHECK(b[n] == doctest::Approx(x).epsilon(1e-12));
    CHECK(c.find("G1")->delta.at("U1") == doctest::Approx(1.0));
    CHECK(c.find("G2")->delta.at("V2") == doctest::Approx(-8.0));
  }

  TEST_CASE("anchor outputs start at the smallest anchor") {
    auto s = hand_super({"a", "b"}, {{"P", 0, 2.5, {"a", "b"}}, {"Q", 1, 7.0, {"a", "b"}}, {"R", 2, 11.0, {"a", "b"}}});
    auto c = compress(s);
    CHECK(c.anchor_target == std::vector<double>{2.5, 3.5, 4.5});
  }

  TEST_CASE("single gap node lands on the midpoint") {
    auto s = hand_super({"a", "b"}, {{"P", 0, 0, {"a", "b"}}, {"Q", 0, 10, {"a", "b"}}, {"M", 1, 3, {"a"}}});
    auto c = compress(s);
    CHECK(xs(c.find("a")->layout)["M"] == doctest::Approx(0.5));
  }

  TEST_CASE("unique nodes on an anchor column share its output") {
    auto s = hand_super({"a", "b"}, {{"P", 0, 2, {"a", "b"}}, {"Q", 0, 6, {"a", "b"}}, {"M", 1, 6, {"a"}}});
    CHECK(xs(compress(s).find("a")->layout)["M"] == doctest::Approx(3.0));
  }

  TEST_CASE("no shared nodes falls back to per-subgraph packing") {
    auto s = hand_super({"a", "b"}, {{"A", 0, 0, {"a"}}, {"B", 1, 3, {"a"}}, {"C", 0, 7, {"b"}}, {"D", 1, 9, {"b"}}});
    auto c = compress(s);
    CHECK(c.fallback);
    CHECK(xs(c.find("a")->layout) == std::map<std::string, double>{{"A", 0}, {"B", 1}});
    CHECK(xs(c.find("b")->layout) == std::map<std::string, double>{{"C", 0}, {"D", 1}});
  }

  TEST_CASE("random instances keep orders and anchors") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      auto s = build_supergraph(testing::multi_outcome_instance(seed));
      auto c = compress(s);
      std::map<std::string, double> anchor;
      for (const auto& sub : c.subgraphs) {
        const auto before = rank_sequences(extract_subgraph(s, sub.graph_id));
        CHECK(rank_sequences(sub.layout) == before);
        for (const auto& n : sub.layout.nodes) {
          CHECK(n.rank == s.layout.find(n.name)->rank);
          CHECK(n.y == s.layout.find(n.name)->y);
          if (!s.find(n.name)->shared()) continue;
          auto [it, fresh] = anchor.emplace(n.name, n.x);
          if (!fresh) CHECK(it->second == n.x);
        }
      }
      std::set<double> used;
      for (auto& [name, x] : anchor) used.insert(x);
      std::vector<double> v(used.begin(), used.end());
      for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] - v[i - 1] == doctest::Approx(1.0));
    }
  }

  TEST_CASE("compressing a compressed layout keeps orders") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      auto s = build_supergraph(testing::multi_outcome_instance(seed));
      auto c = compress(s);
      SuperLayout again = s;
      for (const auto& sub : c.subgraphs)
        for (const auto& n : sub.layout.nodes)
          for (auto& p : again.layout.nodes)
            if (p.name == n.name) p.x = n.x;
      auto c2 = compress(again);
      for (const auto& sub : c2.subgraphs)
        CHECK(rank_sequences(sub.layout) == rank_sequences(c.find(sub.graph_id)->layout));
    }
  }
}

TEST_SUITE("stress") {
  const std::vector<graph::NamePair> path{{"A", "B"}, {"B", "C"}};

  TEST_CASE("exact path has zero stress") {
    CHECK(stress_x({{"A", 0}, {"B", 1}, {"C", 2}}, path) == 0.0);
    CHECK(stress_x({{"A", 0}, {"B", 2}, {"C", 4}}, path, 2.0) == 0.0);
  }

  TEST_CASE("collapsed end") {
    CHECK(stress_x({{"A", 0}, {"B", 1}, {"C", 1}}, path) == doctest::Approx(1.25));
    CHECK(stress_x({{"A", 0}, {"B", 3}, {"C", 3}}, path, 3.0) == doctest::Approx(1.25 * 9));
  }

  TEST_CASE("isolated node adds nothing") {
    CHECK(stress_x({{"A", 0}, {"B", 1}, {"C", 1}, {"Z", 40}}, path) == doctest::Approx(1.25));
  }

  TEST_CASE("disconnected components are summed") {
    std::vector<graph::NamePair> two{{"A", "B"}, {"B", "C"}, {"P", "Q"}};
    CHECK(stress_x({{"A", 0}, {"B", 1}, {"C", 1}, {"P", 0}, {"Q", 3}}, two) == doctest::Approx(1.25 + 4));
  }

  TEST_CASE("fixture subgraphs are not worse after compression") {
    std::vector<CausalGraph> gs{load_fixture("income"), load_fixture("health"), load_fixture("cognition")};
    auto s = build_supergraph(gs);
    auto report = stress_report(s, compress(s));
    REQUIRE(report.size() == 3);
    for (const auto& row : report) {
      CHECK(std::isfinite(row.extracted));
      CHECK(row.compressed >= 0);
      CHECK(row.compressed <= row.extracted);
    }
  }
}

TEST_SUITE("export") {
  TEST_CASE("graph json carries layout and reversed flags") {
    auto g = load_fixture("health");
    auto l = layered_layout(g);
    auto doc = graph_with_layout(g, l);
    CHECK(doc["layout"].size() == g.nodes.size());
    for (const auto& n : g.nodes) {
      CHECK(doc["layout"][n].contains("rank"));
      CHECK(doc["layout"][n].contains("x"));
    }
    for (const auto& e : doc["edges"]) CHECK(e.contains("reversed"));
    auto back = graph::graph_from_json(doc);
    CHECK(back.nodes == g.nodes);
  }

  TEST_CASE("svg marks every node once") {
    auto g = load_fixture("income");
    g.edges[0].effect = graph::make_effect(-0.8);
    auto svg = to_svg(layered_layout(g), &g, {90, 16, "A & B <test>"});
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\"") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("A &amp; B &lt;test&gt;") != std::string::npos);
    std::size_t groups = 0;
    for (auto pos = svg.find("class=\"node\""); pos != std::string::npos; pos = svg.find("class=\"node\"", pos + 1))
      ++groups;
    CHECK(groups == g.nodes.size());
    for (const auto& n : g.nodes) {
      const std::string needle = "id=\"node-" + n + "\"";
      std::size_t count = 0;
      for (auto pos = svg.find(needle); pos != std::string::npos; pos = svg.find(needle, pos + 1)) ++count;
      CHECK(count == 1);
    }
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
    CHECK(svg.find("polygon") != std::string::npos);
  }

  TEST_CASE("dot pins positions") {
    auto g = load_fixture("cognition");
    auto dot = to_dot(layered_layout(g), &g, "cognition");
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("pos=") != std::string::npos);
  }
}
