#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dataset/dataset.hpp"
#include "discovery/ci_test.hpp"
#include "discovery/pdag.hpp"

namespace mocg::discovery {

// Undirected skeleton over local indices 0..k-1 plus the separating set found
// for every removed pair.
struct Skeleton {
  std::vector<std::size_t> columns;  // dataset column per local index
  std::vector<std::set<std::size_t>> adjacent;
  std::map<Edge, std::vector<std::size_t>> sepsets;  // key: unordered local pair
  std::size_t tests = 0;
  std::size_t degenerate_tests = 0;

  bool adjacent_pair(std::size_t a, std::size_t b) const { return adjacent[a].count(b) > 0; }
};

// Level-wise edge removal with adjacency sets frozen per level (PC-stable).
// Degenerate tests never remove an edge.
Skeleton pc_stable_skeleton(const CiTester& tester, std::span<const std::size_t> columns, double alpha);

// Orients x -> z <- y for every unshielded triple whose separating set misses z.
// Returns the directed edges; pairs already oriented the other way are left alone.
EdgeSet orient_colliders(const Skeleton& skeleton);

// Meek orientation rules 1-3, applied until nothing changes. Never introduces a directed cycle.
void apply_meek_rules(Pdag& g);

// Full PC: stable skeleton, colliders, Meek propagation. Variables are
// processed in name order, so the result does not depend on the order of `vars`.
Pdag run_pc(const dataset::MixedDataset& ds, const std::vector<std::string>& vars, double alpha);

}  // namespace mocg::discovery
