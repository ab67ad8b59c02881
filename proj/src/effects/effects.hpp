#pragma once

#include <set>
#include <string>
#include <vector>

#include "dataset/dataset.hpp"
#include "graph/causal_graph.hpp"

namespace mocg::effects {

// d-separation of xs and ys given zs over the directed edges of g
// (ancestral moral graph criterion).
bool d_separated(const graph::CausalGraph& g, const std::set<std::string>& xs, const std::set<std::string>& ys,
                 const std::set<std::string>& zs);

// Whether zs satisfies the backdoor criterion for (x, y): no descendant of x,
// and x is d-separated from y given zs once x's outgoing edges are removed.
bool satisfies_backdoor(const graph::CausalGraph& g, const std::string& x, const std::string& y,
                        const std::set<std::string>& zs);

// parents(x), checked against the backdoor criterion.
std::vector<std::string> backdoor_set(const graph::CausalGraph& g, const std::string& x, const std::string& y);

// OLS of `to` on `from` plus the backdoor set; categorical regressors are
// one-hot coded against their first category. A categorical outcome is
// regressed on its category index.
graph::EdgeEffect estimate_effect(const dataset::MixedDataset& ds, const graph::CausalGraph& g,
                                  const std::string& from, const std::string& to);

// Estimates every directed edge in place; failures are recorded on the edge.
void estimate_all(const dataset::MixedDataset& ds, graph::CausalGraph& g);

}  // namespace mocg::effects
