#pragma once

#include <optional>
#include <string>

#include "discovery/snapshot.hpp"
#include "graph/causal_graph.hpp"

namespace mocg::graph {

// "pc", "continuous" or "hybrid"; throws InvalidArgument otherwise.
EdgeSource algorithm_source(const std::string& algorithm);

// Graph whose edges come from one algorithm's result. The other algorithms'
// results become overlays and add their source tag to shared pairs. Empty
// when the chosen result is not in the snapshot. id and effects are unset.
std::optional<CausalGraph> graph_from_snapshot(const discovery::DiscoverySnapshot& s, const std::string& dataset_id,
                                               const std::string& outcome, const std::string& algorithm);

}  // namespace mocg::graph
