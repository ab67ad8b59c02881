#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graph/causal_graph.hpp"
#include "json.hpp"

namespace mocg::service {

enum class EditKind { AddNode, RemoveNode, AddEdge, DeleteEdge, ReverseEdge };
const char* to_string(EditKind k);
EditKind parse_edit_kind(std::string_view text);

struct EditOp {
  EditKind kind = EditKind::AddNode;
  std::vector<std::string> payload;  // one name for node edits, (from, to) for edges
  std::int64_t base_version = 0;
};

// Reads {kind, payload: [...], base_version}.
EditOp edit_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const EditOp& op);

// Returns the edited graph with version + 1 and cleared effect estimates.
// Errors: Conflict on a stale base_version, Cycle when an added or reversed
// edge would close a directed cycle (detail names it), NotFound for missing
// nodes or edges, InvalidArgument for malformed payloads.
//
// AddEdge on a pair that is currently undirected orients it.
graph::CausalGraph apply_edit(const graph::CausalGraph& g, const EditOp& op);

}  // namespace mocg::service
