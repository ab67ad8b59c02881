#include "service/edits.hpp"

#include <algorithm>

#include "common/error.hpp"

namespace mocg::service {

using graph::CausalGraph;
using graph::EdgeSource;
using graph::GraphEdge;

const char* to_string(EditKind k) {
  switch (k) {
    case EditKind::AddNode: return "AddNode";
    case EditKind::RemoveNode: return "RemoveNode";
    case EditKind::AddEdge: return "AddEdge";
    case EditKind::DeleteEdge: return "DeleteEdge";
    case EditKind::ReverseEdge: return "ReverseEdge";
  }
  return "AddNode";
}

EditKind parse_edit_kind(std::string_view text) {
  for (auto k : {EditKind::AddNode, EditKind::RemoveNode, EditKind::AddEdge, EditKind::DeleteEdge, EditKind::ReverseEdge})
    if (text == to_string(k)) return k;
  fail(ErrorCode::InvalidArgument, "unknown edit kind '" + std::string(text) + "'", {{"kind", text}});
}

EditOp edit_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) fail(ErrorCode::InvalidArgument, "edit must be an object");
  EditOp op;
  try {
    op.kind = parse_edit_kind(doc.at("kind").get<std::string>());
    op.payload = doc.at("payload").get<std::vector<std::string>>();
    op.base_version = doc.at("base_version").get<std::int64_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed edit: ") + e.what());
  }
  return op;
}

nlohmann::json to_json(const EditOp& op) {
  return {{"kind", to_string(op.kind)}, {"payload", op.payload}, {"base_version", op.base_version}};
}

namespace {

void require_node(const CausalGraph& g, const std::string& name) {
  if (!g.has_node(name)) fail(ErrorCode::NotFound, "unknown node '" + name + "'", {{"node", name}});
}

// Rejects from -> to if to already reaches from.
void check_no_cycle(const CausalGraph& g, const std::string& from, const std::string& to) {
  if (auto path = g.directed_path(to, from)) {
    auto cycle = *path;
    cycle.push_back(to);
    fail(ErrorCode::Cycle, "edge " + from + " -> " + to + " would create a cycle", {{"cycle", cycle}});
  }
}

void remove_pair(CausalGraph& g, const std::string& a, const std::string& b) {
  auto& es = g.edges;
  es.erase(std::remove_if(es.begin(), es.end(),
                          [&](const GraphEdge& e) { return (e.from == a && e.to == b) || (e.from == b && e.to == a); }),
           es.end());
}

}  // namespace

CausalGraph apply_edit(const CausalGraph& g, const EditOp& op) {
  if (op.base_version != g.version)
    fail(ErrorCode::Conflict, "graph version is " + std::to_string(g.version),
         {{"current_version", g.version}, {"base_version", op.base_version}});
  std::size_t arity = (op.kind == EditKind::AddNode || op.kind == EditKind::RemoveNode) ? 1 : 2;
  if (op.payload.size() != arity)
    fail(ErrorCode::InvalidArgument, std::string(to_string(op.kind)) + " takes " + std::to_string(arity) + " name(s)",
         {{"payload", op.payload}});
  for (const auto& name : op.payload)
    if (name.empty()) fail(ErrorCode::InvalidArgument, "empty node name");

  CausalGraph out = g;
  switch (op.kind) {
    case EditKind::AddNode: {
      const auto& name = op.payload[0];
      if (g.has_node(name)) fail(ErrorCode::InvalidArgument, "node '" + name + "' already exists", {{"node", name}});
      out.nodes.push_back(name);
      break;
    }
    case EditKind::RemoveNode: {
      const auto& name = op.payload[0];
      require_node(g, name);
      if (name == g.outcome) fail(ErrorCode::InvalidArgument, "cannot remove the outcome", {{"node", name}});
      out.nodes.erase(std::find(out.nodes.begin(), out.nodes.end(), name));
      auto touches = [&](const std::string& a, const std::string& b) { return a == name || b == name; };
      out.edges.erase(std::remove_if(out.edges.begin(), out.edges.end(),
                                     [&](const GraphEdge& e) { return touches(e.from, e.to); }),
                      out.edges.end());
      for (auto& [_, pairs] : out.overlays)
        pairs.erase(std::remove_if(pairs.begin(), pairs.end(),
                                   [&](const graph::NamePair& p) { return touches(p.first, p.second); }),
                    pairs.end());
      break;
    }
    case EditKind::AddEdge: {
      const auto& from = op.payload[0];
      const auto& to = op.payload[1];
      require_node(g, from);
      require_node(g, to);
      if (from == to) fail(ErrorCode::InvalidArgument, "self-loop on '" + from + "'");
      std::set<EdgeSource> sources{EdgeSource::User};
      if (const auto* existing = g.find_pair(from, to)) {
        if (existing->directed)
          fail(ErrorCode::InvalidArgument, "edge between '" + from + "' and '" + to + "' already exists",
               {{"from", existing->from}, {"to", existing->to}});
        sources.insert(existing->sources.begin(), existing->sources.end());
        remove_pair(out, from, to);
      }
      check_no_cycle(out, from, to);
      out.edges.push_back({from, to, true, sources, std::nullopt, {}});
      break;
    }
    case EditKind::DeleteEdge: {
      const auto& a = op.payload[0];
      const auto& b = op.payload[1];
      const auto* e = g.find_pair(a, b);
      if (!e || (e->directed && e->from != a))
        fail(ErrorCode::NotFound, "no edge " + a + " -> " + b, {{"from", a}, {"to", b}});
      remove_pair(out, a, b);
      break;
    }
    case EditKind::ReverseEdge: {
      const auto& from = op.payload[0];
      const auto& to = op.payload[1];
      const auto* e = g.find_pair(from, to);
      if (!e || !e->directed || e->from != from)
        fail(ErrorCode::NotFound, "no directed edge " + from + " -> " + to, {{"from", from}, {"to", to}});
      auto sources = e->sources;
      sources.insert(EdgeSource::User);
      remove_pair(out, from, to);
      check_no_cycle(out, to, from);
      out.edges.push_back({to, from, true, sources, std::nullopt, {}});
      break;
    }
  }
  for (auto& e : out.edges) {
    e.effect.reset();
    e.effect_error.clear();
  }
  out.version = g.version + 1;
  return out;
}

}  // namespace mocg::service
