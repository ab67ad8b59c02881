#include "effects/effects.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "common/error.hpp"
#include "stats/regression.hpp"

namespace mocg::effects {

using graph::CausalGraph;

namespace {

std::set<std::string> ancestors_of(const CausalGraph& g, const std::set<std::string>& seeds) {
  std::set<std::string> out = seeds;
  std::vector<std::string> stack(seeds.begin(), seeds.end());
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (const auto& p : g.parents(v))
      if (out.insert(p).second) stack.push_back(p);
  }
  return out;
}

std::set<std::string> descendants_of(const CausalGraph& g, const std::string& x) {
  std::set<std::string> out;
  std::vector<std::string> stack{x};
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (const auto& c : g.children(v))
      if (out.insert(c).second) stack.push_back(c);
  }
  return out;
}

void require_node(const CausalGraph& g, const std::string& v) {
  if (!g.has_node(v)) fail(ErrorCode::NotFound, "unknown node '" + v + "'");
}

}  // namespace

bool d_separated(const CausalGraph& g, const std::set<std::string>& xs, const std::set<std::string>& ys,
                 const std::set<std::string>& zs) {
  std::set<std::string> all = xs;
  all.insert(ys.begin(), ys.end());
  all.insert(zs.begin(), zs.end());
  const auto anc = ancestors_of(g, all);

  std::map<std::string, std::set<std::string>> adj;
  for (const auto& v : anc) {
    const auto ps = g.parents(v);
    for (const auto& p : ps) {
      adj[v].insert(p);
      adj[p].insert(v);
    }
    for (std::size_t a = 0; a < ps.size(); ++a)
      for (std::size_t b = a + 1; b < ps.size(); ++b) {
        adj[ps[a]].insert(ps[b]);
        adj[ps[b]].insert(ps[a]);
      }
  }
  std::set<std::string> seen;
  std::vector<std::string> stack;
  for (const auto& x : xs)
    if (!zs.count(x)) {
      stack.push_back(x);
      seen.insert(x);
    }
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    if (ys.count(v)) return false;
    for (const auto& w : adj[v])
      if (!zs.count(w) && seen.insert(w).second) stack.push_back(w);
  }
  return true;
}

bool satisfies_backdoor(const CausalGraph& g, const std::string& x, const std::string& y,
                        const std::set<std::string>& zs) {
  const auto desc = descendants_of(g, x);
  for (const auto& z : zs)
    if (desc.count(z) || z == x || z == y) return false;
  CausalGraph cut = g;
  cut.edges.erase(std::remove_if(cut.edges.begin(), cut.edges.end(),
                                 [&](const graph::GraphEdge& e) { return e.directed && e.from == x; }),
                  cut.edges.end());
  return d_separated(cut, {x}, {y}, zs);
}

std::vector<std::string> backdoor_set(const CausalGraph& g, const std::string& x, const std::string& y) {
  require_node(g, x);
  require_node(g, y);
  if (x == y) fail(ErrorCode::InvalidArgument, "treatment and outcome must differ");
  if (!g.directed_path(x, y))
    fail(ErrorCode::InvalidArgument, "no directed path from '" + x + "' to '" + y + "'");
  auto zs = g.parents(x);
  if (!satisfies_backdoor(g, x, y, {zs.begin(), zs.end()}))
    fail(ErrorCode::Internal, "parent set of '" + x + "' fails the backdoor criterion");
  return zs;
}

graph::EdgeEffect estimate_effect(const dataset::MixedDataset& ds, const CausalGraph& g, const std::string& from,
                                  const std::string& to) {
  const auto* edge = g.find_pair(from, to);
  if (!edge || !edge->directed || edge->from != from)
    fail(ErrorCode::NotFound, "no directed edge " + from + " -> " + to);
  const auto adjust = backdoor_set(g, from, to);

  const auto x = ds.index_of(from);
  const auto y = ds.index_of(to);
  std::vector<std::size_t> adjust_cols;
  for (const auto& a : adjust) adjust_cols.push_back(ds.index_of(a));

  const auto col = ds.column(x);
  if (col.maxCoeff() == col.minCoeff())
    fail(ErrorCode::Numeric, "treatment '" + from + "' is constant", {{"column", from}});

  const std::size_t xs[] = {x};
  const auto design = stats::concat(stats::design_matrix(ds, xs, true), stats::design_matrix(ds, adjust_cols, false));
  const auto fit = stats::ols(design.X, ds.column(y));
  if (!fit.dependent_columns.empty()) {
    std::vector<std::string> names;
    for (auto c : fit.dependent_columns) names.push_back(design.labels[static_cast<std::size_t>(c)]);
    std::string joined;
    for (const auto& n : names) joined += (joined.empty() ? "" : ", ") + n;
    fail(ErrorCode::Numeric, "singular design: collinear columns " + joined, {{"columns", names}});
  }

  // Treatment columns follow the intercept.
  std::size_t best = 0;
  double best_abs = -1;
  std::size_t treatment_columns = 0;
  for (std::size_t c = 0; c < design.source.size(); ++c) {
    if (design.source[c] != x) continue;
    ++treatment_columns;
    const double a = std::abs(fit.coef[static_cast<Eigen::Index>(c)]);
    if (a > best_abs) {
      best_abs = a;
      best = c;
    }
  }
  auto eff = graph::make_effect(fit.coef[static_cast<Eigen::Index>(best)]);
  eff.standard_error = fit.standard_error[static_cast<Eigen::Index>(best)];
  eff.adjustment_set = adjust;
  if (treatment_columns > 1) eff.contrast = design.labels[best];
  return eff;
}

void estimate_all(const dataset::MixedDataset& ds, CausalGraph& g) {
  for (auto& e : g.edges) {
    e.effect.reset();
    e.effect_error.clear();
    if (!e.directed) continue;
    try {
      e.effect = estimate_effect(ds, g, e.from, e.to);
    } catch (const Error& err) {
      e.effect_error = err.what();
    }
  }
}

}  // namespace mocg::effects
