#include "discovery/pc.hpp"

#include <algorithm>
#include <numeric>

#include "common/error.hpp"

namespace mocg::discovery {

namespace {

// Calls fn on each size-k subset of items in lexicographic order until fn returns true.
template <typename Fn>
bool for_each_subset(const std::vector<std::size_t>& items, std::size_t k, Fn&& fn) {
  if (k > items.size()) return false;
  std::vector<std::size_t> pick(k);
  std::iota(pick.begin(), pick.end(), 0);
  std::vector<std::size_t> subset(k);
  while (true) {
    for (std::size_t t = 0; t < k; ++t) subset[t] = items[pick[t]];
    if (fn(subset)) return true;
    std::size_t t = k;
    while (t > 0 && pick[t - 1] == items.size() - k + (t - 1)) --t;
    if (t == 0) return false;
    ++pick[t - 1];
    for (std::size_t u = t; u < k; ++u) pick[u] = pick[u - 1] + 1;
  }
}

bool creates_cycle(const Pdag& g, std::size_t from, std::size_t to) {
  return reachable(g.nodes.size(), g.directed, to, from);
}

bool orient(Pdag& g, std::size_t from, std::size_t to) {
  if (!g.has_undirected(from, to)) return false;
  if (creates_cycle(g, from, to)) return false;
  g.undirected.erase(unordered(from, to));
  g.directed.insert({from, to});
  return true;
}

}  // namespace

Skeleton pc_stable_skeleton(const CiTester& tester, std::span<const std::size_t> columns, double alpha) {
  if (!(alpha > 0 && alpha < 1)) fail(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  Skeleton sk;
  sk.columns.assign(columns.begin(), columns.end());
  const std::size_t k = columns.size();
  sk.adjacent.assign(k, {});
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      if (a != b) sk.adjacent[a].insert(b);

  for (std::size_t level = 0;; ++level) {
    const auto frozen = sk.adjacent;
    bool tested = false;
    for (std::size_t x = 0; x < k; ++x) {
      for (auto y : frozen[x]) {
        if (!sk.adjacent[x].count(y)) continue;
        std::vector<std::size_t> candidates;
        for (auto c : frozen[x])
          if (c != y) candidates.push_back(c);
        if (candidates.size() < level) continue;
        tested = true;
        const auto lo = std::min(x, y), hi = std::max(x, y);
        for_each_subset(candidates, level, [&](const std::vector<std::size_t>& subset) {
          std::vector<std::size_t> given;
          for (auto s : subset) given.push_back(sk.columns[s]);
          const auto r = tester.test(sk.columns[lo], sk.columns[hi], given);
          ++sk.tests;
          if (r.degenerate) {
            ++sk.degenerate_tests;
            return false;
          }
          if (r.p_value > alpha) {
            sk.adjacent[x].erase(y);
            sk.adjacent[y].erase(x);
            sk.sepsets[unordered(x, y)] = subset;
            return true;
          }
          return false;
        });
      }
    }
    if (!tested) break;
  }
  return sk;
}

EdgeSet orient_colliders(const Skeleton& sk) {
  const std::size_t k = sk.adjacent.size();
  EdgeSet directed;
  auto has_arrow = [&](std::size_t a, std::size_t b) { return directed.count({a, b}) > 0; };
  for (std::size_t x = 0; x < k; ++x) {
    for (std::size_t y = x + 1; y < k; ++y) {
      if (sk.adjacent_pair(x, y)) continue;
      const auto sep_it = sk.sepsets.find({x, y});
      const std::vector<std::size_t> empty;
      const auto& sep = sep_it == sk.sepsets.end() ? empty : sep_it->second;
      for (auto z : sk.adjacent[x]) {
        if (!sk.adjacent[y].count(z)) continue;
        if (std::find(sep.begin(), sep.end(), z) != sep.end()) continue;
        for (auto end : {x, y}) {
          if (has_arrow(z, end)) continue;  // conflicting collider; first orientation wins
          EdgeSet trial = directed;
          trial.insert({end, z});
          if (is_acyclic(k, trial)) directed = std::move(trial);
        }
      }
    }
  }
  return directed;
}

void apply_meek_rules(Pdag& g) {
  const std::size_t n = g.nodes.size();
  bool changed = true;
  while (changed) {
    changed = false;
    const auto undirected = g.undirected;
    for (const auto& [u, v] : undirected) {
      if (!g.has_undirected(u, v)) continue;
      for (auto [b, c] : {Edge{u, v}, Edge{v, u}}) {
        // Rule 1: a -> b - c, a and c nonadjacent  =>  b -> c
        bool fire = false;
        for (std::size_t a = 0; a < n && !fire; ++a)
          fire = a != c && g.has_directed(a, b) && !g.adjacent(a, c);
        // Rule 2: b -> m -> c with b - c  =>  b -> c
        for (std::size_t m = 0; m < n && !fire; ++m)
          fire = g.has_directed(b, m) && g.has_directed(m, c);
        // Rule 3: b - p, b - q, p -> c, q -> c, p and q nonadjacent  =>  b -> c
        for (std::size_t p = 0; p < n && !fire; ++p) {
          if (p == c || !g.has_undirected(b, p) || !g.has_directed(p, c)) continue;
          for (std::size_t q = p + 1; q < n && !fire; ++q)
            fire = q != c && g.has_undirected(b, q) && g.has_directed(q, c) && !g.adjacent(p, q);
        }
        if (fire && orient(g, b, c)) {
          changed = true;
          break;
        }
      }
    }
  }
}

Pdag run_pc(const dataset::MixedDataset& ds, const std::vector<std::string>& vars, double alpha) {
  if (vars.size() < 2) fail(ErrorCode::InvalidArgument, "PC needs at least 2 variables");
  std::vector<std::string> sorted = vars;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    fail(ErrorCode::InvalidArgument, "duplicate variable in selection");
  const auto columns = ds.indices_of(sorted);

  const CiTester tester(ds);
  const Skeleton sk = pc_stable_skeleton(tester, columns, alpha);

  Pdag local;
  local.nodes = sorted;
  for (std::size_t a = 0; a < sorted.size(); ++a)
    for (auto b : sk.adjacent[a])
      if (a < b) local.undirected.insert({a, b});
  for (const auto& [from, to] : orient_colliders(sk)) {
    local.undirected.erase(unordered(from, to));
    local.directed.insert({from, to});
  }
  apply_meek_rules(local);

  // Map back to the caller's variable order.
  std::vector<std::size_t> position(sorted.size());
  for (std::size_t a = 0; a < sorted.size(); ++a)
    position[a] = static_cast<std::size_t>(std::find(vars.begin(), vars.end(), sorted[a]) - vars.begin());
  Pdag out;
  out.nodes = vars;
  for (const auto& [a, b] : local.directed) out.directed.insert({position[a], position[b]});
  for (const auto& [a, b] : local.undirected) out.undirected.insert(unordered(position[a], position[b]));
  out.validate();
  return out;
}

}  // namespace mocg::discovery
