#include "discovery/hybrid.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "common/error.hpp"
#include "discovery/ci_test.hpp"
#include "discovery/pc.hpp"
#include "stats/regression.hpp"

namespace mocg::discovery {

bool local_score(const dataset::MixedDataset& ds, std::size_t node, const std::vector<std::size_t>& parents,
                 double lambda, double* score) {
  const auto design = stats::design_matrix(ds, parents, true);
  const auto& spec = ds.variable(node);
  if (!spec.categorical()) {
    const auto fit = stats::ols(design.X, ds.column(node));
    // Coefficients plus the residual variance.
    const double params = static_cast<double>(fit.rank) + 1.0;
    *score = stats::gaussian_log_likelihood(fit.rss, ds.row_count()) - lambda * params;
    return true;
  }
  std::vector<int> labels(ds.row_count());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(ds.values()(i, node));
  const auto fit = stats::multinomial_logit(design.X, labels, static_cast<int>(spec.category_count()));
  if (!fit.converged) return false;
  *score = fit.log_likelihood - lambda * static_cast<double>(fit.parameters);
  return true;
}

namespace {

class Scorer {
 public:
  Scorer(const dataset::MixedDataset& ds, const std::vector<std::size_t>& columns, double lambda)
      : ds_(ds), columns_(columns), lambda_(lambda) {}

  // Local score of local node `v` with local parents taken from `edges`,
  // optionally with one extra parent. nullopt when the fit did not converge.
  std::optional<double> node(std::size_t v, std::vector<std::size_t> parents) {
    std::sort(parents.begin(), parents.end());
    const auto key = std::make_pair(v, parents);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    std::vector<std::size_t> cols;
    for (auto p : parents) cols.push_back(columns_[p]);
    double s = 0;
    std::optional<double> out;
    ++evaluations_;
    if (local_score(ds_, columns_[v], cols, lambda_, &s)) out = s;
    cache_[key] = out;
    return out;
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  const dataset::MixedDataset& ds_;
  const std::vector<std::size_t>& columns_;
  double lambda_;
  std::map<std::pair<std::size_t, std::vector<std::size_t>>, std::optional<double>> cache_;
  std::size_t evaluations_ = 0;
};

std::vector<std::size_t> parents_of(const EdgeSet& edges, std::size_t v) {
  std::vector<std::size_t> out;
  for (const auto& [a, b] : edges)
    if (b == v) out.push_back(a);
  return out;
}

}  // namespace

HybridResult run_hybrid(const dataset::MixedDataset& ds, const std::vector<std::string>& vars,
                        const HybridConfig& config) {
  if (vars.size() < 2) fail(ErrorCode::InvalidArgument, "hybrid learner needs at least 2 variables");
  const auto columns = ds.indices_of(vars);
  {
    auto sorted = columns;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      fail(ErrorCode::InvalidArgument, "duplicate variable in selection");
  }
  const double lambda = config.lambda > 0 ? config.lambda : std::log(static_cast<double>(ds.row_count())) / 2.0;
  const std::size_t k = columns.size();

  HybridResult result;
  result.nodes = vars;
  CiTester tester(ds);
  const auto sk = pc_stable_skeleton(tester, columns, config.alpha);
  result.ci_tests = sk.tests;

  // Seed with the collider orientations implied by the separating sets; a
  // single-edge greedy search cannot reach a v-structure from an empty start.
  EdgeSet edges = orient_colliders(sk);
  EdgeSet pending;
  for (std::size_t a = 0; a < k; ++a)
    for (auto b : sk.adjacent[a])
      if (a < b && !edges.count({a, b}) && !edges.count({b, a})) pending.insert({a, b});

  Scorer scorer(ds, columns, lambda);
  auto gain_of = [&](std::size_t from, std::size_t to, const EdgeSet& base,
                     std::optional<Edge> removed) -> std::optional<double> {
    // Change in total score from adding from->to to `base` (after removing `removed`).
    EdgeSet g = base;
    if (removed) g.erase(*removed);
    double delta = 0;
    if (removed) {
      const auto before_child = scorer.node(removed->second, parents_of(base, removed->second));
      const auto after_child = scorer.node(removed->second, parents_of(g, removed->second));
      if (!before_child || !after_child) return std::nullopt;
      delta += *after_child - *before_child;
    }
    const auto before = scorer.node(to, parents_of(g, to));
    auto with = parents_of(g, to);
    with.push_back(from);
    const auto after = scorer.node(to, with);
    if (!before || !after) return std::nullopt;
    return delta + *after - *before;
  };
  auto note_skip = [&](std::size_t from, std::size_t to) {
    result.diagnostics.push_back("skipped " + vars[from] + " -> " + vars[to] +
                                 ": logistic fit did not converge");
  };

  for (std::size_t guard = 0; guard < 10 * k * k + 10; ++guard) {
    struct Move {
      double gain;
      Edge add;
      std::optional<Edge> remove;
    };
    std::optional<Move> best;
    auto consider = [&](Move m) {
      if (!best || m.gain > best->gain || (m.gain == best->gain && m.add < best->add)) best = m;
    };

    for (const auto& [a, b] : pending) {
      for (auto [from, to] : {Edge{a, b}, Edge{b, a}}) {
        if (reachable(k, edges, to, from)) continue;
        const auto gain = gain_of(from, to, edges, std::nullopt);
        if (!gain) {
          note_skip(from, to);
          continue;
        }
        consider({*gain, {from, to}, std::nullopt});
      }
    }
    if (!best) {
      for (const auto& e : edges) {
        EdgeSet without = edges;
        without.erase(e);
        if (reachable(k, without, e.first, e.second)) continue;
        const auto gain = gain_of(e.second, e.first, edges, e);
        if (!gain) {
          note_skip(e.second, e.first);
          continue;
        }
        if (*gain > 1e-9) consider({*gain, {e.second, e.first}, e});
      }
    }
    if (!best) break;
    if (best->remove) edges.erase(*best->remove);
    edges.insert(best->add);
    pending.erase(unordered(best->add.first, best->add.second));
  }

  // Pruning against the final parent sets.
  const EdgeSet snapshot = edges;
  for (const auto& [p, c] : snapshot) {
    std::vector<std::size_t> given;
    for (auto q : parents_of(edges, c))
      if (q != p) given.push_back(columns[q]);
    const auto r = tester.test(columns[p], columns[c], given);
    ++result.ci_tests;
    if (!r.degenerate && r.p_value > config.alpha) edges.erase({p, c});
  }

  result.edges = std::move(edges);
  result.score_evaluations = scorer.evaluations();
  std::sort(result.diagnostics.begin(), result.diagnostics.end());
  result.diagnostics.erase(std::unique(result.diagnostics.begin(), result.diagnostics.end()),
                           result.diagnostics.end());
  return result;
}

}  // namespace mocg::discovery
