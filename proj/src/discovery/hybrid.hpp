#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dataset/dataset.hpp"
#include "discovery/pdag.hpp"

namespace mocg::discovery {

struct HybridConfig {
  double alpha = 0.05;
  // Penalty per free parameter; a non-positive value selects ln(n)/2.
  double lambda = 0.0;
};

struct HybridResult {
  std::vector<std::string> nodes;  // same order as the requested variables
  EdgeSet edges;
  std::vector<std::string> diagnostics;
  std::size_t ci_tests = 0;
  std::size_t score_evaluations = 0;
};

// Mixed-type learner in three phases: a PC-stable skeleton with the mixed CI
// test, greedy orientation under a penalized likelihood score (Gaussian least
// squares for continuous nodes, multinomial logit for categorical nodes),
// then pruning of edges whose parent is independent of the child given the
// child's other parents.
HybridResult run_hybrid(const dataset::MixedDataset& ds, const std::vector<std::string>& vars,
                        const HybridConfig& config = {});

// Penalized log-likelihood of one node given its parents (dataset columns).
// Returns false when a logistic fit fails to converge.
bool local_score(const dataset::MixedDataset& ds, std::size_t node, const std::vector<std::size_t>& parents,
                 double lambda, double* score);

}  // namespace mocg::discovery
