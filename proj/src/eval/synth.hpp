#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dataset/dataset.hpp"
#include "discovery/pdag.hpp"

namespace mocg::eval {

// Generated data together with the structure that produced it. `truth` and
// `coefficients` index into `data.variables()`.
struct SynthData {
  dataset::MixedDataset data;
  discovery::EdgeSet truth;
  std::map<discovery::Edge, double> coefficients;
};

// Kinds:
//   chain      X -> Y -> Z
//   fork       Y <- X -> Z
//   collider   X -> Z <- Y
//   mixed-sem  binary T -> continuous Y (1.5), Y -> ternary C
//   linear-sem 5 nodes, random order, edge probability 0.4, weights ±U[0.8, 2]
//   confounded Z -> X, Z -> Y (0.5), X -> Y (2)
//   benchmark  7 nodes, edge probability 0.3, X1 and X2 ternary
// Continuous noise is standard normal. Categorical nodes pick the level k
// maximizing k·drive plus Gumbel noise (a multinomial logit in the drive).
SynthData synthesize(std::string_view kind, std::size_t n, std::uint64_t seed);

const std::vector<std::string>& synth_kinds();

// CSV with a header row; categorical cells are written as their labels.
std::string to_csv(const dataset::MixedDataset& ds);

}  // namespace mocg::eval
