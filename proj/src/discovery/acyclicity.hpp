#pragma once

#include <Eigen/Dense>

namespace mocg::discovery {

// e^M by scaling and squaring with a truncated Taylor series.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& M);

struct AcyclicityValue {
  double h = 0.0;
  Eigen::MatrixXd grad;  // dh/dA
};

// h(A) = tr(exp(A ∘ A)) - d, zero exactly when the support of A is acyclic;
// gradient (exp(A ∘ A))^T ∘ 2A.
AcyclicityValue acyclicity_h(const Eigen::MatrixXd& A);

}  // namespace mocg::discovery
