#include "discovery/acyclicity.hpp"

#include <cmath>

#include "common/error.hpp"

namespace mocg::discovery {

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) fail(ErrorCode::InvalidArgument, "matrix exponential needs a square matrix");
  if (!M.allFinite()) fail(ErrorCode::Numeric, "matrix exponential of non-finite matrix");
  const auto d = M.rows();
  const double norm1 = d == 0 ? 0.0 : M.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  const Eigen::MatrixXd scaled = M / std::ldexp(1.0, squarings);

  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(d, d);
  for (int k = 1; k <= 30; ++k) {
    term = term * scaled / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() <= 1e-18 * result.cwiseAbs().maxCoeff()) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

AcyclicityValue acyclicity_h(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) fail(ErrorCode::InvalidArgument, "weight matrix must be square");
  const Eigen::MatrixXd squared = A.cwiseProduct(A);
  const Eigen::MatrixXd E = matrix_exponential(squared);
  AcyclicityValue out;
  out.h = E.trace() - static_cast<double>(A.rows());
  out.grad = E.transpose().cwiseProduct(2.0 * A);
  return out;
}

}  // namespace mocg::discovery
