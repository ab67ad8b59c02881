#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dataset/dataset.hpp"

namespace mocg::stats {

// Predictor columns for a set of dataset variables. Continuous variables enter
// as-is; categorical ones are one-hot coded with the first category as the
// reference level.
struct Design {
  Eigen::MatrixXd X;
  std::vector<std::string> labels;
  std::vector<std::size_t> source;  // dataset column that produced each design column (npos for intercept)
};

constexpr std::size_t kInterceptSource = static_cast<std::size_t>(-1);

Design design_matrix(const dataset::MixedDataset& ds, std::span<const std::size_t> columns,
                     bool intercept = true);

// Appends the columns of `extra` to `base` (labels and sources too).
Design concat(const Design& base, const Design& extra);

struct OlsFit {
  Eigen::VectorXd coef;           // NaN for columns dropped as collinear
  Eigen::VectorXd standard_error; // NaN for dropped columns
  double rss = 0;
  Eigen::Index rank = 0;
  std::vector<Eigen::Index> dependent_columns;  // columns linearly dependent on earlier ones
};

OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

// Maximum Gaussian log-likelihood given the residual sum of squares.
double gaussian_log_likelihood(double rss, std::size_t n);

// Column indices of X forming a basis of its column space, in original order.
std::vector<Eigen::Index> independent_columns(const Eigen::MatrixXd& X);

struct LogitFit {
  double log_likelihood = 0;
  bool converged = false;
  int iterations = 0;
  Eigen::Index parameters = 0;  // (classes - 1) * independent columns
};

// Multinomial logistic regression by damped Newton iterations; class 0 is the
// reference. `labels` holds class indices in [0, classes).
LogitFit multinomial_logit(const Eigen::MatrixXd& X, const std::vector<int>& labels, int classes);

// Upper tail of the chi-square distribution; returns 1 for df <= 0.
double chi2_sf(double statistic, double df);
// Two-sided normal p-value.
double normal_two_sided(double z);

}  // namespace mocg::stats
