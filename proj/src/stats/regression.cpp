#include "stats/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "common/error.hpp"

namespace mocg::stats {

Design design_matrix(const dataset::MixedDataset& ds, std::span<const std::size_t> columns,
                     bool intercept) {
  const auto n = static_cast<Eigen::Index>(ds.row_count());
  Eigen::Index width = intercept ? 1 : 0;
  for (auto c : columns) {
    const auto& v = ds.variable(c);
    width += v.categorical() ? static_cast<Eigen::Index>(v.category_count()) - 1 : 1;
  }
  Design d;
  d.X.resize(n, width);
  Eigen::Index col = 0;
  if (intercept) {
    d.X.col(col++).setOnes();
    d.labels.push_back("(intercept)");
    d.source.push_back(kInterceptSource);
  }
  for (auto c : columns) {
    const auto& v = ds.variable(c);
    const auto values = ds.column(c);
    if (!v.categorical()) {
      d.X.col(col++) = values;
      d.labels.push_back(v.name);
      d.source.push_back(c);
      continue;
    }
    for (std::size_t k = 1; k < v.category_count(); ++k) {
      const double code = static_cast<double>(k);
      d.X.col(col++) = (values.array() == code).cast<double>().matrix();
      d.labels.push_back(v.name + "=" + v.categories[k]);
      d.source.push_back(c);
    }
  }
  return d;
}

Design concat(const Design& base, const Design& extra) {
  Design d;
  d.X.resize(base.X.rows(), base.X.cols() + extra.X.cols());
  d.X << base.X, extra.X;
  d.labels = base.labels;
  d.labels.insert(d.labels.end(), extra.labels.begin(), extra.labels.end());
  d.source = base.source;
  d.source.insert(d.source.end(), extra.source.begin(), extra.source.end());
  return d;
}

namespace {

Eigen::ColPivHouseholderQR<Eigen::MatrixXd> pivoted_qr(const Eigen::MatrixXd& X) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  // Relative threshold on |R_ii|; looser than Eigen's default so near-exact
  // collinearity from one-hot codes is caught.
  qr.setThreshold(1e-10);
  qr.compute(X);
  return qr;
}

}  // namespace

std::vector<Eigen::Index> independent_columns(const Eigen::MatrixXd& X) {
  if (X.cols() == 0) return {};
  auto qr = pivoted_qr(X);
  std::vector<Eigen::Index> keep;
  const auto& perm = qr.colsPermutation().indices();
  for (Eigen::Index k = 0; k < qr.rank(); ++k) keep.push_back(perm[k]);
  std::sort(keep.begin(), keep.end());
  return keep;
}

OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() != y.size()) fail(ErrorCode::InvalidArgument, "ols: row mismatch");
  OlsFit fit;
  const auto p = X.cols();
  const auto n = X.rows();
  fit.coef = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::quiet_NaN());
  fit.standard_error = fit.coef;
  if (p == 0) {
    fit.rss = y.squaredNorm();
    return fit;
  }

  // Greedy left-to-right basis so the reported dependent columns are the
  // later members of each collinear group.
  std::vector<Eigen::Index> keep;
  Eigen::MatrixXd basis(n, 0);
  if (pivoted_qr(X).rank() == p) {
    basis = X;
    for (Eigen::Index j = 0; j < p; ++j) keep.push_back(j);
  }
  for (Eigen::Index j = keep.empty() ? 0 : p; j < p; ++j) {
    Eigen::MatrixXd trial(n, basis.cols() + 1);
    trial << basis, X.col(j);
    auto qr = pivoted_qr(trial);
    if (qr.rank() == trial.cols()) {
      basis = std::move(trial);
      keep.push_back(j);
    } else {
      fit.dependent_columns.push_back(j);
    }
  }
  fit.rank = static_cast<Eigen::Index>(keep.size());
  if (keep.empty()) {
    fit.rss = y.squaredNorm();
    return fit;
  }

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd resid = y - basis * beta;
  fit.rss = resid.squaredNorm();

  const Eigen::MatrixXd R = qr.matrixQR().topRows(fit.rank).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd Rinv =
      R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(fit.rank, fit.rank));
  const double dof = static_cast<double>(n - fit.rank);
  const double sigma2 = dof > 0 ? fit.rss / dof : std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index k = 0; k < fit.rank; ++k) {
    fit.coef[keep[k]] = beta[k];
    fit.standard_error[keep[k]] = std::sqrt(sigma2 * Rinv.row(k).squaredNorm());
  }
  return fit;
}

double gaussian_log_likelihood(double rss, std::size_t n) {
  const double nn = static_cast<double>(n);
  const double var = std::max(rss / nn, 1e-300);
  return -0.5 * nn * (std::log(2.0 * std::numbers::pi * var) + 1.0);
}

LogitFit multinomial_logit(const Eigen::MatrixXd& Xfull, const std::vector<int>& labels, int classes) {
  if (classes < 2) fail(ErrorCode::InvalidArgument, "logit needs at least 2 classes");
  if (static_cast<std::size_t>(Xfull.rows()) != labels.size())
    fail(ErrorCode::InvalidArgument, "logit: row mismatch");
  const auto keep = independent_columns(Xfull);
  Eigen::MatrixXd X(Xfull.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) X.col(static_cast<Eigen::Index>(k)) = Xfull.col(keep[k]);

  const Eigen::Index n = X.rows(), p = X.cols(), K = classes - 1;
  LogitFit fit;
  fit.parameters = p * K;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(p, K);
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(n, K);
  for (Eigen::Index i = 0; i < n; ++i)
    if (labels[i] > 0) Y(i, labels[i] - 1) = 1.0;

  auto evaluate = [&](const Eigen::MatrixXd& coef, Eigen::MatrixXd* prob) {
    const Eigen::MatrixXd eta = X * coef;
    double ll = 0;
    if (prob) prob->resize(n, K);
    for (Eigen::Index i = 0; i < n; ++i) {
      double mx = 0;
      for (Eigen::Index k = 0; k < K; ++k) mx = std::max(mx, eta(i, k));
      double z = std::exp(-mx);
      for (Eigen::Index k = 0; k < K; ++k) z += std::exp(eta(i, k) - mx);
      const double logz = mx + std::log(z);
      ll += (labels[i] > 0 ? eta(i, labels[i] - 1) : 0.0) - logz;
      if (prob)
        for (Eigen::Index k = 0; k < K; ++k) (*prob)(i, k) = std::exp(eta(i, k) - logz);
    }
    return ll;
  };

  if (p == 0) {
    fit.log_likelihood = evaluate(B, nullptr);
    fit.converged = true;
    return fit;
  }

  constexpr double kRidge = 1e-8;
  Eigen::MatrixXd P;
  double ll = evaluate(B, &P);
  for (int iter = 1; iter <= 100; ++iter) {
    fit.iterations = iter;
    const Eigen::MatrixXd G = X.transpose() * (Y - P);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(p * K, p * K);
    for (Eigen::Index a = 0; a < K; ++a) {
      for (Eigen::Index b = a; b < K; ++b) {
        Eigen::VectorXd w = (a == b) ? Eigen::VectorXd(P.col(a).array() * (1.0 - P.col(a).array()))
                                     : Eigen::VectorXd(-(P.col(a).array() * P.col(b).array()));
        const Eigen::MatrixXd block = X.transpose() * w.asDiagonal() * X;
        H.block(a * p, b * p, p, p) = block;
        if (a != b) H.block(b * p, a * p, p, p) = block.transpose();
      }
    }
    H.diagonal().array() += kRidge * static_cast<double>(n);
    const Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(G.data(), p * K);
    const Eigen::VectorXd step = H.ldlt().solve(g);
    if (!step.allFinite()) break;

    double scale = 1.0;
    Eigen::MatrixXd trial;
    double ll_trial = -std::numeric_limits<double>::infinity();
    Eigen::MatrixXd P_trial;
    for (int half = 0; half < 30; ++half) {
      trial = B + scale * Eigen::Map<const Eigen::MatrixXd>(step.data(), p, K);
      ll_trial = evaluate(trial, &P_trial);
      if (std::isfinite(ll_trial) && ll_trial >= ll - 1e-12) break;
      scale *= 0.5;
    }
    if (!(ll_trial >= ll - 1e-12)) break;
    const double gain = ll_trial - ll;
    B = trial;
    P = P_trial;
    ll = ll_trial;
    if (gain < 1e-9 * (1.0 + std::abs(ll)) || (scale * step).norm() < 1e-10) {
      fit.converged = true;
      break;
    }
  }
  fit.log_likelihood = ll;
  return fit;
}

double chi2_sf(double statistic, double df) {
  if (df <= 0) return 1.0;
  if (!(statistic > 0)) return 1.0;
  if (!std::isfinite(statistic)) return 0.0;
  return boost::math::gamma_q(df / 2.0, statistic / 2.0);
}

double normal_two_sided(double z) {
  if (!std::isfinite(z)) return 0.0;
  return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

}  // namespace mocg::stats
