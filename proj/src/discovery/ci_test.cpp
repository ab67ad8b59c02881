#include "discovery/ci_test.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "common/error.hpp"
#include "stats/regression.hpp"

namespace mocg::discovery {

const char* to_string(CiMethod m) {
  switch (m) {
    case CiMethod::FisherZ: return "fisher_z";
    case CiMethod::GSquared: return "g_squared";
    case CiMethod::LikelihoodRatio: return "likelihood_ratio";
  }
  return "fisher_z";
}

CiTester::CiTester(const dataset::MixedDataset& ds) : ds_(ds) {
  const auto& X = ds.values();
  const auto d = X.cols();
  const Eigen::MatrixXd centered = X.rowwise() - X.colwise().mean();
  Eigen::MatrixXd cov = centered.transpose() * centered;
  constant_.assign(static_cast<std::size_t>(d), false);
  Eigen::VectorXd sd(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    sd[k] = std::sqrt(cov(k, k));
    if (!(sd[k] > 1e-12 * (1.0 + X.col(k).cwiseAbs().maxCoeff()) * std::sqrt(double(X.rows()))))
      constant_[static_cast<std::size_t>(k)] = true;
  }
  corr_ = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b)
      if (!constant_[a] && !constant_[b]) corr_(a, b) = cov(a, b) / (sd[a] * sd[b]);
}

CiResult CiTester::test(std::size_t i, std::size_t j, std::span<const std::size_t> given) const {
  const auto d = ds_.column_count();
  if (i == j) fail(ErrorCode::InvalidArgument, "ci_test: i and j must differ");
  if (i >= d || j >= d) fail(ErrorCode::InvalidArgument, "ci_test: variable index out of range");
  for (auto s : given) {
    if (s == i || s == j) fail(ErrorCode::InvalidArgument, "ci_test: conditioning set contains i or j");
    if (s >= d) fail(ErrorCode::InvalidArgument, "ci_test: variable index out of range");
  }

  bool any_cat = false, any_cont = false;
  auto note = [&](std::size_t v) {
    (ds_.variable(v).categorical() ? any_cat : any_cont) = true;
  };
  note(i);
  note(j);
  for (auto s : given) note(s);

  if (!any_cat) return fisher_z(i, j, given);
  if (!any_cont) return g_squared(i, j, given);
  return likelihood_ratio(i, j, given);
}

CiResult CiTester::fisher_z(std::size_t i, std::size_t j, std::span<const std::size_t> given) const {
  CiResult res;
  res.method = CiMethod::FisherZ;
  std::vector<std::size_t> idx{i, j};
  idx.insert(idx.end(), given.begin(), given.end());
  for (auto v : idx)
    if (constant_[v]) {
      res.degenerate = true;
      return res;
    }
  const double n_eff = static_cast<double>(ds_.row_count()) - static_cast<double>(given.size()) - 3.0;
  if (n_eff <= 0) {
    res.degenerate = true;
    return res;
  }

  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd sub(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = corr_(idx[a], idx[b]);

  double r;
  if (k == 2) {
    r = sub(0, 1);
  } else {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(sub);
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 1e-12) {
      res.degenerate = true;
      return res;
    }
    const Eigen::MatrixXd prec = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
    r = -prec(0, 1) / std::sqrt(prec(0, 0) * prec(1, 1));
  }
  if (std::abs(r) >= 1.0 - 1e-15) {
    res.statistic = std::numeric_limits<double>::infinity();
    res.p_value = 0.0;
    return res;
  }
  const double z = std::atanh(r) * std::sqrt(n_eff);
  res.statistic = z;
  res.p_value = stats::normal_two_sided(z);
  return res;
}

CiResult CiTester::g_squared(std::size_t i, std::size_t j, std::span<const std::size_t> given) const {
  CiResult res;
  res.method = CiMethod::GSquared;
  const auto ci = ds_.variable(i).category_count();
  const auto cj = ds_.variable(j).category_count();
  double df = static_cast<double>((ci - 1) * (cj - 1));
  for (auto s : given) df *= static_cast<double>(ds_.variable(s).category_count());
  res.df = df;

  const auto& X = ds_.values();
  std::unordered_map<std::uint64_t, std::vector<double>> strata;
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    std::uint64_t key = 0;
    for (auto s : given) key = key * ds_.variable(s).category_count() + static_cast<std::uint64_t>(X(r, s));
    auto& table = strata[key];
    if (table.empty()) table.assign(ci * cj, 0.0);
    table[static_cast<std::size_t>(X(r, i)) * cj + static_cast<std::size_t>(X(r, j))] += 1.0;
  }

  double g2 = 0;
  bool informative = false;
  for (const auto& [key, table] : strata) {
    std::vector<double> rows(ci, 0.0), cols(cj, 0.0);
    double total = 0;
    for (std::size_t a = 0; a < ci; ++a)
      for (std::size_t b = 0; b < cj; ++b) {
        rows[a] += table[a * cj + b];
        cols[b] += table[a * cj + b];
        total += table[a * cj + b];
      }
    const auto nonzero = [](const std::vector<double>& v) {
      return std::count_if(v.begin(), v.end(), [](double x) { return x > 0; });
    };
    // A stratum where either variable is constant carries no evidence.
    if (nonzero(rows) < 2 || nonzero(cols) < 2) continue;
    informative = true;
    for (std::size_t a = 0; a < ci; ++a)
      for (std::size_t b = 0; b < cj; ++b) {
        const double o = table[a * cj + b];
        if (o > 0) g2 += 2.0 * o * std::log(o * total / (rows[a] * cols[b]));
      }
  }
  if (!informative) {
    res.degenerate = true;
    return res;
  }
  res.statistic = std::max(g2, 0.0);
  res.p_value = stats::chi2_sf(res.statistic, df);
  return res;
}

CiResult CiTester::likelihood_ratio(std::size_t i, std::size_t j, std::span<const std::size_t> given) const {
  CiResult res;
  res.method = CiMethod::LikelihoodRatio;
  std::size_t target = i, other = j;
  if (ds_.variable(i).categorical() && !ds_.variable(j).categorical()) std::swap(target, other);

  const stats::Design base = stats::design_matrix(ds_, given, true);
  const std::size_t other_arr[] = {other};
  const stats::Design full = stats::concat(base, stats::design_matrix(ds_, other_arr, false));
  const auto n = ds_.row_count();

  if (!ds_.variable(target).categorical()) {
    const Eigen::VectorXd y = ds_.column(target);
    const auto fit0 = stats::ols(base.X, y);
    const auto fit1 = stats::ols(full.X, y);
    const double df = static_cast<double>(fit1.rank - fit0.rank);
    res.df = df;
    const double scale = std::max(1.0, y.squaredNorm());
    if (df <= 0 || fit0.rss <= 1e-14 * scale) {
      res.degenerate = true;
      return res;
    }
    if (fit1.rss <= 1e-14 * scale) {
      res.statistic = std::numeric_limits<double>::infinity();
      res.p_value = 0.0;
      return res;
    }
    res.statistic = static_cast<double>(n) * std::log(fit0.rss / fit1.rss);
    res.p_value = stats::chi2_sf(res.statistic, df);
    return res;
  }

  const auto classes = static_cast<int>(ds_.variable(target).category_count());
  std::vector<int> labels(n);
  std::vector<bool> present(static_cast<std::size_t>(classes), false);
  for (std::size_t r = 0; r < n; ++r) {
    labels[r] = static_cast<int>(ds_.values()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(target)));
    present[static_cast<std::size_t>(labels[r])] = true;
  }
  if (std::count(present.begin(), present.end(), true) < 2) {
    res.degenerate = true;
    return res;
  }
  const auto rank0 = static_cast<double>(stats::independent_columns(base.X).size());
  const auto rank1 = static_cast<double>(stats::independent_columns(full.X).size());
  const double df = (classes - 1) * (rank1 - rank0);
  res.df = df;
  if (df <= 0) {
    res.degenerate = true;
    return res;
  }
  const auto fit0 = stats::multinomial_logit(base.X, labels, classes);
  const auto fit1 = stats::multinomial_logit(full.X, labels, classes);
  res.fit_converged = fit0.converged && fit1.converged;
  res.statistic = std::max(0.0, 2.0 * (fit1.log_likelihood - fit0.log_likelihood));
  res.p_value = stats::chi2_sf(res.statistic, df);
  return res;
}

CiResult ci_test(const dataset::MixedDataset& ds, std::size_t i, std::size_t j,
                 std::span<const std::size_t> given) {
  return CiTester(ds).test(i, j, given);
}

}  // namespace mocg::discovery
