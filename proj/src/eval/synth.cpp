#include "eval/synth.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "common/error.hpp"

namespace mocg::eval {

namespace {

using discovery::Edge;
using discovery::EdgeSet;

struct Builder {
  std::mt19937_64 rng;
  std::normal_distribution<double> normal{0.0, 1.0};
  std::size_t n;
  Eigen::MatrixXd values;
  std::vector<dataset::VariableSpec> vars;
  EdgeSet truth;
  std::map<Edge, double> coef;

  Builder(std::size_t rows, std::size_t cols, std::uint64_t seed)
      : rng(seed), n(rows), values(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)), vars(cols) {}

  Eigen::VectorXd noise() {
    Eigen::VectorXd e(static_cast<Eigen::Index>(n));
    for (auto& v : e) v = normal(rng);
    return e;
  }

  void continuous(std::size_t j, std::string name, const Eigen::VectorXd& col) {
    vars[j] = {std::move(name), dataset::VariableKind::Continuous, {}};
    values.col(static_cast<Eigen::Index>(j)) = col;
  }

  // Categorical node from the mixed structural model: the level is
  // argmax_k (k · slope · drive + g_k) with standard Gumbel g_k, i.e. a
  // multinomial logit in the drive.
  void categorical(std::size_t j, std::string name, const Eigen::VectorXd& drive, int levels, double slope) {
    dataset::VariableSpec spec{std::move(name), dataset::VariableKind::Categorical, {}};
    for (int k = 0; k < levels; ++k) spec.categories.push_back(std::to_string(k));
    vars[j] = std::move(spec);
    std::uniform_real_distribution<double> unit(std::numeric_limits<double>::min(), 1.0);
    for (Eigen::Index i = 0; i < drive.size(); ++i) {
      int best = 0;
      double top = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < levels; ++k) {
        const double score = k * slope * drive[i] - std::log(-std::log(unit(rng)));
        if (score > top) {
          top = score;
          best = k;
        }
      }
      values(i, static_cast<Eigen::Index>(j)) = best;
    }
  }

  void edge(std::size_t from, std::size_t to, double w) {
    truth.insert({from, to});
    coef[{from, to}] = w;
  }

  Eigen::VectorXd col(std::size_t j) const { return values.col(static_cast<Eigen::Index>(j)); }

  SynthData finish() { return {dataset::MixedDataset(std::move(vars), std::move(values)), std::move(truth), std::move(coef)}; }
};

// Random DAG over a shuffled order with weights ±U[lo, hi]. Nodes flagged in
// `categorical` take 3 levels driven by the weighted parent sum; their children
// see the level code.
void random_mixed(Builder& b, std::size_t d, double p, double lo, double hi, const std::vector<bool>& categorical) {
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), b.rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> mag(lo, hi);
  for (std::size_t a = 0; a < d; ++a) {
    const auto child = order[a];
    Eigen::VectorXd drive = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(b.n));
    for (std::size_t c = 0; c < a; ++c) {
      if (unit(b.rng) >= p) continue;
      const auto parent = order[c];
      const double w = (unit(b.rng) < 0.5 ? -1.0 : 1.0) * mag(b.rng);
      b.edge(parent, child, w);
      drive += w * b.col(parent);
    }
    const std::string name = "X" + std::to_string(child + 1);
    if (categorical[child])
      b.categorical(child, name, drive, 3, 1.0);
    else
      b.continuous(child, name, drive + b.noise());
  }
}

}  // namespace

const std::vector<std::string>& synth_kinds() {
  static const std::vector<std::string> kinds{"chain", "fork", "collider", "mixed-sem",
                                              "linear-sem", "confounded", "benchmark"};
  return kinds;
}

SynthData synthesize(std::string_view kind, std::size_t n, std::uint64_t seed) {
  if (n < 10) fail(ErrorCode::InvalidArgument, "synthetic data needs at least 10 rows");

  if (kind == "chain" || kind == "fork" || kind == "collider") {
    Builder b(n, 3, seed);
    const Eigen::VectorXd ex = b.noise(), ey = b.noise(), ez = b.noise();
    if (kind == "chain") {
      b.continuous(0, "X", ex);
      b.continuous(1, "Y", b.col(0) + ey);
      b.continuous(2, "Z", b.col(1) + ez);
      b.edge(0, 1, 1.0);
      b.edge(1, 2, 1.0);
    } else if (kind == "fork") {
      b.continuous(0, "X", ex);
      b.continuous(1, "Y", b.col(0) + ey);
      b.continuous(2, "Z", b.col(0) + ez);
      b.edge(0, 1, 1.0);
      b.edge(0, 2, 1.0);
    } else {
      b.continuous(0, "X", ex);
      b.continuous(1, "Y", ey);
      b.continuous(2, "Z", b.col(0) + b.col(1) + ez);
      b.edge(0, 2, 1.0);
      b.edge(1, 2, 1.0);
    }
    return b.finish();
  }

  if (kind == "confounded") {
    Builder b(n, 3, seed);
    const Eigen::VectorXd ez = b.noise(), ex = b.noise(), ey = b.noise();
    b.continuous(0, "Z", ez);
    b.continuous(1, "X", b.col(0) + ex);
    b.continuous(2, "Y", 2.0 * b.col(1) + 0.5 * b.col(0) + ey);
    b.edge(0, 1, 1.0);
    b.edge(0, 2, 0.5);
    b.edge(1, 2, 2.0);
    return b.finish();
  }

  if (kind == "mixed-sem") {
    Builder b(n, 3, seed);
    std::bernoulli_distribution coin(0.5);
    Eigen::VectorXd t(static_cast<Eigen::Index>(n));
    for (auto& v : t) v = coin(b.rng) ? 1.0 : 0.0;
    b.vars[0] = {"T", dataset::VariableKind::Categorical, {"0", "1"}};
    b.values.col(0) = t;
    b.continuous(1, "Y", 1.5 * t + b.noise());
    b.categorical(2, "C", b.col(1), 3, 1.0);
    b.edge(0, 1, 1.5);
    b.edge(1, 2, 1.0);
    return b.finish();
  }

  if (kind == "linear-sem" || kind == "benchmark") {
    const bool bench = kind == "benchmark";
    const std::size_t d = bench ? 7 : 5;
    Builder b(n, d, seed);
    std::vector<bool> categorical(d, false);
    if (bench) categorical[0] = categorical[1] = true;
    random_mixed(b, d, bench ? 0.3 : 0.4, 0.8, 2.0, categorical);
    return b.finish();
  }

  fail(ErrorCode::InvalidArgument, "unknown synthetic kind '" + std::string(kind) + "'");
}

std::string to_csv(const dataset::MixedDataset& ds) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (std::size_t j = 0; j < ds.column_count(); ++j) out << (j ? "," : "") << ds.variable(j).name;
  out << '\n';
  const auto& v = ds.values();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      if (j) out << ',';
      const auto& spec = ds.variable(static_cast<std::size_t>(j));
      if (spec.categorical())
        out << spec.categories[static_cast<std::size_t>(v(i, j))];
      else
        out << v(i, j);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace mocg::eval
