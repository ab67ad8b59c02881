#include "discovery/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>

#include "common/error.hpp"
#include "discovery/acyclicity.hpp"

namespace mocg::discovery {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Returns one directed cycle as a node sequence, or empty when acyclic.
std::vector<std::size_t> find_cycle(std::size_t n, const EdgeSet& edges) {
  std::vector<std::vector<std::size_t>> out(n);
  for (const auto& [a, b] : edges) out[a].push_back(b);
  std::vector<int> state(n, 0);
  std::vector<std::size_t> stack;
  std::vector<std::size_t> cycle;

  auto dfs = [&](auto&& self, std::size_t u) -> bool {
    state[u] = 1;
    stack.push_back(u);
    for (auto v : out[u]) {
      if (state[v] == 1) {
        auto it = std::find(stack.begin(), stack.end(), v);
        cycle.assign(it, stack.end());
        return true;
      }
      if (state[v] == 0 && self(self, v)) return true;
    }
    stack.pop_back();
    state[u] = 2;
    return false;
  };
  for (std::size_t s = 0; s < n; ++s)
    if (state[s] == 0 && dfs(dfs, s)) return cycle;
  return {};
}

void tanh_inplace(MatrixXd& M, Eigen::ArrayXXf& scratch, bool fast) {
  if (fast) {
    scratch = M.array().cast<float>();
    scratch = scratch.tanh();
    M = scratch.cast<double>().matrix();
  } else {
    M = M.array().tanh().matrix();
  }
}

class EpochObjective final : public ceres::FirstOrderFunction {
 public:
  explicit EpochObjective(const ContinuousLearner& learner) : learner_(learner) {}

  bool Evaluate(const double* parameters, double* cost, double* gradient) const override {
    const Eigen::Map<const VectorXd> theta(parameters, learner_.parameter_count());
    VectorXd grad;
    const double value = learner_.objective(theta, gradient ? &grad : nullptr);
    if (!std::isfinite(value)) return false;
    *cost = value;
    if (gradient) {
      if (!grad.allFinite()) return false;
      Eigen::Map<VectorXd>(gradient, grad.size()) = grad;
    }
    return true;
  }

  int NumParameters() const override { return static_cast<int>(learner_.parameter_count()); }

 private:
  const ContinuousLearner& learner_;
};

}  // namespace

EdgeSet threshold_edges(const Eigen::MatrixXd& A, double tau) {
  if (!(tau > 0)) fail(ErrorCode::InvalidArgument, "threshold must be positive");
  if (A.rows() != A.cols()) fail(ErrorCode::InvalidArgument, "weight matrix must be square");
  const auto d = static_cast<std::size_t>(A.rows());
  EdgeSet edges;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (i != j && std::abs(A(i, j)) >= tau) edges.insert({i, j});

  for (auto cycle = find_cycle(d, edges); !cycle.empty(); cycle = find_cycle(d, edges)) {
    Edge weakest{cycle.back(), cycle.front()};
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      const Edge e{cycle[k], cycle[(k + 1) % cycle.size()]};
      const double w = std::abs(A(e.first, e.second));
      const double best = std::abs(A(weakest.first, weakest.second));
      if (w < best || (w == best && e < weakest)) weakest = e;
    }
    edges.erase(weakest);
  }
  return edges;
}

ContinuousLearner::ContinuousLearner(const dataset::MixedDataset& ds, std::vector<std::string> vars,
                                     ContinuousConfig config, std::uint64_t seed)
    : vars_(std::move(vars)), config_(config), h_ref_(std::numeric_limits<double>::infinity()) {
  if (vars_.size() < 2) fail(ErrorCode::InvalidArgument, "continuous learner needs at least 2 variables");
  if (config_.max_epochs < 1) fail(ErrorCode::InvalidArgument, "max_epochs must be at least 1");
  if (!(config_.threshold > 0)) fail(ErrorCode::InvalidArgument, "threshold must be positive");
  if (config_.hidden_width < 1) fail(ErrorCode::InvalidArgument, "hidden_width must be at least 1");
  if (config_.iterations_per_epoch < 1 || config_.update_interval < 1 || config_.settle_epochs < 0)
    fail(ErrorCode::InvalidArgument, "epoch iteration counts must be positive");
  if (!(config_.rho_init > 0) || !(config_.rho_multiplier > 1) || !(config_.h_shrink > 0 && config_.h_shrink < 1))
    fail(ErrorCode::InvalidArgument, "invalid penalty schedule");

  const auto idx = ds.indices_of(vars_);
  const auto n = static_cast<Index>(ds.row_count());
  const auto d = static_cast<Index>(idx.size());
  X_.resize(n, d);
  classes_.assign(idx.size(), 0);
  labels_.assign(idx.size(), {});
  code_offset_.assign(idx.size(), 0.0);
  for (Index j = 0; j < d; ++j) {
    const auto& spec = ds.variable(idx[j]);
    const VectorXd col = ds.column(idx[j]);
    const double mean = col.mean();
    X_.col(j) = col.array() - mean;
    if (spec.categorical()) {
      classes_[j] = static_cast<int>(spec.category_count());
      code_offset_[j] = mean;
      auto& lab = labels_[j];
      lab.resize(static_cast<std::size_t>(n));
      for (Index i = 0; i < n; ++i) lab[i] = static_cast<int>(col[i]);
    }
  }

  const Index H = config_.hidden_width;
  Layout& L = layout_;
  L.d = d;
  L.width = H;
  Index off = 0;
  L.a = off;
  off += d * (d - 1);
  L.enc_w1 = off;
  off += H;
  L.enc_b1 = off;
  off += H;
  L.enc_w2 = off;
  off += H;
  L.enc_b2 = off;
  off += 1;
  L.dec_w1 = off;
  off += H;
  L.dec_b1 = off;
  off += H;
  for (Index j = 0; j < d; ++j) {
    L.head.push_back(off);
    const Index outputs = classes_[j] > 0 ? classes_[j] : 1;
    off += outputs * (H + 1);
  }
  L.total = off;

  // A and every output layer start at zero, so the initial model is the
  // identity reconstruction with an empty graph. Input layers are scaled to
  // the data spread so tanh starts in its linear range.
  theta_ = VectorXd::Zero(L.total);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double spread = std::max(1e-6, std::sqrt(X_.squaredNorm() / static_cast<double>(n * d)));
  for (Index k = 0; k < H; ++k) {
    theta_[L.enc_w1 + k] = normal(rng) / spread;
    theta_[L.enc_b1 + k] = 0.1 * normal(rng);
  }
  for (Index k = 0; k < H; ++k) {
    theta_[L.dec_w1 + k] = normal(rng) / spread;
    theta_[L.dec_b1 + k] = 0.1 * normal(rng);
  }
  rho_ = config_.rho_init;

  ObjectiveTerms terms;
  objective(theta_, nullptr, &terms);
  last_h_ = terms.h;
}

Eigen::MatrixXd ContinuousLearner::unpack_a(const Eigen::VectorXd& theta) const {
  const Index d = layout_.d;
  MatrixXd A = MatrixXd::Zero(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      if (i != j) A(i, j) = theta[layout_.a_index(i, j)];
  return A;
}

Eigen::MatrixXd ContinuousLearner::weights() const { return unpack_a(theta_); }

double ContinuousLearner::objective(const Eigen::VectorXd& theta, Eigen::VectorXd* grad,
                                   ObjectiveTerms* terms) const {
  const Layout& L = layout_;
  const Index n = X_.rows(), d = L.d, H = L.width, nd = n * d;
  const double inv_n = 1.0 / static_cast<double>(n);
  const bool fast = config_.fast_tanh;

  const MatrixXd A = unpack_a(theta);
  const MatrixXd I = MatrixXd::Identity(d, d);
  const MatrixXd IA = I - A;
  Eigen::PartialPivLU<MatrixXd> lu(IA);
  const MatrixXd Minv = lu.inverse();

  const Eigen::Map<const VectorXd> xv(X_.data(), nd);
  const auto ew1 = theta.segment(L.enc_w1, H);
  const auto eb1 = theta.segment(L.enc_b1, H);
  const auto ew2 = theta.segment(L.enc_w2, H);
  const double eb2 = theta[L.enc_b2];
  const auto dw1 = theta.segment(L.dec_w1, H);
  const auto db1 = theta.segment(L.dec_b1, H);

  // Encoder: h = x + w2 . tanh(w1 x + b1) + b2, shared across entries.
  Workspace& ws = workspace_;
  MatrixXd& T1 = ws.t1;
  T1.noalias() = xv * ew1.transpose();
  T1.rowwise() += eb1.transpose();
  tanh_inplace(T1, ws.scratch, fast);
  VectorXd& m = ws.m;
  m.noalias() = T1 * ew2;
  m.array() += eb2;
  MatrixXd Hm(n, d);
  Eigen::Map<VectorXd>(Hm.data(), nd) = xv + m;

  const MatrixXd Z = Hm * IA;
  const MatrixXd U = Z * Minv;
  const Eigen::Map<const VectorXd> uv(U.data(), nd);

  MatrixXd& T2 = ws.t2;
  T2.noalias() = uv * dw1.transpose();
  T2.rowwise() += db1.transpose();
  tanh_inplace(T2, ws.scratch, fast);

  double nll = 0, mse = 0;
  MatrixXd& dT2 = ws.dt2;
  MatrixXd dU;
  VectorXd g;
  if (grad) {
    g = VectorXd::Zero(L.total);
    dT2.setZero(nd, H);
    dU = MatrixXd::Zero(n, d);
  }

  for (Index j = 0; j < d; ++j) {
    const auto T2j = T2.middleRows(j * n, n);
    const Index head = L.head[j];
    if (classes_[j] == 0) {
      const auto w = theta.segment(head, H);
      const double b = theta[head + H];
      VectorXd& resid = ws.column;
      resid.noalias() = T2j * w;
      resid -= X_.col(j);
      resid.array() += b;
      const double ss = resid.squaredNorm();
      nll += 0.5 * ss * inv_n;
      mse += ss;
      if (grad) {
        const VectorXd gr = resid * inv_n;  // n doubles; small next to the n·d·H buffers
        g.segment(head, H) += T2j.transpose() * gr;
        g[head + H] += gr.sum();
        dT2.middleRows(j * n, n).noalias() += gr * w.transpose();
      }
      continue;
    }
    const Index c = classes_[j];
    const Eigen::Map<const MatrixXd> W(theta.data() + head, c, H);
    const auto bias = theta.segment(head + c * H, c);
    MatrixXd logits = T2j * W.transpose();
    logits.rowwise() += bias.transpose();
    const VectorXd mx = logits.rowwise().maxCoeff();
    MatrixXd P = (logits.colwise() - mx).array().exp().matrix();
    const VectorXd z = P.rowwise().sum();
    P.array().colwise() /= z.array();
    const auto& lab = labels_[j];
    const double offset = code_offset_[j];
    VectorXd codes = VectorXd::LinSpaced(c, 0.0, static_cast<double>(c - 1));
    for (Index i = 0; i < n; ++i) {
      const int y = lab[static_cast<std::size_t>(i)];
      nll += (mx[i] + std::log(z[i]) - logits(i, y)) * inv_n;
      const double expected = P.row(i).dot(codes) - offset;
      const double e = expected - X_(i, j);
      mse += e * e;
    }
    if (grad) {
      MatrixXd dlog = P;
      for (Index i = 0; i < n; ++i) dlog(i, lab[static_cast<std::size_t>(i)]) -= 1.0;
      dlog *= inv_n;
      Eigen::Map<MatrixXd>(g.data() + head, c, H) += dlog.transpose() * T2j;
      g.segment(head + c * H, c) += dlog.colwise().sum().transpose();
      dT2.middleRows(j * n, n).noalias() += dlog * W;
    }
  }
  mse /= static_cast<double>(nd);

  const double kl = 0.5 * Z.squaredNorm() * inv_n;
  const double anchor = config_.encoder_anchor * m.squaredNorm() * inv_n;
  const auto hv = acyclicity_h(A);
  const double penalty = 0.5 * rho_ * hv.h * hv.h + alpha_ * hv.h;
  const double total = nll + kl + anchor + penalty;

  if (terms) *terms = {nll, kl, mse, anchor, hv.h, total};
  if (!grad) return total;

  // Decoder hidden layer.
  MatrixXd& dP2 = dT2;
  dP2.array() *= 1.0 - T2.array().square();
  g.segment(L.dec_w1, H).noalias() = dP2.transpose() * uv;
  g.segment(L.dec_b1, H) = dP2.colwise().sum().transpose();
  Eigen::Map<VectorXd>(dU.data(), nd).noalias() += dP2 * dw1;

  // U = Z Minv and Minv = (I - A)^-1.
  MatrixXd dZ = dU * Minv.transpose();
  const MatrixXd dMinv = Z.transpose() * dU;
  MatrixXd dA = Minv.transpose() * dMinv * Minv.transpose();
  dZ += Z * inv_n;

  // Z = H (I - A).
  const MatrixXd dH = dZ * IA.transpose();
  dA -= Hm.transpose() * dZ;
  dA += (rho_ * hv.h + alpha_) * hv.grad;

  VectorXd& dm = ws.dm;
  dm = Eigen::Map<const VectorXd>(dH.data(), nd);
  dm += (2.0 * config_.encoder_anchor * inv_n) * m;
  g.segment(L.enc_w2, H).noalias() = T1.transpose() * dm;
  g[L.enc_b2] = dm.sum();
  MatrixXd& dP1 = ws.dt2;  // decoder gradient buffer is free again
  dP1.noalias() = dm * ew2.transpose();
  dP1.array() *= 1.0 - T1.array().square();
  g.segment(L.enc_w1, H).noalias() = dP1.transpose() * xv;
  g.segment(L.enc_b1, H) = dP1.colwise().sum().transpose();

  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      if (i != j) g[L.a_index(i, j)] = dA(i, j);
  *grad = std::move(g);
  return total;
}

LossRecord ContinuousLearner::step() {
  ceres::GradientProblemSolver::Options options;
  options.line_search_direction_type = ceres::LBFGS;
  options.max_num_iterations = config_.iterations_per_epoch;
  options.logging_type = ceres::SILENT;
  options.minimizer_progress_to_stdout = false;
  options.function_tolerance = 1e-15;
  options.gradient_tolerance = 1e-15;
  options.parameter_tolerance = 1e-15;

  VectorXd candidate = theta_;
  ceres::GradientProblem problem(new EpochObjective(*this));
  ceres::GradientProblemSolver::Summary summary;
  ceres::Solve(options, problem, candidate.data(), &summary);

  ObjectiveTerms terms;
  const double total = candidate.allFinite() ? objective(candidate, nullptr, &terms)
                                             : std::numeric_limits<double>::quiet_NaN();
  if (!std::isfinite(total) || !std::isfinite(terms.nll) || !std::isfinite(terms.mse) ||
      !std::isfinite(terms.kl))
    fail(ErrorCode::Numeric, "continuous learner produced a non-finite loss at epoch " +
                                 std::to_string(epoch_ + 1));

  theta_ = std::move(candidate);
  ++epoch_;
  last_h_ = terms.h;
  satisfied_epochs_ = constraint_satisfied() ? satisfied_epochs_ + 1 : 0;

  if (epoch_ % config_.update_interval == 0 && last_h_ > config_.h_tolerance) {
    if (last_h_ > config_.h_shrink * h_ref_ && rho_ < config_.rho_max) {
      rho_ = std::min(rho_ * config_.rho_multiplier, config_.rho_max);
    } else {
      h_ref_ = last_h_;
      alpha_ += rho_ * last_h_;
    }
  }

  LossRecord rec{epoch_, terms.nll + terms.kl, terms.nll, terms.mse};
  trace_.push_back(rec);
  return rec;
}

}  // namespace mocg::discovery
