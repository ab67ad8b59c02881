#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dataset/dataset.hpp"
#include "discovery/pdag.hpp"

namespace mocg::discovery {

// Augmented-Lagrangian schedule and model sizes for the continuous learner.
struct ContinuousConfig {
  int max_epochs = 300;
  int hidden_width = 16;
  double threshold = 0.3;
  // Optimizer iterations per epoch (L-BFGS over the full data).
  int iterations_per_epoch = 5;
  // Epochs between checks of the penalty schedule.
  int update_interval = 3;
  // Training counts as converged once h has stayed below h_tolerance for
  // this many consecutive epochs.
  int settle_epochs = 50;
  double rho_init = 1.0;
  double rho_multiplier = 10.0;
  double rho_max = 1e16;
  double h_shrink = 0.25;
  double h_tolerance = 1e-8;
  // Weight of the mean squared encoder correction; keeps the encoder close to
  // the identity so the latent scale cannot collapse.
  double encoder_anchor = 1.0;
  // Evaluate tanh in single precision (vectorized). Tests switch this off to
  // check gradients at full precision.
  bool fast_tanh = true;
};

struct WeightMatrix {
  Eigen::MatrixXd A;  // A(i, j) is the weight of edge i -> j; zero diagonal
  std::vector<std::string> variables;
};

struct LossRecord {
  int epoch = 0;
  double elbo = 0;
  double nll = 0;
  double mse = 0;
};

using LossTrace = std::vector<LossRecord>;

struct ObjectiveTerms {
  double nll = 0;
  double kl = 0;
  double mse = 0;
  double anchor = 0;
  double h = 0;
  double total = 0;
};

// Edges with |A(i,j)| >= tau. Cycles are broken by repeatedly dropping the
// smallest-magnitude edge on a remaining cycle.
EdgeSet threshold_edges(const Eigen::MatrixXd& A, double tau);

// Variational structural-equation autoencoder: an elementwise tanh encoder
// maps each value to a latent cause h, Z = H (I - A) are the exogenous
// residuals (KL term), and a tanh decoder reconstructs X from Z (I - A)^-1
// (NLL term: Gaussian for continuous columns, cross-entropy for categorical).
// Acyclicity of A is enforced by an augmented Lagrangian on h(A).
class ContinuousLearner {
 public:
  ContinuousLearner(const dataset::MixedDataset& ds, std::vector<std::string> vars,
                    ContinuousConfig config, std::uint64_t seed);

  // Runs one epoch. On a non-finite objective the parameters are left at the
  // last good state and an Error(Numeric) is thrown.
  LossRecord step();

  int epoch() const { return epoch_; }
  const std::vector<std::string>& variables() const { return vars_; }
  const ContinuousConfig& config() const { return config_; }
  Eigen::MatrixXd weights() const;
  WeightMatrix weight_matrix() const { return {weights(), vars_}; }
  EdgeSet edges() const { return threshold_edges(weights(), config_.threshold); }
  const LossTrace& trace() const { return trace_; }
  double h() const { return last_h_; }
  double rho() const { return rho_; }
  double alpha() const { return alpha_; }
  bool constraint_satisfied() const { return last_h_ <= config_.h_tolerance; }
  bool converged() const { return satisfied_epochs_ >= config_.settle_epochs; }

  // Full objective (including penalty terms at the current rho/alpha) and its
  // gradient at an arbitrary parameter vector. Not thread-safe: evaluations
  // share a scratch workspace.
  double objective(const Eigen::VectorXd& theta, Eigen::VectorXd* grad, ObjectiveTerms* terms = nullptr) const;
  const Eigen::VectorXd& parameters() const { return theta_; }
  Eigen::Index parameter_count() const { return theta_.size(); }

 private:
  struct Layout {
    Eigen::Index d = 0, width = 0;
    Eigen::Index a = 0, enc_w1 = 0, enc_b1 = 0, enc_w2 = 0, enc_b2 = 0, dec_w1 = 0, dec_b1 = 0;
    std::vector<Eigen::Index> head;  // per variable
    Eigen::Index total = 0;
    Eigen::Index a_index(Eigen::Index i, Eigen::Index j) const { return a + i * (d - 1) + (j < i ? j : j - 1); }
  };

  Eigen::MatrixXd unpack_a(const Eigen::VectorXd& theta) const;

  // Buffers of n·d·H entries reused across objective evaluations.
  struct Workspace {
    Eigen::MatrixXd t1, t2, dt2;
    Eigen::VectorXd m, dm, column;
    Eigen::ArrayXXf scratch;
  };

  std::vector<std::string> vars_;
  ContinuousConfig config_;
  Eigen::MatrixXd X_;               // centered numeric encoding, n × d
  std::vector<int> classes_;        // 0 for continuous, category count otherwise
  std::vector<std::vector<int>> labels_;  // class labels per categorical column
  std::vector<double> code_offset_; // centering offset applied to categorical codes
  Layout layout_;
  Eigen::VectorXd theta_;
  double rho_ = 1.0;
  double alpha_ = 0.0;
  double h_ref_;
  double last_h_ = 0.0;
  int epoch_ = 0;
  int satisfied_epochs_ = 0;
  LossTrace trace_;
  mutable Workspace workspace_;
};

}  // namespace mocg::discovery
