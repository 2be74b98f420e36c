#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "distill/boolcore.hpp"
#include "distill/nnmodel.hpp"

namespace distill {

struct NumericFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ProbeMode { theoretical, empirical };

struct ProbeConfig {
  double tau = 1.0;
  double eps = 0.05;
  double delta = 0.05;
  int n_train = 1000;
  int n_val = 10000;
  int iters = 100;
  ProbeMode mode = ProbeMode::empirical;

  void validate() const;
};

struct ProbeResult {
  Eigen::VectorXd w;
  double train_loss = 0.0;
  double val_loss = 0.0;
  bool decision = false;
};

/// Sample schedule for the theoretical mode: n = C tau^2 B^2 eps^-2 log(1/delta)
/// with C = 8.
int theoretical_sample_count(double tau, double norm_bound, double eps, double delta);

/// Precomputed second-moment statistics of a probe batch: Gram matrices
/// of the features and per-target cross moments. Fitting K targets against
/// the same samples costs one m x m x K product per gradient step.
struct ProbeBatch {
  Eigen::MatrixXd gram_train;   // m x m, Phi Phi^T / n
  Eigen::MatrixXd cross_train;  // m x K, Phi y / n
  Eigen::VectorXd ysq_train;    // K, mean y^2
  Eigen::MatrixXd gram_val;
  Eigen::MatrixXd cross_val;
  Eigen::VectorXd ysq_val;
  double step = 0.0;  // 1 / (2 lambda_max(gram_train))

  static ProbeBatch build(const Eigen::MatrixXd& phi_train,
                          const Eigen::MatrixXd& targets_train,
                          const Eigen::MatrixXd& phi_val,
                          const Eigen::MatrixXd& targets_val);
};

/// Gradient descent on the K quadratic losses at once, optionally projecting
/// each coefficient column onto the tau-ball every step. Returns the final
/// coefficients (m x K) and both loss vectors.
Eigen::MatrixXd batch_fit(const ProbeBatch& batch, double tau, int iters,
                          bool project, Eigen::VectorXd& train_losses,
                          Eigen::VectorXd& val_losses);

using RealFn = std::function<double(const BitInput&)>;

/// Constrained least squares of g against the representation over the
/// ball ||w|| <= tau, with held-out validation loss.
ProbeResult fit_constrained(const RealFn& g, const RepresentationOracle& oracle,
                            const DistributionSampler& dist,
                            const ProbeConfig& cfg, Rng& rng);

/// Accept iff val_loss <= 1.5 eps (the midpoint of the eps / 2 eps gap).
bool decide(const ProbeResult& result, double eps);

/// The k candidates of smallest validation loss; ties go to the
/// lexicographically smaller clause.
std::vector<Clause> filter_top_k(
    const std::vector<std::pair<Clause, ProbeResult>>& candidates, int k);

}  // namespace distill
