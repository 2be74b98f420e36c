#include "distill/probe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace distill {

void ProbeConfig::validate() const {
  if (tau <= 0.0) throw std::invalid_argument("probe: tau must be positive");
  if (eps <= 0.0 || eps >= 1.0) throw std::invalid_argument("probe: eps out of range");
  if (delta <= 0.0 || delta >= 1.0) throw std::invalid_argument("probe: delta out of range");
  if (n_train < 1 || n_val < 1 || iters < 1)
    throw std::invalid_argument("probe: counts must be >= 1");
}

int theoretical_sample_count(double tau, double norm_bound, double eps, double delta) {
  const double c = 8.0;
  double n = c * tau * tau * norm_bound * norm_bound / (eps * eps) * std::log(1.0 / delta);
  return static_cast<int>(std::ceil(std::max(1.0, n)));
}

ProbeBatch ProbeBatch::build(const Eigen::MatrixXd& phi_train,
                             const Eigen::MatrixXd& targets_train,
                             const Eigen::MatrixXd& phi_val,
                             const Eigen::MatrixXd& targets_val) {
  ProbeBatch b;
  const double inv_n = 1.0 / static_cast<double>(phi_train.cols());
  const double inv_nv = 1.0 / static_cast<double>(phi_val.cols());
  b.gram_train = phi_train * phi_train.transpose() * inv_n;
  b.cross_train = phi_train * targets_train * inv_n;
  b.ysq_train = targets_train.array().square().colwise().mean();
  b.gram_val = phi_val * phi_val.transpose() * inv_nv;
  b.cross_val = phi_val * targets_val * inv_nv;
  b.ysq_val = targets_val.array().square().colwise().mean();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.gram_train,
                                                    Eigen::EigenvaluesOnly);
  double lmax = es.eigenvalues().maxCoeff();
  b.step = lmax > 0.0 ? 1.0 / (2.0 * lmax) : 1.0;
  return b;
}

namespace {

Eigen::VectorXd quadratic_losses(const Eigen::MatrixXd& W, const Eigen::MatrixXd& gram,
                                 const Eigen::MatrixXd& cross, const Eigen::VectorXd& ysq) {
  Eigen::MatrixXd GW = gram * W;
  Eigen::VectorXd losses(W.cols());
  for (Eigen::Index k = 0; k < W.cols(); ++k)
    losses(k) = W.col(k).dot(GW.col(k)) - 2.0 * W.col(k).dot(cross.col(k)) + ysq(k);
  return losses;
}

void project_columns(Eigen::MatrixXd& W, double tau) {
  for (Eigen::Index k = 0; k < W.cols(); ++k) {
    double norm = W.col(k).norm();
    if (norm > tau) W.col(k) *= tau / norm;
  }
}

}  // namespace

Eigen::MatrixXd batch_fit(const ProbeBatch& batch, double tau, int iters,
                          bool project, Eigen::VectorXd& train_losses,
                          Eigen::VectorXd& val_losses) {
  const Eigen::Index m = batch.gram_train.rows();
  const Eigen::Index k = batch.cross_train.cols();
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, k);
  for (int it = 0; it < iters; ++it) {
    W -= 2.0 * batch.step * (batch.gram_train * W - batch.cross_train);
    if (project) project_columns(W, tau);
  }
  train_losses = quadratic_losses(W, batch.gram_train, batch.cross_train, batch.ysq_train);
  val_losses = quadratic_losses(W, batch.gram_val, batch.cross_val, batch.ysq_val);
  if (!train_losses.allFinite() || !val_losses.allFinite())
    throw NumericFailure("probe fit produced non-finite loss");
  return W;
}

ProbeResult fit_constrained(const RealFn& g, const RepresentationOracle& oracle,
                            const DistributionSampler& dist,
                            const ProbeConfig& cfg, Rng& rng) {
  cfg.validate();
  auto xs_train = dist.draw(cfg.n_train, rng);
  auto xs_val = dist.draw(cfg.n_val, rng);
  Eigen::MatrixXd phi_train = oracle.features(xs_train);
  Eigen::MatrixXd phi_val = oracle.features(xs_val);
  Eigen::MatrixXd y_train(cfg.n_train, 1), y_val(cfg.n_val, 1);
  for (int i = 0; i < cfg.n_train; ++i) y_train(i, 0) = g(xs_train[static_cast<std::size_t>(i)]);
  for (int i = 0; i < cfg.n_val; ++i) y_val(i, 0) = g(xs_val[static_cast<std::size_t>(i)]);

  ProbeBatch batch = ProbeBatch::build(phi_train, y_train, phi_val, y_val);
  Eigen::VectorXd train_losses, val_losses;
  const bool project = cfg.mode == ProbeMode::theoretical;
  Eigen::MatrixXd W = batch_fit(batch, cfg.tau, cfg.iters, project, train_losses, val_losses);

  ProbeResult result;
  result.w = W.col(0);
  if (!project) {
    // Empirical mode reports the unprojected validation loss but still
    // returns a feasible coefficient vector.
    double norm = result.w.norm();
    if (norm > cfg.tau) result.w *= cfg.tau / norm;
  }
  result.train_loss = train_losses(0);
  result.val_loss = val_losses(0);
  result.decision = decide(result, cfg.eps);
  return result;
}

bool decide(const ProbeResult& result, double eps) {
  return result.val_loss <= 1.5 * eps;
}

std::vector<Clause> filter_top_k(
    const std::vector<std::pair<Clause, ProbeResult>>& candidates, int k) {
  if (k < 1) throw std::invalid_argument("filter_top_k: k must be >= 1");
  std::vector<std::size_t> idx(candidates.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    double la = candidates[a].second.val_loss, lb = candidates[b].second.val_loss;
    if (la != lb) return la < lb;
    return candidates[a].first < candidates[b].first;
  });
  std::vector<Clause> out;
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), idx.size());
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(candidates[idx[i]].first);
  return out;
}

}  // namespace distill
