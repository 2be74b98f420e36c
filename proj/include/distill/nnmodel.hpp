#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "distill/boolcore.hpp"

namespace distill {

struct TrainingFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input width d, L hidden layers of width h with identity skip
/// connections, tanh nonlinearity, scalar output logit.
class ResidualMLP {
 public:
  ResidualMLP() = default;
  ResidualMLP(int d, int layers, int width, Rng& rng);

  int input_dim() const { return d_; }
  int num_layers() const { return layers_; }
  int width() const { return width_; }
  int representation_dim() const { return layers_ * width_; }

  /// Returns the output logit for a batch of inputs (columns of X).
  Eigen::VectorXd logits(const Eigen::MatrixXd& X) const;

  /// Logits plus the concatenated hidden activations, one column per input.
  /// Phi has L*h rows.
  void forward(const Eigen::MatrixXd& X, Eigen::VectorXd& logits_out,
               Eigen::MatrixXd& phi_out) const;

  std::uint8_t predict(const BitInput& x) const;
  double logit(const BitInput& x) const;
  Eigen::VectorXd representation(const BitInput& x) const;

  std::string to_json() const;
  static ResidualMLP from_json(const std::string& text);

  // Parameter access for training and gradient checks.
  std::vector<Eigen::MatrixXd>& weights() { return W_; }
  std::vector<Eigen::VectorXd>& biases() { return b_; }
  Eigen::VectorXd& output_weights() { return w_out_; }
  double& output_bias() { return b_out_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return W_; }
  const std::vector<Eigen::VectorXd>& biases() const { return b_; }
  const Eigen::VectorXd& output_weights() const { return w_out_; }
  double output_bias() const { return b_out_; }

 private:
  int d_ = 0, layers_ = 0, width_ = 0;
  std::vector<Eigen::MatrixXd> W_;  // W_[0]: h x d, W_[i>0]: h x h
  std::vector<Eigen::VectorXd> b_;
  Eigen::VectorXd w_out_;
  double b_out_ = 0.0;
};

Eigen::MatrixXd to_matrix(const std::vector<BitInput>& xs);

struct LabeledDataset {
  std::vector<BitInput> inputs;
  std::vector<std::uint8_t> labels;
  std::string provenance;

  int size() const { return static_cast<int>(inputs.size()); }
  std::string to_csv() const;
  static LabeledDataset from_csv(const std::string& text);
};

LabeledDataset gen_dataset(const BoolFn& target, const std::string& provenance,
                           int n, const DistributionSampler& dist, Rng& rng);

struct TrainConfig {
  int layers = 5;
  int width = 128;
  int epochs = 20;
  int batch_size = 128;
  double step_size = 1e-3;
  std::uint64_t seed = 0;
  // Stops once full training accuracy reaches this level; the check runs
  // at epoch boundaries so the stopping rule is deterministic.
  double target_accuracy = 1.0;
};

struct TrainReport {
  double train_accuracy = 0.0;
  std::vector<double> step_losses;
  int epochs_run = 0;
};

/// Adam on the logistic loss. Deterministic given the seed.
ResidualMLP train(const LabeledDataset& data, const TrainConfig& cfg,
                  TrainReport* report = nullptr);

/// Mean logistic loss and parameter gradients at the current weights;
/// used by the trainer and by finite-difference checks.
double loss_and_gradients(const ResidualMLP& model, const Eigen::MatrixXd& X,
                          const Eigen::VectorXd& y,
                          std::vector<Eigen::MatrixXd>& gW,
                          std::vector<Eigen::VectorXd>& gb,
                          Eigen::VectorXd& gw_out, double& gb_out);

/// The representation map phi with its dimension m and norm bound B.
struct RepresentationOracle {
  int m = 0;
  double norm_bound = 0.0;
  // Columns of the result are phi(x) for the given inputs.
  std::function<Eigen::MatrixXd(const std::vector<BitInput>&)> features;

  Eigen::VectorXd evaluate(const BitInput& x) const {
    return features(std::vector<BitInput>{x}).col(0);
  }
};

/// Wraps the model's concatenated activations; B defaults to 1.05x the
/// max norm over 10^4 uniform draws unless supplied.
RepresentationOracle make_oracle(const ResidualMLP& model,
                                 std::optional<double> norm_bound = {},
                                 std::uint64_t bound_seed = 1234);

}  // namespace distill
