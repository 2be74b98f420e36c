#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "distill/nnmodel.hpp"

using namespace distill;

namespace {

LabeledDataset parity_dataset(int d, int n, Rng& rng) {
  auto dist = DistributionSampler::uniform(d);
  BoolFn parity = [](const BitInput& x) {
    int s = 0;
    for (int i = 0; i < 2; ++i) s += x[i];
    return static_cast<std::uint8_t>(s % 2);
  };
  return gen_dataset(parity, "parity2", n, dist, rng);
}

}  // namespace

TEST_CASE("forward shapes and representation consistency") {
  Rng rng(1);
  ResidualMLP model(6, 3, 10, rng);
  CHECK(model.representation_dim() == 30);

  auto dist = DistributionSampler::uniform(6);
  auto xs = dist.draw(7, rng);
  Eigen::MatrixXd X = to_matrix(xs);
  CHECK(X.rows() == 6);
  CHECK(X.cols() == 7);

  Eigen::VectorXd logits;
  Eigen::MatrixXd phi;
  model.forward(X, logits, phi);
  CHECK(phi.rows() == 30);
  CHECK(phi.cols() == 7);
  for (int j = 0; j < 7; ++j) {
    CHECK(model.logit(xs[static_cast<std::size_t>(j)]) ==
          doctest::Approx(logits(j)).epsilon(1e-12));
    Eigen::VectorXd rep = model.representation(xs[static_cast<std::size_t>(j)]);
    CHECK((rep - phi.col(j)).norm() == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("gradients match central finite differences") {
  Rng rng(2);
  const int d = 4, n = 16;
  ResidualMLP model(d, 2, 6, rng);
  auto dist = DistributionSampler::uniform(d);
  auto xs = dist.draw(n, rng);
  Eigen::MatrixXd X = to_matrix(xs);
  Eigen::VectorXd y(n);
  std::uniform_int_distribution<int> bit(0, 1);
  for (int i = 0; i < n; ++i) y(i) = bit(rng);

  std::vector<Eigen::MatrixXd> gW;
  std::vector<Eigen::VectorXd> gb;
  Eigen::VectorXd gw_out;
  double gb_out = 0.0;
  loss_and_gradients(model, X, y, gW, gb, gw_out, gb_out);

  const double h = 1e-6;
  auto loss_at = [&](ResidualMLP& m) {
    std::vector<Eigen::MatrixXd> tW;
    std::vector<Eigen::VectorXd> tb;
    Eigen::VectorXd tw;
    double tbo = 0.0;
    return loss_and_gradients(m, X, y, tW, tb, tw, tbo);
  };

  // Spot-check a handful of coordinates in every parameter group.
  for (std::size_t layer : {std::size_t{0}, std::size_t{1}}) {
    for (auto [r, c] : {std::pair{0, 0}, std::pair{2, 3}, std::pair{5, 1}}) {
      ResidualMLP m = model;
      m.weights()[layer](r, c) += h;
      double up = loss_at(m);
      m.weights()[layer](r, c) -= 2 * h;
      double down = loss_at(m);
      double fd = (up - down) / (2 * h);
      CHECK(gW[layer](r, c) == doctest::Approx(fd).epsilon(1e-4));
    }
    for (int r : {0, 4}) {
      ResidualMLP m = model;
      m.biases()[layer](r) += h;
      double up = loss_at(m);
      m.biases()[layer](r) -= 2 * h;
      double down = loss_at(m);
      CHECK(gb[layer](r) == doctest::Approx((up - down) / (2 * h)).epsilon(1e-4));
    }
  }
  for (int r : {0, 3, 5}) {
    ResidualMLP m = model;
    m.output_weights()(r) += h;
    double up = loss_at(m);
    m.output_weights()(r) -= 2 * h;
    double down = loss_at(m);
    CHECK(gw_out(r) == doctest::Approx((up - down) / (2 * h)).epsilon(1e-4));
  }
  {
    ResidualMLP m = model;
    m.output_bias() += h;
    double up = loss_at(m);
    m.output_bias() -= 2 * h;
    double down = loss_at(m);
    CHECK(gb_out == doctest::Approx((up - down) / (2 * h)).epsilon(1e-4));
  }
}

TEST_CASE("model JSON round trip preserves behavior") {
  Rng rng(3);
  ResidualMLP model(8, 3, 12, rng);
  ResidualMLP back = ResidualMLP::from_json(model.to_json());
  CHECK(back.input_dim() == 8);
  CHECK(back.num_layers() == 3);
  CHECK(back.width() == 12);
  auto xs = DistributionSampler::uniform(8).draw(50, rng);
  for (const auto& x : xs)
    CHECK(back.logit(x) == doctest::Approx(model.logit(x)).epsilon(1e-12));
  CHECK(back.to_json() == model.to_json());
}

TEST_CASE("dataset CSV round trip") {
  Rng rng(4);
  auto dist = DistributionSampler::uniform(5);
  BoolFn f = [](const BitInput& x) { return x[0]; };
  LabeledDataset data = gen_dataset(f, "first-bit", 40, dist, rng);
  CHECK(data.size() == 40);
  for (int i = 0; i < data.size(); ++i)
    CHECK(data.labels[static_cast<std::size_t>(i)] ==
          data.inputs[static_cast<std::size_t>(i)][0]);

  LabeledDataset back = LabeledDataset::from_csv(data.to_csv());
  CHECK(back.inputs == data.inputs);
  CHECK(back.labels == data.labels);
  CHECK(back.provenance == data.provenance);
}

TEST_CASE("training fits a simple target and is seed-deterministic") {
  Rng rng(5);
  LabeledDataset data = parity_dataset(8, 2000, rng);

  TrainConfig cfg;
  cfg.layers = 3;
  cfg.width = 32;
  cfg.epochs = 30;
  cfg.seed = 17;
  TrainReport report;
  ResidualMLP model = train(data, cfg, &report);
  CHECK(report.train_accuracy >= 0.99);
  CHECK(report.epochs_run >= 1);
  CHECK(!report.step_losses.empty());

  ResidualMLP again = train(data, cfg);
  CHECK(again.to_json() == model.to_json());

  cfg.seed = 18;
  ResidualMLP other = train(data, cfg);
  CHECK(other.to_json() != model.to_json());
}

TEST_CASE("oracle wraps the representation with a norm bound") {
  Rng rng(6);
  ResidualMLP model(6, 3, 10, rng);
  RepresentationOracle oracle = make_oracle(model);
  CHECK(oracle.m == 30);
  CHECK(oracle.norm_bound > 0.0);

  auto xs = DistributionSampler::uniform(6).draw(500, rng);
  Eigen::MatrixXd phi = oracle.features(xs);
  CHECK(phi.rows() == 30);
  for (int j = 0; j < phi.cols(); ++j) {
    CHECK(phi.col(j).norm() <= oracle.norm_bound * (1.0 + 1e-9));
    CHECK((phi.col(j) - model.representation(xs[static_cast<std::size_t>(j)])).norm() ==
          doctest::Approx(0.0).epsilon(1e-12));
  }

  RepresentationOracle fixed = make_oracle(model, 123.0);
  CHECK(fixed.norm_bound == 123.0);
}
