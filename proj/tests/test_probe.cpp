#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "distill/probe.hpp"
#include "distill/suites.hpp"

using namespace distill;

namespace {

RepresentationOracle linear_oracle(int m, int d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd map(m, d);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < d; ++j)
      map(i, j) = normal(rng) / std::sqrt(static_cast<double>(d));
  RepresentationOracle oracle;
  oracle.m = m;
  oracle.norm_bound = std::sqrt(static_cast<double>(m));
  oracle.features = [map](const std::vector<BitInput>& xs) {
    return (map * to_matrix(xs)).array().tanh().matrix().eval();
  };
  return oracle;
}

}  // namespace

TEST_CASE("config validation") {
  ProbeConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  ProbeConfig bad = cfg;
  bad.tau = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.eps = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.n_val = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("theoretical sample schedule") {
  int base = theoretical_sample_count(1.0, 1.0, 0.1, 0.05);
  CHECK(base == static_cast<int>(std::ceil(8.0 / 0.01 * std::log(20.0))));
  // Monotone: more accuracy or bigger norms need more samples.
  CHECK(theoretical_sample_count(1.0, 1.0, 0.05, 0.05) > base);
  CHECK(theoretical_sample_count(2.0, 1.0, 0.1, 0.05) > base);
  CHECK(theoretical_sample_count(1.0, 3.0, 0.1, 0.05) > base);
  CHECK(theoretical_sample_count(1.0, 1.0, 0.1, 0.01) > base);
}

TEST_CASE("exactly linear targets fit to near-zero loss") {
  Rng rng(21);
  const int m = 16, d = 8;
  RepresentationOracle oracle = linear_oracle(m, d, rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd w_star(m);
  for (int i = 0; i < m; ++i) w_star(i) = normal(rng);
  w_star *= 0.9 / w_star.norm();
  RealFn g = [&](const BitInput& x) { return w_star.dot(oracle.evaluate(x)); };

  ProbeConfig cfg;
  cfg.tau = 1.0;
  cfg.eps = 0.05;
  cfg.n_train = 2000;
  cfg.n_val = 2000;
  cfg.iters = 500;
  cfg.mode = ProbeMode::theoretical;
  ProbeResult res = fit_constrained(g, oracle, DistributionSampler::uniform(d), cfg, rng);
  CHECK(res.val_loss < 0.01);
  CHECK(res.train_loss < 0.01);
  CHECK(res.w.norm() <= cfg.tau * (1.0 + 1e-9));
  CHECK(decide(res, cfg.eps));
  CHECK(res.decision == decide(res, cfg.eps));
}

TEST_CASE("projection keeps iterates in the tau ball") {
  Rng rng(22);
  const int m = 12, d = 8;
  RepresentationOracle oracle = linear_oracle(m, d, rng);
  // Target requires norm well above tau, so the constraint is active.
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd w_star(m);
  for (int i = 0; i < m; ++i) w_star(i) = normal(rng);
  w_star *= 10.0 / w_star.norm();
  RealFn g = [&](const BitInput& x) { return w_star.dot(oracle.evaluate(x)); };

  ProbeConfig cfg;
  cfg.tau = 0.5;
  cfg.eps = 0.05;
  cfg.n_train = 1000;
  cfg.n_val = 1000;
  cfg.iters = 300;
  cfg.mode = ProbeMode::theoretical;
  ProbeResult res = fit_constrained(g, oracle, DistributionSampler::uniform(d), cfg, rng);
  CHECK(res.w.norm() <= cfg.tau * (1.0 + 1e-9));
}

TEST_CASE("empirical mode also returns a tau-ball coefficient vector") {
  Rng rng(23);
  const int m = 12, d = 8;
  RepresentationOracle oracle = linear_oracle(m, d, rng);
  RealFn g = [&](const BitInput& x) { return 5.0 * oracle.evaluate(x).sum(); };
  ProbeConfig cfg;
  cfg.tau = 0.25;
  cfg.mode = ProbeMode::empirical;
  cfg.n_train = 500;
  cfg.n_val = 500;
  ProbeResult res = fit_constrained(g, oracle, DistributionSampler::uniform(d), cfg, rng);
  CHECK(res.w.norm() <= cfg.tau * (1.0 + 1e-9));
}

TEST_CASE("batched fit matches per-column fits") {
  Rng rng(24);
  const int m = 10, n = 400, k = 5;
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd phi(m, n), targets(n, k);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) phi(i, j) = normal(rng);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) targets(i, j) = normal(rng);

  ProbeBatch batch = ProbeBatch::build(phi, targets, phi, targets);
  Eigen::VectorXd train_all, val_all;
  Eigen::MatrixXd W = batch_fit(batch, 1.0, 200, true, train_all, val_all);

  for (int j = 0; j < k; ++j) {
    ProbeBatch single = ProbeBatch::build(phi, targets.col(j), phi, targets.col(j));
    Eigen::VectorXd t1, v1;
    Eigen::MatrixXd w1 = batch_fit(single, 1.0, 200, true, t1, v1);
    CHECK((W.col(j) - w1.col(0)).norm() == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(train_all(j) == doctest::Approx(t1(0)).epsilon(1e-9));
  }
}

TEST_CASE("top-k filter sorts by loss with lexicographic ties") {
  const int d = 6;
  auto mk = [&](std::vector<Literal> lits, double loss) {
    ProbeResult r;
    r.val_loss = loss;
    return std::pair<Clause, ProbeResult>{Clause(std::move(lits), d), r};
  };
  std::vector<std::pair<Clause, ProbeResult>> candidates{
      mk({{3, true}}, 0.5), mk({{1, true}}, 0.2), mk({{2, false}}, 0.2),
      mk({{0, false}}, 0.9), mk({{4, true}}, 0.1)};

  auto top = filter_top_k(candidates, 3);
  REQUIRE(top.size() == 3);
  CHECK(top[0] == Clause({{4, true}}, d));
  CHECK(top[1] == Clause({{1, true}}, d));  // ties at 0.2: lexicographic
  CHECK(top[2] == Clause({{2, false}}, d));

  CHECK(filter_top_k(candidates, 99).size() == 5);
}

TEST_CASE("probe soundness suite at reduced scale") {
  auto res = suites::run_probe_soundness(20, 101);
  CHECK(res.passed);
}
