#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "distill/suites.hpp"
#include "distill/treedistill.hpp"

using namespace distill;

namespace {

RepresentationOracle random_feature_oracle(int m, int d, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd map(m, d);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < d; ++j) map(i, j) = normal(rng);
  RepresentationOracle oracle;
  oracle.m = m;
  oracle.norm_bound = map.rowwise().norm().sum();
  oracle.features = [map](const std::vector<BitInput>& xs) {
    return (map * to_matrix(xs)).eval();
  };
  return oracle;
}

double exact_leaf_value(const Clause& s, const BoolFn& f, int d) {
  double sum = 0.0;
  const std::uint64_t n = 1ull << d;
  for (std::uint64_t idx = 0; idx < n; ++idx) {
    BitInput x = BitInput::from_index(idx, d);
    sum += eval_and(s, x) * (2.0 * f(x) - 1.0);
  }
  return sum / static_cast<double>(n);
}

}  // namespace

TEST_CASE("search with R=0 probes nothing") {
  auto oracle = random_feature_oracle(4, 10, 1);
  SearchConfig cfg;
  cfg.depth = 0;
  Rng rng(1);
  FrontierState state = phase1_search(oracle, DistributionSampler::uniform(10), cfg, rng);
  CHECK(state.probe_count == 0);
  REQUIRE(state.levels.size() == 1);
  CHECK(state.all_clauses() == std::vector<Clause>{Clause::empty(10)});
}

TEST_CASE("empirical probe count at full scale matches the published table") {
  // d=100, depth 2, k=200: every 1- and 2-clause is probed along with the
  // empty clause, 1 + 200 + 19800 probes in total.
  auto oracle = random_feature_oracle(6, 100, 2);
  SearchConfig cfg;
  cfg.depth = 2;
  cfg.mode = ProbeMode::empirical;
  cfg.k_filter = 200;
  cfg.n_train = 100;
  cfg.n_val = 100;
  cfg.iters = 5;
  Rng rng(2);
  FrontierState state = phase1_search(oracle, DistributionSampler::uniform(100), cfg, rng);
  CHECK(state.probe_count == 20001);
  REQUIRE(state.levels.size() == 3);
  CHECK(state.levels[0].size() == 1);
  CHECK(state.levels[1].size() == 200);
  CHECK(state.levels[2].size() == 19800);
  CHECK(state.all_clauses().size() == 20001);
}

TEST_CASE("planted-LRH search recovers the intermediate computations") {
  Rng rng(3);
  for (int trial = 0; trial < 3; ++trial) {
    DecisionTree tree = random_tree(20, 3, rng);
    RepresentationOracle oracle = planted_oracle(tree);
    SearchConfig cfg;
    cfg.depth = 3;
    cfg.tau = 1.0;
    cfg.mode = ProbeMode::theoretical;
    cfg.n_train = 400;
    cfg.n_val = 400;
    cfg.iters = 200;
    FrontierState state = phase1_search(oracle, DistributionSampler::uniform(20), cfg, rng);
    auto clauses = state.all_clauses();
    std::set<Clause> found(clauses.begin(), clauses.end());
    for (const auto& s : intermediate_computations(tree))
      CHECK(found.count(s) == 1);
  }
}

TEST_CASE("frontier cap raises budget-exceeded") {
  auto oracle = random_feature_oracle(4, 30, 4);
  SearchConfig cfg;
  cfg.depth = 2;
  cfg.frontier_cap = 10;
  Rng rng(4);
  CHECK_THROWS_AS(phase1_search(oracle, DistributionSampler::uniform(30), cfg, rng),
                  BudgetExceeded);
}

TEST_CASE("exact leaf values for small uniform instances") {
  Rng rng(5);
  const int d = 8;
  DecisionTree tree = random_tree(d, 3, rng);
  BoolFn f = [&tree](const BitInput& x) { return eval_tree(tree, x); };
  auto clauses = intermediate_computations(tree);
  LeafValues values = estimate_leaf_values(clauses, batchify(f),
                                           DistributionSampler::uniform(d), 0.1, 15,
                                           0.05, rng);
  CHECK(values.samples_used == 0);  // enumerated exactly
  for (const auto& s : clauses)
    CHECK(values.v.at(s) == doctest::Approx(exact_leaf_value(s, f, d)).epsilon(1e-12));
}

TEST_CASE("sampled leaf values respect the accuracy budget") {
  Rng rng(6);
  const int d = 16, s_budget = 7;
  const double eps = 0.15;
  DecisionTree tree = random_tree(d, 2, rng);
  BoolFn f = [&tree](const BitInput& x) { return eval_tree(tree, x); };
  auto clauses = intermediate_computations(tree);
  LeafValues values = estimate_leaf_values(clauses, batchify(f),
                                           DistributionSampler::uniform(d), eps,
                                           s_budget, 0.05, rng);
  CHECK(values.samples_used > 0);
  for (const auto& s : clauses) {
    double exact = exact_leaf_value(s, f, d);
    CHECK(std::abs(values.v.at(s) - exact) <= eps / s_budget);
  }
}

TEST_CASE("stitching small hand instances") {
  const int d = 2;
  std::vector<Clause> clauses{Clause::empty(d),
                              Clause({{0, false}}, d), Clause({{0, true}}, d),
                              Clause({{1, false}}, d), Clause({{1, true}}, d)};
  LeafValues values;
  values.v[clauses[0]] = 0.1;
  values.v[clauses[1]] = -0.4;
  values.v[clauses[2]] = 0.5;
  values.v[clauses[3]] = 0.0;
  values.v[clauses[4]] = 0.1;

  // Size budget 1 forces the single best leaf.
  StitchResult leaf_only = stitch_optimal_tree(clauses, values, 1, 2);
  CHECK(leaf_only.value == doctest::Approx(0.1));
  CHECK(leaf_only.tree.size() == 1);

  // Size 3 allows one split; splitting on x0 scores 0.4 + 0.5 = 0.9.
  StitchResult split = stitch_optimal_tree(clauses, values, 3, 2);
  CHECK(split.value == doctest::Approx(0.9));
  CHECK(split.tree.size() == 3);
  CHECK(split.tree.nodes()[0].var == 0);
  // Low side: v = -0.4, so the leaf label is 0; high side 1.
  CHECK(eval_tree(split.tree, BitInput::from_index(0, d)) == 0);
  CHECK(eval_tree(split.tree, BitInput::from_index(1, d)) == 1);

  // Depth budget 0 forbids the split even with size to spare.
  StitchResult shallow = stitch_optimal_tree(clauses, values, 7, 0);
  CHECK(shallow.value == doctest::Approx(0.1));
}

TEST_CASE("dp against exhaustive enumeration") {
  auto res = suites::run_dp_oracle(200, 77);
  CHECK(res.passed);
}

TEST_CASE("stitched value equals agreement identity under exact values") {
  Rng rng(7);
  const int d = 9;
  for (int trial = 0; trial < 5; ++trial) {
    DecisionTree tree = random_tree(d, 3, rng);
    BoolFn f = [&tree](const BitInput& x) { return eval_tree(tree, x); };
    auto clauses = intermediate_computations(tree);
    LeafValues values = estimate_leaf_values(clauses, batchify(f),
                                             DistributionSampler::uniform(d), 0.1,
                                             15, 0.05, rng);
    StitchResult res = stitch_optimal_tree(clauses, values, 15, 3);
    BoolFn g = [&res](const BitInput& x) { return eval_tree(res.tree, x); };
    double agreement = 1.0 - disagreement_exact(f, g, d);
    CHECK(res.value == doctest::Approx(2.0 * agreement - 1.0).epsilon(1e-9));
  }
}

TEST_CASE("planted oracle distillation recovers the tree exactly") {
  Rng rng(8);
  const int d = 10;
  for (int trial = 0; trial < 3; ++trial) {
    DecisionTree tree = random_tree(d, 3, rng);
    RepresentationOracle oracle = planted_oracle(tree);
    BoolFn f = [&tree](const BitInput& x) { return eval_tree(tree, x); };

    DistillTreeParams params;
    params.depth_budget = 3;
    params.eps = 0.1;
    params.mode = ProbeMode::empirical;
    params.k_filter = 100;
    params.probe_n_train = 300;
    params.probe_n_val = 600;
    params.probe_iters = 100;
    DistillTreeResult res =
        distill_tree(batchify(f), oracle, DistributionSampler::uniform(d), params, rng);
    BoolFn g = [&res](const BitInput& x) { return eval_tree(res.tree, x); };
    CHECK(disagreement_exact(f, g, d) == 0.0);
    CHECK(res.report.probe_count > 0);
    CHECK(res.report.level_sizes.size() == 4);
  }
}

TEST_CASE("packing audit suite") {
  auto res = suites::run_packing(88);
  CHECK(res.passed);
}

TEST_CASE("packing audit accepts planted indicators and rejects at tau=0") {
  const int d = 6, k = 2;
  Clause planted({{0, true}, {1, true}}, d);
  const Eigen::Index n = 1 << d;
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(3, n);
  for (Eigen::Index idx = 0; idx < n; ++idx) {
    BitInput x = BitInput::from_index(static_cast<std::uint64_t>(idx), d);
    phi(0, idx) = eval_and(planted, x);
    phi(1, idx) = 1.0;
    phi(2, idx) = x[3];
  }
  std::vector<Clause> family{planted, Clause({{2, true}, {4, false}}, d)};
  PackingAuditResult audit = packing_audit(phi, d, family, k, 1.0);
  REQUIRE(audit.losses.size() == 2);
  CHECK(audit.losses[0] <= 1e-9);       // the planted clause is exactly representable
  CHECK(audit.representable >= 1);
  CHECK(static_cast<double>(audit.representable) <= audit.bound);

  PackingAuditResult zero = packing_audit(phi, d, family, k, 0.0);
  CHECK(zero.representable == 0);
}
