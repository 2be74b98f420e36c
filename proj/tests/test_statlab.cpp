#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "distill/statlab.hpp"
#include "distill/suites.hpp"

using namespace distill;

namespace {

FiniteClass from_rows(std::vector<std::vector<std::uint8_t>> rows) {
  FiniteClass c;
  for (std::size_t i = 0; i < rows[0].size(); ++i)
    c.input_ids.push_back("p" + std::to_string(i));
  c.rows = std::move(rows);
  return c;
}

}  // namespace

TEST_CASE("all_functions and vc dimension") {
  for (int m = 1; m <= 4; ++m) {
    FiniteClass all = FiniteClass::all_functions(m);
    CHECK(all.num_functions() == (1 << m));
    CHECK(vc_dimension(all) == m);
  }

  // A single function shatters nothing.
  CHECK(vc_dimension(from_rows({{0, 1, 0}})) == 0);

  // Thresholds on a 4-point chain: VC dimension 1.
  FiniteClass thresholds = from_rows({{0, 0, 0, 0},
                                      {0, 0, 0, 1},
                                      {0, 0, 1, 1},
                                      {0, 1, 1, 1},
                                      {1, 1, 1, 1}});
  CHECK(vc_dimension(thresholds) == 1);
}

TEST_CASE("xor_class flips against the reference function") {
  FiniteClass g = from_rows({{0, 1, 0}, {1, 1, 1}});
  FiniteClass x = xor_class({1, 0, 1}, g);
  CHECK(x.rows == std::vector<std::vector<std::uint8_t>>{{1, 1, 1}, {0, 1, 0}});

  // xor against zero is the identity.
  FiniteClass same = xor_class({0, 0, 0}, g);
  CHECK(same.rows == g.rows);
}

TEST_CASE("pareto frontier removes dominated patterns") {
  // Order: g < g' iff every zero of g is a zero of g' (g' has the smaller
  // support). Maximal = minimal-support patterns.
  FiniteClass c = from_rows({{1, 1, 0},
                             {1, 0, 0},   // dominates {1,1,0}
                             {0, 0, 1},
                             {1, 0, 0},   // duplicate
                             {1, 1, 1}}); // dominated by everything
  FiniteClass pf = pareto_frontier(c);
  CHECK(pf.rows == std::vector<std::vector<std::uint8_t>>{{0, 0, 1}, {1, 0, 0}});

  // An antichain is untouched (up to dedupe/sort).
  FiniteClass anti = from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  CHECK(pareto_frontier(anti).rows == anti.canonical().rows);
}

TEST_CASE("vcdim_pf collapses when the frontier is small") {
  FiniteClass f = FiniteClass::all_functions(3);
  // For G = all functions, f xor G = all functions, whose frontier is the
  // single all-zero pattern; its VC dimension is 0.
  CHECK(vcdim_pf(f, f) == 0);
}

TEST_CASE("finite class CSV round trip") {
  FiniteClass c = from_rows({{0, 1, 1}, {1, 0, 0}});
  c.name = "demo";
  FiniteClass back = FiniteClass::from_csv(c.to_csv());
  CHECK(back.input_ids == c.input_ids);
  CHECK(back.rows == c.rows);
}

TEST_CASE("threshold simulation never fails with generous samples") {
  Rng rng(41);
  const int truncation = 50;
  std::vector<double> masses(truncation, 1.0 / truncation);
  double rate = simulate_threshold_distillation(0.1, 0.1, truncation, masses, 500,
                                                rng, 5000);
  CHECK(rate == 0.0);
}

TEST_CASE("threshold simulation failure rate stays under delta") {
  Rng rng(42);
  const int truncation = 80;
  std::vector<double> masses(truncation, 1.0 / truncation);
  const double eps = 0.1, delta = 0.1;
  const int trials = 4000;
  double rate = simulate_threshold_distillation(eps, delta, truncation, masses,
                                                trials, rng);
  double margin = 3.0 * std::sqrt(delta * (1.0 - delta) / trials);
  CHECK(rate <= delta + margin);
}

TEST_CASE("agnostic instance masses and error formula") {
  Rng rng(43);
  for (int m : {1, 4, 9}) {
    AgnosticInstance inst = AgnosticInstance::random(m, 0.3, rng);
    CHECK(static_cast<int>(inst.theta.size()) == m);
    double total = 0.0;
    for (int i = 1; i <= 2; ++i)
      for (int j = 0; j < m; ++j) total += inst.mass(i, j);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    // Matching theta exactly achieves the best error 1/2 - alpha/2.
    CHECK(agnostic_instance_error(inst, inst.theta) ==
          doctest::Approx(0.5 - 0.3 / 2).epsilon(1e-12));

    std::vector<int> mismatched(inst.theta);
    for (auto& t : mismatched) t = 3 - t;
    CHECK(agnostic_instance_error(inst, mismatched) ==
          doctest::Approx(0.5 + 0.3 / 2).epsilon(1e-12));

    std::uniform_int_distribution<int> pick(1, 2);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<int> theta_prime;
      for (int j = 0; j < m; ++j) theta_prime.push_back(pick(rng));
      CHECK(agnostic_instance_error(inst, theta_prime) ==
            doctest::Approx(agnostic_instance_error_direct(inst, theta_prime))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("statlab suite") {
  auto res = suites::run_statlab(401);
  CHECK(res.passed);
}
