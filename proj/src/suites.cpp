#include "distill/suites.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "distill/boolcore.hpp"
#include "distill/juntadistill.hpp"
#include "distill/probe.hpp"
#include "distill/statlab.hpp"
#include "distill/treedistill.hpp"

namespace distill::suites {

namespace {

/// Exhaustive maximum of val(T, v) over trees with nodes in the clause
/// set, size <= sigma, depth <= r. Enumerates structures directly, with
/// no memoization, so it stays independent of the DP.
double brute_force_best_val(const Clause& at,
                            const std::unordered_map<Clause, double, ClauseHash>& v,
                            const std::unordered_map<Clause, bool, ClauseHash>& present,
                            int sigma, int depth_left) {
  double best = std::abs(v.at(at));  // best single-leaf option
  if (depth_left == 0 || sigma < 3) return best;
  for (int var = 0; var < at.dim(); ++var) {
    if (at.uses_variable(var)) continue;
    Clause lo = at.extended({var, false});
    Clause hi = at.extended({var, true});
    if (!present.count(lo) || !present.count(hi)) continue;
    for (int left = 1; left <= sigma - 2; left += 2) {
      double val = brute_force_best_val(lo, v, present, left, depth_left - 1) +
                   brute_force_best_val(hi, v, present, sigma - 1 - left,
                                        depth_left - 1);
      best = std::max(best, val);
    }
  }
  return best;
}

std::vector<Clause> clauses_up_to(int d, int max_len) {
  std::vector<Clause> out{Clause::empty(d)};
  std::size_t begin = 0;
  for (int len = 1; len <= max_len; ++len) {
    std::size_t end = out.size();
    std::unordered_map<Clause, bool, ClauseHash> seen;
    for (std::size_t i = begin; i < end; ++i)
      for (auto& s : successors(out[i]))
        if (seen.emplace(s, true).second) out.push_back(s);
    begin = end;
  }
  return out;
}

}  // namespace

SuiteResult run_dp_oracle(int instances, std::uint64_t seed) {
  Rng rng(seed);
  int failures = 0;
  for (int inst = 0; inst < instances; ++inst) {
    const int d = std::uniform_int_distribution<int>(2, 4)(rng);
    const int r = std::uniform_int_distribution<int>(1, 2)(rng);
    const int s = 2 * std::uniform_int_distribution<int>(0, 3)(rng) + 1;  // odd <= 7
    auto clauses = clauses_up_to(d, 2);
    LeafValues values;
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::unordered_map<Clause, bool, ClauseHash> present;
    for (const auto& c : clauses) {
      values.v[c] = unit(rng);
      present[c] = true;
    }
    StitchResult dp = stitch_optimal_tree(clauses, values, s, r);
    double brute = brute_force_best_val(Clause::empty(d), values.v, present, s, r);
    if (std::abs(dp.value - brute) > 1e-12) ++failures;
  }
  SuiteResult res;
  res.name = "dp-oracle";
  res.passed = failures == 0;
  std::ostringstream msg;
  msg << failures << "/" << instances << " instances off the exhaustive optimum";
  res.detail = msg.str();
  return res;
}

SuiteResult run_probe_soundness(int instances, std::uint64_t seed) {
  Rng rng(seed);
  const int m = 64;
  const double tau = 5.0, eps = 0.05;
  int realizable_accepted = 0, infeasible_rejected = 0;

  // Realizable side: g is a planted linear function of the features with
  // coefficient norm tau/2.
  for (int inst = 0; inst < instances; ++inst) {
    const int d = 10;
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd map(m, d);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < d; ++j) map(i, j) = normal(rng) / std::sqrt(static_cast<double>(d));
    RepresentationOracle oracle;
    oracle.m = m;
    oracle.norm_bound = std::sqrt(static_cast<double>(m));
    oracle.features = [map](const std::vector<BitInput>& xs) {
      return (map * to_matrix(xs)).array().tanh().matrix().eval();
    };
    Eigen::VectorXd w_star(m);
    for (int i = 0; i < m; ++i) w_star(i) = normal(rng);
    w_star *= (tau / 2.0) / w_star.norm();
    RealFn g = [&](const BitInput& x) { return w_star.dot(oracle.evaluate(x)); };

    ProbeConfig cfg;
    cfg.tau = tau;
    cfg.eps = eps;
    cfg.delta = 0.05;
    cfg.n_train = 3000;
    cfg.n_val = 3000;
    cfg.iters = 400;
    cfg.mode = ProbeMode::theoretical;
    auto dist = DistributionSampler::uniform(d);
    ProbeResult res = fit_constrained(g, oracle, dist, cfg, rng);
    if (decide(res, eps)) ++realizable_accepted;
  }

  // Infeasible side: g is orthogonal to the span of the features over the
  // whole (enumerated) domain and scaled to mean square 3*eps, so every
  // feasible w has loss >= 3*eps.
  for (int inst = 0; inst < instances; ++inst) {
    const int d = 8;
    const Eigen::Index n_points = 1 << d;
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd table(m, n_points);
    for (Eigen::Index j = 0; j < n_points; ++j)
      for (int i = 0; i < m; ++i) table(i, j) = normal(rng);
    Eigen::VectorXd z(n_points);
    for (Eigen::Index j = 0; j < n_points; ++j) z(j) = normal(rng);
    // Project z off the feature span.
    Eigen::MatrixXd a = table.transpose();  // n_points x m
    Eigen::VectorXd fitted = a * a.colPivHouseholderQr().solve(z);
    Eigen::VectorXd residual = z - fitted;
    residual *= std::sqrt(3.0 * eps * static_cast<double>(n_points)) / residual.norm();

    RepresentationOracle oracle;
    oracle.m = m;
    oracle.norm_bound = table.colwise().norm().maxCoeff();
    oracle.features = [table, d](const std::vector<BitInput>& xs) {
      Eigen::MatrixXd phi(table.rows(), static_cast<Eigen::Index>(xs.size()));
      for (std::size_t j = 0; j < xs.size(); ++j) {
        std::uint64_t idx = 0;
        for (int i = 0; i < d; ++i)
          if (xs[j][i]) idx |= (1ull << i);
        phi.col(static_cast<Eigen::Index>(j)) = table.col(static_cast<Eigen::Index>(idx));
      }
      return phi;
    };
    RealFn g = [&, d](const BitInput& x) {
      std::uint64_t idx = 0;
      for (int i = 0; i < d; ++i)
        if (x[i]) idx |= (1ull << i);
      return residual(static_cast<Eigen::Index>(idx));
    };

    ProbeConfig cfg;
    cfg.tau = tau;
    cfg.eps = eps;
    cfg.delta = 0.05;
    cfg.n_train = 3000;
    cfg.n_val = 3000;
    cfg.iters = 400;
    cfg.mode = ProbeMode::theoretical;
    auto dist = DistributionSampler::uniform(d);
    ProbeResult res = fit_constrained(g, oracle, dist, cfg, rng);
    if (!decide(res, eps)) ++infeasible_rejected;
  }

  SuiteResult res;
  res.name = "probe-soundness";
  res.passed = realizable_accepted >= (instances * 95) / 100 &&
               infeasible_rejected >= (instances * 95) / 100;
  std::ostringstream msg;
  msg << "accepted " << realizable_accepted << "/" << instances
      << " realizable, rejected " << infeasible_rejected << "/" << instances
      << " infeasible";
  res.detail = msg.str();
  return res;
}

namespace {

JuntaSpec random_full_arity_junta(int d, int k, Rng& rng) {
  // Resamples the table until every chosen coordinate actually matters,
  // so exact recovery of the index set is well defined.
  for (;;) {
    JuntaSpec spec;
    spec.d = d;
    std::vector<int> vars(static_cast<std::size_t>(d));
    std::iota(vars.begin(), vars.end(), 0);
    std::shuffle(vars.begin(), vars.end(), rng);
    spec.relevant.assign(vars.begin(), vars.begin() + k);
    std::sort(spec.relevant.begin(), spec.relevant.end());
    spec.table.resize(std::size_t{1} << k);
    std::uniform_int_distribution<int> bit(0, 1);
    for (auto& b : spec.table) b = static_cast<std::uint8_t>(bit(rng));
    bool all_matter = true;
    for (int i = 0; i < k && all_matter; ++i) {
      bool matters = false;
      for (std::size_t a = 0; a < spec.table.size(); ++a)
        if (spec.table[a] != spec.table[a ^ (std::size_t{1} << i)]) {
          matters = true;
          break;
        }
      all_matter = matters;
    }
    if (all_matter || k == 0) return spec;
  }
}

}  // namespace

SuiteResult run_junta(int instances, std::uint64_t seed) {
  Rng rng(seed);
  const double delta = 0.01;
  int exact = 0;
  long max_queries = 0;
  bool within_budget = true;

  for (int inst = 0; inst < instances; ++inst) {
    const int d = 100;
    const int k = std::uniform_int_distribution<int>(0, 4)(rng);
    JuntaSpec planted = random_full_arity_junta(d, k, rng);
    BoolFn f = [&planted](const BitInput& x) { return planted.evaluate(x); };
    DistillJuntaResult res = distill_junta(f, d, 4, delta, rng);
    if (res.junta.relevant == planted.relevant && res.junta.table == planted.table)
      ++exact;
    max_queries = std::max(max_queries, res.queries);
    if (res.queries > junta_query_budget(4, d, delta)) within_budget = false;
  }

  // Composition: the depth-k tree built from a recovered junta computes
  // the same function, checked exhaustively at small d.
  bool composition_ok = true;
  for (int inst = 0; inst < 10; ++inst) {
    const int d = 10;
    const int k = std::uniform_int_distribution<int>(0, 3)(rng);
    JuntaSpec planted = random_full_arity_junta(d, k, rng);
    BoolFn f = [&planted](const BitInput& x) { return planted.evaluate(x); };
    DistillJuntaResult res = distill_junta(f, d, 3, delta, rng);
    DecisionTree tree = junta_to_tree(res.junta, d);
    BoolFn tree_fn = [&tree](const BitInput& x) { return eval_tree(tree, x); };
    if (disagreement_exact(f, tree_fn, d) != 0.0) composition_ok = false;
  }

  SuiteResult res;
  res.name = "junta";
  res.passed = exact == instances && within_budget && composition_ok;
  std::ostringstream msg;
  msg << exact << "/" << instances << " exact recoveries, max queries "
      << max_queries << " (budget " << junta_query_budget(4, 100, delta) << ")"
      << (composition_ok ? ", composition ok" : ", composition FAILED");
  res.detail = msg.str();
  return res;
}

SuiteResult run_packing(std::uint64_t seed) {
  Rng rng(seed);
  bool ok = true;
  std::ostringstream msg;

  // Planted disjoint indicators with zero padding.
  {
    const int d = 9, k = 3, planted = 3, m = 8;
    std::vector<Clause> planted_clauses;
    for (int t = 0; t < planted; ++t) {
      std::vector<Literal> lits;
      for (int j = 0; j < k; ++j) lits.push_back({t * k + j, true});
      planted_clauses.emplace_back(lits, d);
    }
    const Eigen::Index n = 1 << d;
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(m, n);
    for (Eigen::Index x = 0; x < n; ++x) {
      BitInput input = BitInput::from_index(static_cast<std::uint64_t>(x), d);
      for (int t = 0; t < planted; ++t)
        phi(t, x) = static_cast<double>(eval_and(planted_clauses[static_cast<std::size_t>(t)], input));
    }
    // Family: all nondegenerate k-clauses.
    std::vector<Clause> family;
    std::vector<int> combo(k);
    auto rec = [&](auto&& self, int pos, int next, std::vector<Literal>& lits) -> void {
      if (pos == k) {
        family.emplace_back(lits, d);
        return;
      }
      for (int v = next; v < d; ++v) {
        for (bool polarity : {false, true}) {
          lits.push_back({v, polarity});
          self(self, pos + 1, v + 1, lits);
          lits.pop_back();
        }
      }
    };
    std::vector<Literal> lits;
    rec(rec, 0, 0, lits);

    PackingAuditResult audit = packing_audit(phi, d, family, k, 1.0);
    bool planted_found = audit.representable >= planted;
    bool bound_holds = static_cast<double>(audit.representable) <= audit.bound;
    ok = ok && planted_found && bound_holds && audit.bound >= planted;
    msg << "planted: count " << audit.representable << " bound " << audit.bound;

    // tau = 0: nothing fits, E[AND_S^2] = 2^-k > 2^{-k-2}.
    PackingAuditResult zero = packing_audit(phi, d, family, k, 0.0);
    ok = ok && zero.representable == 0;
    msg << "; tau=0 count " << zero.representable;
  }

  // Random Gaussian features: the bound is the assertion.
  {
    const int d = 10, k = 2, m = 8;
    const Eigen::Index n = 1 << d;
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd phi(m, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i) phi(i, j) = normal(rng);
    std::vector<Clause> family;
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b)
        for (int pol = 0; pol < 4; ++pol)
          family.push_back(Clause({{a, (pol & 1) != 0}, {b, (pol & 2) != 0}}, d));
    PackingAuditResult audit = packing_audit(phi, d, family, k, 1.0);
    ok = ok && static_cast<double>(audit.representable) <= audit.bound;
    msg << "; gaussian: count " << audit.representable << " bound " << audit.bound;
  }

  SuiteResult res;
  res.name = "packing";
  res.passed = ok;
  res.detail = msg.str();
  return res;
}

namespace {

FiniteClass theorem11_truncated(int truncation) {
  // Antichain on a three-block grid: one row per nonempty S <= [n] with a
  // private tag column in the second block (the tag keys the row to S, so
  // no row's support contains another's), plus n singleton rows in the
  // third block. Every row is Pareto-maximal while the first block alone
  // already shatters n points.
  FiniteClass c;
  c.name = "incomparable-grid";
  const int n = truncation;
  const int tags = (1 << n) - 1;
  for (int i = 1; i <= n; ++i) c.input_ids.push_back("(1," + std::to_string(i) + ")");
  for (int i = 1; i <= tags; ++i) c.input_ids.push_back("(2," + std::to_string(i) + ")");
  for (int i = 1; i <= n; ++i) c.input_ids.push_back("(3," + std::to_string(i) + ")");
  const int width = n + tags + n;
  for (int s_mask = 1; s_mask <= tags; ++s_mask) {
    std::vector<std::uint8_t> row(static_cast<std::size_t>(width), 0);
    for (int i = 0; i < n; ++i)
      if ((s_mask >> i) & 1) row[static_cast<std::size_t>(i)] = 1;
    row[static_cast<std::size_t>(n + s_mask - 1)] = 1;
    c.rows.push_back(std::move(row));
  }
  for (int j = 0; j < n; ++j) {
    std::vector<std::uint8_t> row(static_cast<std::size_t>(width), 0);
    row[static_cast<std::size_t>(n + tags + j)] = 1;
    c.rows.push_back(std::move(row));
  }
  return c;
}

}  // namespace

SuiteResult run_statlab(std::uint64_t seed) {
  Rng rng(seed);
  bool ok = true;
  std::ostringstream msg;

  for (int m = 1; m <= 4; ++m) {
    int dim = vc_dimension(FiniteClass::all_functions(m));
    if (dim != m) ok = false;
    msg << "vc(all-" << m << ")=" << dim << " ";
  }

  {
    FiniteClass grid = theorem11_truncated(3);
    FiniteClass pf = pareto_frontier(grid);
    bool whole = pf.rows == grid.canonical().rows;
    bool shatters = vc_dimension(grid) >= 3;
    ok = ok && whole && shatters;
    msg << "; pf-whole-class=" << (whole ? "yes" : "NO")
        << "; grid-vc>=3=" << (shatters ? "yes" : "NO");
  }

  {
    bool all_zero = true;
    for (int inst = 0; inst < 20; ++inst) {
      const int points = 5, funcs = 6;
      FiniteClass c;
      for (int i = 0; i < points; ++i) c.input_ids.push_back("p" + std::to_string(i));
      std::uniform_int_distribution<int> bit(0, 1);
      for (int f = 0; f < funcs; ++f) {
        std::vector<std::uint8_t> row(points);
        for (auto& b : row) b = static_cast<std::uint8_t>(bit(rng));
        c.rows.push_back(std::move(row));
      }
      if (vcdim_pf(c, c) != 0) all_zero = false;
    }
    ok = ok && all_zero;
    msg << "; vcdimpf(F,F)=0: " << (all_zero ? "yes" : "NO");
  }

  {
    const int trials = 10000, truncation = 100;
    std::vector<double> uniform_masses(truncation, 1.0 / truncation);
    for (double eps : {0.1, 0.05}) {
      for (double delta : {0.1, 0.05}) {
        double rate =
            simulate_threshold_distillation(eps, delta, truncation, uniform_masses,
                                            trials, rng);
        double margin = 3.0 * std::sqrt(delta * (1.0 - delta) / trials);
        if (rate > delta + margin) ok = false;
        msg << "; thr(" << eps << "," << delta << ")=" << rate;
      }
    }
  }

  {
    bool formula_ok = true;
    for (int inst = 0; inst < 50; ++inst) {
      const int m = std::uniform_int_distribution<int>(1, 12)(rng);
      const double alpha = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      AgnosticInstance instance = AgnosticInstance::random(m, alpha, rng);
      std::vector<int> theta_prime;
      std::uniform_int_distribution<int> pick(1, 2);
      for (int i = 0; i < m; ++i) theta_prime.push_back(pick(rng));
      double a = agnostic_instance_error(instance, theta_prime);
      double b = agnostic_instance_error_direct(instance, theta_prime);
      if (std::abs(a - b) > 1e-12) formula_ok = false;
    }
    ok = ok && formula_ok;
    msg << "; error-formula=" << (formula_ok ? "match" : "MISMATCH");
  }

  SuiteResult res;
  res.name = "statlab";
  res.passed = ok;
  res.detail = msg.str();
  return res;
}

SuiteResult run_suite(const std::string& name) {
  if (name == "dp-oracle") return run_dp_oracle();
  if (name == "probe-soundness") return run_probe_soundness();
  if (name == "junta") return run_junta();
  if (name == "packing") return run_packing();
  if (name == "statlab") return run_statlab();
  throw std::invalid_argument("unknown suite: " + name);
}

std::vector<std::string> suite_names() {
  return {"dp-oracle", "probe-soundness", "junta", "packing", "statlab"};
}

}  // namespace distill::suites
