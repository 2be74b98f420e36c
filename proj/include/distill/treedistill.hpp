#pragma once

#include <Eigen/Dense>
#include <optional>
#include <unordered_map>
#include <vector>

#include "distill/boolcore.hpp"
#include "distill/nnmodel.hpp"
#include "distill/probe.hpp"

namespace distill {

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Batched source-model evaluation; wraps scalar functions and lets the
/// network amortize forward passes.
using BatchBoolFn = std::function<std::vector<std::uint8_t>(const std::vector<BitInput>&)>;

BatchBoolFn batchify(BoolFn f);
BatchBoolFn batchify(const ResidualMLP& model);

struct SearchConfig {
  int depth = 2;  // R
  double tau = 1.0;
  double delta = 0.05;
  ProbeMode mode = ProbeMode::empirical;
  int k_filter = 100;
  int n_train = 1000;
  int n_val = 10000;
  int iters = 100;
  long frontier_cap = 1000000;
};

/// Clause sets per search level: S_i, the probe-accepted subsets P_i, and
/// the number of probes executed.
struct FrontierState {
  std::vector<std::vector<Clause>> levels;    // S_0 .. S_R
  std::vector<std::vector<Clause>> accepted;  // P_0 .. (per probed level)
  long probe_count = 0;

  std::vector<Clause> all_clauses() const;
};

/// Phase 1: grows S_{i+1} from the successors of the probe-accepted
/// clauses of S_i. Theoretical mode probes levels 0..R-1 with tolerance
/// 2^{-i-3} and confidence delta/(2|S_i|R); empirical mode probes every
/// level 0..R and keeps the k candidates of lowest validation loss.
FrontierState phase1_search(const RepresentationOracle& oracle,
                            const DistributionSampler& dist,
                            const SearchConfig& cfg, Rng& rng);

struct LeafValues {
  std::unordered_map<Clause, double, ClauseHash> v;
  long samples_used = 0;
};

/// v_S = E[AND_S(x)(2 f(x) - 1)] for every S, each within eps/s jointly
/// with probability >= 1 - delta. A shared sample of size
/// ceil(s^2/(2 eps^2) ln(4|S|/delta)) covers all clauses at once; for the
/// uniform distribution with d <= 12 the expectation is enumerated exactly.
LeafValues estimate_leaf_values(const std::vector<Clause>& clauses,
                                const BatchBoolFn& f, const DistributionSampler& dist,
                                double eps, int size_budget, double delta, Rng& rng,
                                long sample_override = -1);

struct StitchResult {
  DecisionTree tree;
  double value = 0.0;
};

/// Dynamic program over (clause, odd size budget): leaf value |v_S| with
/// label 1 iff v_S > 0, or a split on a variable whose two extensions are
/// both in S. Ties prefer leaf over split, then the smaller variable,
/// then the smaller left budget.
StitchResult stitch_optimal_tree(const std::vector<Clause>& clauses,
                                 const LeafValues& values, int size_budget,
                                 int depth_budget);

struct DistillTreeParams {
  int depth_budget = 3;          // r
  int size_budget = -1;          // s (odd); default 2^{r+1} - 1
  int search_depth = -1;         // R; default min(r, ceil(log2(4 s / eps)))
  double eps = 0.2;
  double delta = 0.05;
  double tau = 1.0;
  ProbeMode mode = ProbeMode::empirical;
  int k_filter = 100;
  int probe_n_train = 1000;
  int probe_n_val = 10000;
  int probe_iters = 100;
  long frontier_cap = 1000000;
  long phase2_samples = -1;      // -1: Hoeffding schedule
};

struct DistillTreeReport {
  std::vector<std::size_t> level_sizes;
  long probe_count = 0;
  long phase2_samples = 0;
  double value = 0.0;
  double wall_seconds = 0.0;
};

struct DistillTreeResult {
  DecisionTree tree;
  DistillTreeReport report;
};

/// Algorithm: clause search, leaf-value estimation, then DP stitching.
DistillTreeResult distill_tree(const BatchBoolFn& f, const RepresentationOracle& oracle,
                               const DistributionSampler& dist,
                               const DistillTreeParams& params, Rng& rng);

/// An oracle whose coordinates are the exact indicators of the tree's
/// intermediate computations (the planted-LRH case with tau = 1).
RepresentationOracle planted_oracle(const DecisionTree& tree);

struct PackingAuditResult {
  long representable = 0;  // clauses whose best feasible loss is <= 2^{-k-2}
  double bound = 0.0;      // 2^{3k+4} tau^2 E||phi||^2
  std::vector<double> losses;
};

/// Exact least-squares audit of the packing bound over an enumerated
/// input set. phi holds phi(x) for all 2^d inputs, one column per input
/// in index order.
PackingAuditResult packing_audit(const Eigen::MatrixXd& phi, int d,
                                 const std::vector<Clause>& family, int k,
                                 double tau);

}  // namespace distill
