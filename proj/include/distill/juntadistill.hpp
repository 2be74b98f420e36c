#pragma once

#include <stdexcept>
#include <vector>

#include "distill/boolcore.hpp"

namespace distill {

struct PromiseViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An explicit k-junta: the relevant indices (strictly increasing) and a
/// 2^k truth table indexed by assignments to those indices in order,
/// index i contributing bit (i >> position).
struct JuntaSpec {
  std::vector<int> relevant;
  std::vector<std::uint8_t> table;
  int d = 0;

  int arity() const { return static_cast<int>(relevant.size()); }
  std::uint8_t evaluate(const BitInput& x) const;

  std::string to_json() const;
  static JuntaSpec from_json(const std::string& text, int d);

  bool operator==(const JuntaSpec&) const = default;
};

/// Wraps a query oracle and counts evaluations.
class QueryCounter {
 public:
  explicit QueryCounter(BoolFn f) : f_(std::move(f)) {}
  std::uint8_t operator()(const BitInput& x) {
    ++count_;
    return f_(x);
  }
  long count() const { return count_; }

 private:
  BoolFn f_;
  long count_ = 0;
};

/// Pair tests per dependence check: ceil(2^k_max ln(2^{k_max+1}/delta)).
long dependence_pair_tests(int k_max, double delta);

/// Query budget asserted by the recovery tests; the constant is empirical.
long junta_query_budget(int k_max, int d, double delta);

struct RelevantVariables {
  std::vector<int> indices;
  long queries = 0;
};

/// Finds the relevant coordinates of a promised k-junta with membership
/// queries only. Dependence outside the current set S is tested with
/// random completion pairs at every assignment to S; a disagreeing pair
/// is binary-searched through hybrids to isolate one new coordinate.
RelevantVariables find_relevant_variables(QueryCounter& f, int d, int k_max,
                                          double delta, Rng& rng);

/// Reads the 2^|S| truth table, fixing irrelevant coordinates to 0.
JuntaSpec build_truth_table(QueryCounter& f, const std::vector<int>& relevant, int d);

/// Complete depth-k tree splitting on the junta's indices in order; the
/// leaves carry the truth table.
DecisionTree junta_to_tree(const JuntaSpec& junta, int d);

struct DistillJuntaResult {
  JuntaSpec junta;
  long queries = 0;
};

/// Full query-based extraction; touches no distribution samples. Runs a
/// 100-input verification pass and raises PromiseViolation on mismatch.
DistillJuntaResult distill_junta(const BoolFn& f, int d, int k_max, double delta,
                                 Rng& rng);

}  // namespace distill
