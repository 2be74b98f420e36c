#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace distill {

using Rng = std::mt19937_64;
using BigInt = boost::multiprecision::cpp_int;

/// A point of {0,1}^d.
struct BitInput {
  std::vector<std::uint8_t> bits;

  BitInput() = default;
  explicit BitInput(std::vector<std::uint8_t> b) : bits(std::move(b)) {}

  int dim() const { return static_cast<int>(bits.size()); }
  std::uint8_t operator[](int i) const { return bits[static_cast<std::size_t>(i)]; }

  static BitInput from_index(std::uint64_t idx, int d);
  bool operator==(const BitInput&) const = default;
};

/// One literal: variable index plus polarity (positive = x_i, negative = !x_i).
struct Literal {
  int var = 0;
  bool positive = true;

  auto operator<=>(const Literal&) const = default;
};

/// A nondegenerate clause: a set of literals, at most one per variable,
/// kept sorted by variable index so equality and hashing are canonical.
class Clause {
 public:
  Clause() = default;
  Clause(std::vector<Literal> lits, int d);

  static Clause empty(int d) { return Clause({}, d); }

  int dim() const { return d_; }
  int size() const { return static_cast<int>(literals_.size()); }
  const std::vector<Literal>& literals() const { return literals_; }
  bool uses_variable(int var) const;

  /// Extends by one literal; the variable must be unused.
  Clause extended(Literal lit) const;

  std::string to_string() const;

  bool operator==(const Clause&) const = default;
  auto operator<=>(const Clause&) const = default;

 private:
  std::vector<Literal> literals_;
  int d_ = 0;
};

struct ClauseHash {
  std::size_t operator()(const Clause& c) const;
};

/// AND_S(x): 1 iff every literal of S is satisfied. AND over the empty
/// clause is identically 1.
std::uint8_t eval_and(const Clause& s, const BitInput& x);

/// All one-literal extensions of S by a variable unused in S.
std::vector<Clause> successors(const Clause& s);

/// Binary decision tree stored as an index-based arena. Node 0 is the root.
class DecisionTree {
 public:
  struct Node {
    int var = -1;    // split variable, -1 for leaves
    int label = -1;  // leaf label in {0,1}, -1 for internal nodes
    int low = -1;    // child followed when the bit is 0
    int high = -1;   // child followed when the bit is 1

    bool is_leaf() const { return var < 0; }
    bool operator==(const Node&) const = default;
  };

  DecisionTree() = default;
  DecisionTree(std::vector<Node> nodes, int d);

  static DecisionTree leaf(int label, int d);

  int dim() const { return d_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  int depth() const;
  const std::vector<Node>& nodes() const { return nodes_; }

  std::string to_json() const;
  static DecisionTree from_json(const std::string& text);

  bool operator==(const DecisionTree&) const = default;

 private:
  void validate() const;

  std::vector<Node> nodes_;
  int d_ = 0;
};

std::uint8_t eval_tree(const DecisionTree& t, const BitInput& x);

/// G_T: one clause per root-starting path, including the empty path.
/// Always has exactly size(T) elements.
std::vector<Clause> intermediate_computations(const DecisionTree& t);

/// Full binary tree of exactly the given depth; split variables drawn
/// uniformly from those unused on the root path, leaf labels i.i.d. bits.
DecisionTree random_tree(int d, int depth, Rng& rng);

/// sum_{i=0}^r 2^i C(d,i): the number of nondegenerate clauses with at
/// most r literals.
BigInt total_possible_probes(int d, int r);

/// Samples from a distribution over {0,1}^d: uniform, or the empirical
/// distribution of a fixed pool of rows.
class DistributionSampler {
 public:
  static DistributionSampler uniform(int d);
  static DistributionSampler empirical(std::vector<BitInput> pool);

  int dim() const { return d_; }
  BitInput draw_one(Rng& rng) const;
  std::vector<BitInput> draw(int count, Rng& rng) const;
  bool is_uniform() const { return pool_.empty(); }
  const std::vector<BitInput>& pool() const { return pool_; }

 private:
  int d_ = 0;
  std::vector<BitInput> pool_;  // empty for the uniform kind
};

using BoolFn = std::function<std::uint8_t(const BitInput&)>;

/// Empirical disagreement P[g != f] over n fresh draws.
double disagreement_sampled(const BoolFn& f, const BoolFn& g,
                            const DistributionSampler& dist, int n, Rng& rng);

/// Exact disagreement under the uniform distribution by enumerating all
/// 2^d inputs; requires d <= 24.
double disagreement_exact(const BoolFn& f, const BoolFn& g, int d);

}  // namespace distill
