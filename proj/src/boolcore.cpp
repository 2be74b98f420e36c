#include "distill/boolcore.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace distill {

BitInput BitInput::from_index(std::uint64_t idx, int d) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) bits[static_cast<std::size_t>(i)] = (idx >> i) & 1u;
  return BitInput(std::move(bits));
}

Clause::Clause(std::vector<Literal> lits, int d) : literals_(std::move(lits)), d_(d) {
  std::sort(literals_.begin(), literals_.end());
  for (std::size_t i = 0; i < literals_.size(); ++i) {
    const auto& lit = literals_[i];
    if (lit.var < 0 || lit.var >= d_)
      throw std::invalid_argument("clause literal index out of range");
    if (i > 0 && literals_[i - 1].var == lit.var)
      throw std::invalid_argument("degenerate clause: repeated variable");
  }
}

bool Clause::uses_variable(int var) const {
  return std::any_of(literals_.begin(), literals_.end(),
                     [var](const Literal& l) { return l.var == var; });
}

Clause Clause::extended(Literal lit) const {
  auto lits = literals_;
  lits.push_back(lit);
  return Clause(std::move(lits), d_);
}

std::string Clause::to_string() const {
  std::ostringstream out;
  out << "{";
  for (std::size_t i = 0; i < literals_.size(); ++i) {
    if (i > 0) out << ",";
    if (!literals_[i].positive) out << "!";
    out << "x" << literals_[i].var;
  }
  out << "}";
  return out.str();
}

std::size_t ClauseHash::operator()(const Clause& c) const {
  std::size_t h = static_cast<std::size_t>(c.dim());
  for (const auto& lit : c.literals()) {
    std::size_t v = (static_cast<std::size_t>(lit.var) << 1) | (lit.positive ? 1u : 0u);
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

std::uint8_t eval_and(const Clause& s, const BitInput& x) {
  if (s.dim() != x.dim()) throw std::invalid_argument("eval_and: dimension mismatch");
  for (const auto& lit : s.literals()) {
    bool sat = lit.positive ? x[lit.var] != 0 : x[lit.var] == 0;
    if (!sat) return 0;
  }
  return 1;
}

std::vector<Clause> successors(const Clause& s) {
  std::vector<Clause> out;
  out.reserve(2 * static_cast<std::size_t>(s.dim() - s.size()));
  for (int v = 0; v < s.dim(); ++v) {
    if (s.uses_variable(v)) continue;
    out.push_back(s.extended({v, false}));
    out.push_back(s.extended({v, true}));
  }
  return out;
}

DecisionTree::DecisionTree(std::vector<Node> nodes, int d)
    : nodes_(std::move(nodes)), d_(d) {
  validate();
}

DecisionTree DecisionTree::leaf(int label, int d) {
  Node n;
  n.label = label;
  return DecisionTree({n}, d);
}

void DecisionTree::validate() const {
  if (nodes_.empty()) throw std::invalid_argument("tree has no nodes");
  std::vector<std::uint8_t> used(static_cast<std::size_t>(d_), 0);
  // Checks structure and the no-repeated-variable-on-a-path invariant.
  auto walk = [&](auto&& self, int idx) -> void {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    if (n.is_leaf()) {
      if (n.label != 0 && n.label != 1)
        throw std::invalid_argument("leaf label must be 0 or 1");
      return;
    }
    if (n.var >= d_) throw std::invalid_argument("split variable out of range");
    if (used[static_cast<std::size_t>(n.var)])
      throw std::invalid_argument("variable repeats along a root path");
    if (n.low < 0 || n.high < 0 || n.low >= size() || n.high >= size())
      throw std::invalid_argument("child index out of range");
    used[static_cast<std::size_t>(n.var)] = 1;
    self(self, n.low);
    self(self, n.high);
    used[static_cast<std::size_t>(n.var)] = 0;
  };
  walk(walk, 0);
}

int DecisionTree::depth() const {
  auto walk = [&](auto&& self, int idx) -> int {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    if (n.is_leaf()) return 0;
    return 1 + std::max(self(self, n.low), self(self, n.high));
  };
  return walk(walk, 0);
}

namespace {

nlohmann::json node_to_json(const DecisionTree& t, int idx) {
  const auto& n = t.nodes()[static_cast<std::size_t>(idx)];
  if (n.is_leaf()) return nlohmann::json{{"leaf", n.label}};
  return nlohmann::json{{"var", n.var},
                        {"low", node_to_json(t, n.low)},
                        {"high", node_to_json(t, n.high)}};
}

int node_from_json(const nlohmann::json& j, std::vector<DecisionTree::Node>& nodes) {
  int idx = static_cast<int>(nodes.size());
  nodes.emplace_back();
  if (j.contains("leaf")) {
    nodes[static_cast<std::size_t>(idx)].label = j.at("leaf").get<int>();
  } else {
    int var = j.at("var").get<int>();
    int low = node_from_json(j.at("low"), nodes);
    int high = node_from_json(j.at("high"), nodes);
    nodes[static_cast<std::size_t>(idx)].var = var;
    nodes[static_cast<std::size_t>(idx)].low = low;
    nodes[static_cast<std::size_t>(idx)].high = high;
  }
  return idx;
}

}  // namespace

std::string DecisionTree::to_json() const {
  nlohmann::json j{{"d", d_}, {"root", node_to_json(*this, 0)}};
  return j.dump();
}

DecisionTree DecisionTree::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::vector<Node> nodes;
  node_from_json(j.at("root"), nodes);
  return DecisionTree(std::move(nodes), j.at("d").get<int>());
}

std::uint8_t eval_tree(const DecisionTree& t, const BitInput& x) {
  if (t.dim() != x.dim()) throw std::invalid_argument("eval_tree: dimension mismatch");
  int idx = 0;
  for (;;) {
    const auto& n = t.nodes()[static_cast<std::size_t>(idx)];
    if (n.is_leaf()) return static_cast<std::uint8_t>(n.label);
    idx = x[n.var] ? n.high : n.low;
  }
}

std::vector<Clause> intermediate_computations(const DecisionTree& t) {
  std::vector<Clause> out;
  out.reserve(static_cast<std::size_t>(t.size()));
  auto walk = [&](auto&& self, int idx, const Clause& path) -> void {
    out.push_back(path);
    const auto& n = t.nodes()[static_cast<std::size_t>(idx)];
    if (n.is_leaf()) return;
    self(self, n.low, path.extended({n.var, false}));
    self(self, n.high, path.extended({n.var, true}));
  };
  walk(walk, 0, Clause::empty(t.dim()));
  return out;
}

DecisionTree random_tree(int d, int depth, Rng& rng) {
  if (depth > d) throw std::invalid_argument("random_tree: depth exceeds dimension");
  std::vector<DecisionTree::Node> nodes;
  std::vector<int> free_vars(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) free_vars[static_cast<std::size_t>(i)] = i;

  auto build = [&](auto&& self, int remaining, std::vector<int>& avail) -> int {
    int idx = static_cast<int>(nodes.size());
    nodes.emplace_back();
    if (remaining == 0) {
      nodes[static_cast<std::size_t>(idx)].label =
          static_cast<int>(std::uniform_int_distribution<int>(0, 1)(rng));
      return idx;
    }
    std::size_t pick = std::uniform_int_distribution<std::size_t>(0, avail.size() - 1)(rng);
    int var = avail[pick];
    std::swap(avail[pick], avail.back());
    avail.pop_back();
    int low = self(self, remaining - 1, avail);
    int high = self(self, remaining - 1, avail);
    avail.push_back(var);
    std::swap(avail[pick], avail.back());
    nodes[static_cast<std::size_t>(idx)].var = var;
    nodes[static_cast<std::size_t>(idx)].low = low;
    nodes[static_cast<std::size_t>(idx)].high = high;
    return idx;
  };
  build(build, depth, free_vars);
  return DecisionTree(std::move(nodes), d);
}

BigInt total_possible_probes(int d, int r) {
  if (r > d) throw std::invalid_argument("total_possible_probes: r > d");
  BigInt total = 0;
  BigInt binom = 1;  // C(d, i)
  BigInt pow2 = 1;
  for (int i = 0; i <= r; ++i) {
    total += pow2 * binom;
    binom = binom * (d - i) / (i + 1);
    pow2 *= 2;
  }
  return total;
}

DistributionSampler DistributionSampler::uniform(int d) {
  DistributionSampler s;
  s.d_ = d;
  return s;
}

DistributionSampler DistributionSampler::empirical(std::vector<BitInput> pool) {
  if (pool.empty()) throw std::invalid_argument("empirical sampler needs a nonempty pool");
  DistributionSampler s;
  s.d_ = pool.front().dim();
  for (const auto& x : pool)
    if (x.dim() != s.d_) throw std::invalid_argument("empirical pool rows disagree on d");
  s.pool_ = std::move(pool);
  return s;
}

BitInput DistributionSampler::draw_one(Rng& rng) const {
  if (!pool_.empty()) {
    std::size_t i = std::uniform_int_distribution<std::size_t>(0, pool_.size() - 1)(rng);
    return pool_[i];
  }
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(d_));
  std::uniform_int_distribution<int> bit(0, 1);
  for (auto& b : bits) b = static_cast<std::uint8_t>(bit(rng));
  return BitInput(std::move(bits));
}

std::vector<BitInput> DistributionSampler::draw(int count, Rng& rng) const {
  std::vector<BitInput> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(draw_one(rng));
  return out;
}

double disagreement_sampled(const BoolFn& f, const BoolFn& g,
                            const DistributionSampler& dist, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("disagreement: n must be >= 1");
  int diff = 0;
  for (int i = 0; i < n; ++i) {
    BitInput x = dist.draw_one(rng);
    if (f(x) != g(x)) ++diff;
  }
  return static_cast<double>(diff) / static_cast<double>(n);
}

double disagreement_exact(const BoolFn& f, const BoolFn& g, int d) {
  if (d > 24) throw std::invalid_argument("disagreement_exact: d too large");
  std::uint64_t total = 1ull << d;
  std::uint64_t diff = 0;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    BitInput x = BitInput::from_index(idx, d);
    if (f(x) != g(x)) ++diff;
  }
  return static_cast<double>(diff) / static_cast<double>(total);
}

}  // namespace distill
