#include "distill/juntadistill.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace distill {

std::uint8_t JuntaSpec::evaluate(const BitInput& x) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < relevant.size(); ++i)
    if (x[relevant[i]]) idx |= (std::size_t{1} << i);
  return table[idx];
}

std::string JuntaSpec::to_json() const {
  nlohmann::json j;
  j["S"] = relevant;
  j["table"] = nlohmann::json::array();
  for (auto b : table) j["table"].push_back(static_cast<int>(b));
  return j.dump();
}

JuntaSpec JuntaSpec::from_json(const std::string& text, int d) {
  nlohmann::json j = nlohmann::json::parse(text);
  JuntaSpec spec;
  spec.d = d;
  spec.relevant = j.at("S").get<std::vector<int>>();
  for (const auto& b : j.at("table"))
    spec.table.push_back(static_cast<std::uint8_t>(b.get<int>()));
  if (spec.table.size() != (std::size_t{1} << spec.relevant.size()))
    throw std::invalid_argument("junta table length must be 2^|S|");
  return spec;
}

long dependence_pair_tests(int k_max, double delta) {
  return static_cast<long>(std::ceil(
      std::pow(2.0, k_max) *
      std::log(std::pow(2.0, k_max + 1) / delta)));
}

long junta_query_budget(int k_max, int d, double delta) {
  // One dependence sweep per discovered variable plus the final clean
  // sweep, each over <= 2^k assignments with 2t queries, then the hybrid
  // binary searches and the truth table read-out.
  const double t = static_cast<double>(dependence_pair_tests(k_max, delta));
  const double sweeps = static_cast<double>(k_max + 1);
  const double log_d = std::ceil(std::log2(std::max(2, d)));
  const double budget = sweeps * std::pow(2.0, k_max) * 2.0 * t +
                        static_cast<double>(k_max) * (log_d + 2.0) +
                        std::pow(2.0, k_max) + 200.0;
  return static_cast<long>(std::ceil(budget));
}

namespace {

/// Given f(x) != f(y) with x and y agreeing on the locked coordinates,
/// isolates one coordinate outside them that f depends on.
int isolate_coordinate(QueryCounter& f, BitInput x, BitInput y,
                       std::uint8_t fx) {
  std::vector<int> diff;
  for (int i = 0; i < x.dim(); ++i)
    if (x[i] != y[i]) diff.push_back(i);
  while (diff.size() > 1) {
    const std::size_t half = diff.size() / 2;
    BitInput mid = x;
    for (std::size_t i = 0; i < half; ++i)
      mid.bits[static_cast<std::size_t>(diff[i])] = y[diff[i]];
    if (f(mid) != fx) {
      y = std::move(mid);
      diff.resize(half);
    } else {
      // f(mid) == fx, so the pair (mid, y) still disagrees.
      x = std::move(mid);
      diff.erase(diff.begin(), diff.begin() + static_cast<std::ptrdiff_t>(half));
    }
  }
  return diff.front();
}

}  // namespace

RelevantVariables find_relevant_variables(QueryCounter& f, int d, int k_max,
                                          double delta, Rng& rng) {
  RelevantVariables out;
  const long pair_tests = dependence_pair_tests(k_max, delta);
  std::uniform_int_distribution<int> bit(0, 1);

  bool grew = true;
  while (grew) {
    grew = false;
    const std::size_t assignments = std::size_t{1} << out.indices.size();
    for (std::size_t a = 0; a < assignments && !grew; ++a) {
      for (long t = 0; t < pair_tests && !grew; ++t) {
        BitInput x(std::vector<std::uint8_t>(static_cast<std::size_t>(d)));
        BitInput y(std::vector<std::uint8_t>(static_cast<std::size_t>(d)));
        for (int i = 0; i < d; ++i) {
          x.bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(bit(rng));
          y.bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(bit(rng));
        }
        for (std::size_t s = 0; s < out.indices.size(); ++s) {
          const std::uint8_t v = static_cast<std::uint8_t>((a >> s) & 1u);
          x.bits[static_cast<std::size_t>(out.indices[s])] = v;
          y.bits[static_cast<std::size_t>(out.indices[s])] = v;
        }
        std::uint8_t fx = f(x);
        if (f(y) != fx) {
          int var = isolate_coordinate(f, std::move(x), std::move(y), fx);
          out.indices.push_back(var);
          std::sort(out.indices.begin(), out.indices.end());
          if (static_cast<int>(out.indices.size()) > k_max)
            throw PromiseViolation(
                "find_relevant_variables: more relevant variables than k_max");
          grew = true;
        }
      }
    }
  }
  out.queries = f.count();
  return out;
}

JuntaSpec build_truth_table(QueryCounter& f, const std::vector<int>& relevant, int d) {
  JuntaSpec spec;
  spec.d = d;
  spec.relevant = relevant;
  const std::size_t entries = std::size_t{1} << relevant.size();
  spec.table.resize(entries);
  for (std::size_t a = 0; a < entries; ++a) {
    BitInput x(std::vector<std::uint8_t>(static_cast<std::size_t>(d)));
    for (std::size_t s = 0; s < relevant.size(); ++s)
      x.bits[static_cast<std::size_t>(relevant[s])] =
          static_cast<std::uint8_t>((a >> s) & 1u);
    spec.table[a] = f(x);
  }
  return spec;
}

DecisionTree junta_to_tree(const JuntaSpec& junta, int d) {
  std::vector<DecisionTree::Node> nodes;
  const int k = junta.arity();
  auto build = [&](auto&& self, int level, std::size_t assignment) -> int {
    int idx = static_cast<int>(nodes.size());
    nodes.emplace_back();
    if (level == k) {
      nodes[static_cast<std::size_t>(idx)].label =
          static_cast<int>(junta.table[assignment]);
      return idx;
    }
    int low = self(self, level + 1, assignment);
    int high = self(self, level + 1, assignment | (std::size_t{1} << level));
    nodes[static_cast<std::size_t>(idx)].var = junta.relevant[static_cast<std::size_t>(level)];
    nodes[static_cast<std::size_t>(idx)].low = low;
    nodes[static_cast<std::size_t>(idx)].high = high;
    return idx;
  };
  build(build, 0, 0);
  return DecisionTree(std::move(nodes), d);
}

DistillJuntaResult distill_junta(const BoolFn& f, int d, int k_max, double delta,
                                 Rng& rng) {
  QueryCounter oracle(f);
  RelevantVariables rel = find_relevant_variables(oracle, d, k_max, delta, rng);
  JuntaSpec spec = build_truth_table(oracle, rel.indices, d);

  DistributionSampler unif = DistributionSampler::uniform(d);
  for (int i = 0; i < 100; ++i) {
    BitInput x = unif.draw_one(rng);
    if (f(x) != spec.evaluate(x))
      throw PromiseViolation("distill_junta: recovered junta disagrees with oracle");
  }
  return DistillJuntaResult{std::move(spec), oracle.count()};
}

}  // namespace distill
