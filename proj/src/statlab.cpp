#include "distill/statlab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace distill {

FiniteClass FiniteClass::canonical() const {
  FiniteClass out;
  out.input_ids = input_ids;
  out.name = name;
  out.rows = rows;
  std::sort(out.rows.begin(), out.rows.end());
  out.rows.erase(std::unique(out.rows.begin(), out.rows.end()), out.rows.end());
  return out;
}

std::string FiniteClass::to_csv() const {
  std::ostringstream s;
  for (std::size_t i = 0; i < input_ids.size(); ++i) {
    if (i > 0) s << ",";
    s << input_ids[i];
  }
  s << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) s << ",";
      s << static_cast<int>(row[i]);
    }
    s << "\n";
  }
  return s.str();
}

FiniteClass FiniteClass::from_csv(const std::string& text) {
  FiniteClass c;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("finite class csv: empty");
  std::istringstream header(line);
  std::string cell;
  while (std::getline(header, cell, ',')) c.input_ids.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::uint8_t> row;
    std::istringstream r(line);
    while (std::getline(r, cell, ','))
      row.push_back(static_cast<std::uint8_t>(std::stoi(cell)));
    if (row.size() != c.input_ids.size())
      throw std::invalid_argument("finite class csv: ragged row");
    c.rows.push_back(std::move(row));
  }
  return c;
}

FiniteClass FiniteClass::all_functions(int m) {
  FiniteClass c;
  c.name = "all-functions";
  for (int i = 0; i < m; ++i) c.input_ids.push_back("x" + std::to_string(i + 1));
  for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
    std::vector<std::uint8_t> row(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) row[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
    c.rows.push_back(std::move(row));
  }
  return c;
}

namespace {

bool shatters(const FiniteClass& c, const std::vector<int>& subset) {
  const std::size_t want = std::size_t{1} << subset.size();
  std::vector<std::uint8_t> seen(want, 0);
  std::size_t distinct = 0;
  for (const auto& row : c.rows) {
    std::size_t pattern = 0;
    for (std::size_t i = 0; i < subset.size(); ++i)
      if (row[static_cast<std::size_t>(subset[i])]) pattern |= (std::size_t{1} << i);
    if (!seen[pattern]) {
      seen[pattern] = 1;
      if (++distinct == want) return true;
    }
  }
  return false;
}

bool any_subset_shattered(const FiniteClass& c, int size) {
  const int n = c.num_inputs();
  std::vector<int> subset(static_cast<std::size_t>(size));
  auto rec = [&](auto&& self, int pos, int next) -> bool {
    if (pos == size) return shatters(c, subset);
    for (int i = next; i <= n - (size - pos); ++i) {
      subset[static_cast<std::size_t>(pos)] = i;
      if (self(self, pos + 1, i + 1)) return true;
    }
    return false;
  };
  return rec(rec, 0, 0);
}

}  // namespace

int vc_dimension(const FiniteClass& c) {
  if (c.num_inputs() > 24)
    throw std::invalid_argument("vc_dimension: too many input points");
  const FiniteClass canon = c.canonical();
  int dim = 0;
  for (int size = 1; size <= canon.num_inputs(); ++size) {
    // Shattering a set of this size needs at least 2^size distinct rows.
    if (static_cast<std::uint64_t>(canon.num_functions()) < (1ull << size)) break;
    if (!any_subset_shattered(canon, size)) break;
    dim = size;
  }
  return dim;
}

FiniteClass xor_class(const std::vector<std::uint8_t>& f, const FiniteClass& g) {
  FiniteClass out;
  out.input_ids = g.input_ids;
  out.name = g.name + "-xor";
  out.rows.reserve(g.rows.size());
  for (const auto& row : g.rows) {
    if (row.size() != f.size())
      throw std::invalid_argument("xor_class: length mismatch");
    std::vector<std::uint8_t> r(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) r[i] = row[i] != f[i] ? 1 : 0;
    out.rows.push_back(std::move(r));
  }
  return out;
}

namespace {

// g < g' iff distinct and every zero of g is a zero of g'.
bool pareto_less(const std::vector<std::uint8_t>& g, const std::vector<std::uint8_t>& gp) {
  if (g == gp) return false;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g[i] == 0 && gp[i] != 0) return false;
  return true;
}

}  // namespace

FiniteClass pareto_frontier(const FiniteClass& c) {
  const FiniteClass canon = c.canonical();
  FiniteClass out;
  out.input_ids = canon.input_ids;
  out.name = canon.name + "-pf";
  for (const auto& g : canon.rows) {
    bool maximal = true;
    for (const auto& gp : canon.rows) {
      if (pareto_less(g, gp)) {
        maximal = false;
        break;
      }
    }
    if (maximal) out.rows.push_back(g);
  }
  return out;
}

int vcdim_pf(const FiniteClass& f, const FiniteClass& g) {
  if (f.num_inputs() != g.num_inputs())
    throw std::invalid_argument("vcdim_pf: incompatible input sets");
  int best = 0;
  for (const auto& row : f.rows)
    best = std::max(best, vc_dimension(pareto_frontier(xor_class(row, g))));
  return best;
}

double simulate_threshold_distillation(double eps, double delta, int truncation,
                                       const std::vector<double>& masses,
                                       int trials, Rng& rng,
                                       long sample_override) {
  if (eps <= 0.0 || eps >= 1.0 || delta <= 0.0 || delta >= 1.0)
    throw std::invalid_argument("simulate_threshold_distillation: bad eps/delta");
  if (static_cast<int>(masses.size()) != truncation)
    throw std::invalid_argument("simulate_threshold_distillation: masses vs truncation");

  const long n = sample_override > 0
                     ? sample_override
                     : static_cast<long>(std::ceil(std::log(1.0 / delta) / eps));

  // Exact tail masses: error of g_i is P[x > i].
  std::vector<double> tail(static_cast<std::size_t>(truncation) + 1, 0.0);
  for (int i = truncation - 1; i >= 0; --i)
    tail[static_cast<std::size_t>(i)] =
        tail[static_cast<std::size_t>(i) + 1] + masses[static_cast<std::size_t>(i)];

  std::discrete_distribution<int> draw(masses.begin(), masses.end());
  int failures = 0;
  for (int t = 0; t < trials; ++t) {
    int max_sample = 0;
    for (long i = 0; i < n; ++i) max_sample = std::max(max_sample, draw(rng) + 1);
    if (tail[static_cast<std::size_t>(max_sample)] > eps) ++failures;
  }
  return static_cast<double>(failures) / static_cast<double>(trials);
}

AgnosticInstance AgnosticInstance::random(int m, double alpha, Rng& rng) {
  AgnosticInstance inst;
  inst.half_size = m;
  inst.alpha = alpha;
  std::uniform_int_distribution<int> pick(1, 2);
  for (int i = 0; i < m; ++i) inst.theta.push_back(pick(rng));
  return inst;
}

double AgnosticInstance::mass(int i, int j) const {
  const double base = 1.0 / (2.0 * static_cast<double>(half_size));
  const bool planted_one = theta[static_cast<std::size_t>(j)] == i;
  return planted_one ? base * (1.0 - alpha) : base * (1.0 + alpha);
}

double agnostic_instance_error(const AgnosticInstance& inst,
                               const std::vector<int>& theta_prime) {
  if (static_cast<int>(theta_prime.size()) != inst.half_size)
    throw std::invalid_argument("agnostic_instance_error: size mismatch");
  int matches = 0;
  for (int j = 0; j < inst.half_size; ++j)
    if (inst.theta[static_cast<std::size_t>(j)] == theta_prime[static_cast<std::size_t>(j)])
      ++matches;
  return 0.5 + inst.alpha / 2.0 -
         inst.alpha * static_cast<double>(matches) / static_cast<double>(inst.half_size);
}

double agnostic_instance_error_direct(const AgnosticInstance& inst,
                                      const std::vector<int>& theta_prime) {
  double err = 0.0;
  for (int i = 1; i <= 2; ++i)
    for (int j = 0; j < inst.half_size; ++j)
      if (AgnosticInstance::hypothesis(theta_prime, i, j) != 0)
        err += inst.mass(i, j);
  return err;
}

}  // namespace distill
