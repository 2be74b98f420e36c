#include "distill/treedistill.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace distill {

BatchBoolFn batchify(BoolFn f) {
  return [f = std::move(f)](const std::vector<BitInput>& xs) {
    std::vector<std::uint8_t> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(f(x));
    return out;
  };
}

BatchBoolFn batchify(const ResidualMLP& model) {
  return [model](const std::vector<BitInput>& xs) {
    Eigen::VectorXd lg = model.logits(to_matrix(xs));
    std::vector<std::uint8_t> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
      out[i] = lg(static_cast<Eigen::Index>(i)) > 0.0 ? 1 : 0;
    return out;
  };
}

std::vector<Clause> FrontierState::all_clauses() const {
  std::vector<Clause> out;
  for (const auto& level : levels) out.insert(out.end(), level.begin(), level.end());
  return out;
}

namespace {

Eigen::MatrixXd clause_targets(const std::vector<Clause>& clauses, std::size_t begin,
                               std::size_t end, const std::vector<BitInput>& xs) {
  Eigen::MatrixXd y(static_cast<Eigen::Index>(xs.size()),
                    static_cast<Eigen::Index>(end - begin));
  for (std::size_t c = begin; c < end; ++c)
    for (std::size_t i = 0; i < xs.size(); ++i)
      y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c - begin)) =
          static_cast<double>(eval_and(clauses[c], xs[i]));
  return y;
}

}  // namespace

FrontierState phase1_search(const RepresentationOracle& oracle,
                            const DistributionSampler& dist,
                            const SearchConfig& cfg, Rng& rng) {
  if (cfg.depth > dist.dim())
    throw std::invalid_argument("phase1_search: depth exceeds dimension");
  const int r_levels = cfg.depth;
  FrontierState state;
  state.levels.push_back({Clause::empty(dist.dim())});

  for (int i = 0; i <= r_levels; ++i) {
    const auto& level = state.levels[static_cast<std::size_t>(i)];
    const bool probe_level =
        cfg.mode == ProbeMode::empirical ? (r_levels > 0) : (i < r_levels);

    std::vector<Clause> pruned;
    if (probe_level && !level.empty()) {
      auto xs_train = dist.draw(cfg.n_train, rng);
      auto xs_val = dist.draw(cfg.n_val, rng);
      Eigen::MatrixXd phi_train = oracle.features(xs_train);
      Eigen::MatrixXd phi_val = oracle.features(xs_val);

      ProbeBatch shared;
      shared.gram_train =
          phi_train * phi_train.transpose() / static_cast<double>(cfg.n_train);
      shared.gram_val = phi_val * phi_val.transpose() / static_cast<double>(cfg.n_val);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(shared.gram_train,
                                                        Eigen::EigenvaluesOnly);
      double lmax = es.eigenvalues().maxCoeff();
      shared.step = lmax > 0.0 ? 1.0 / (2.0 * lmax) : 1.0;

      std::vector<std::pair<Clause, ProbeResult>> results;
      results.reserve(level.size());
      const std::size_t chunk = 512;
      for (std::size_t begin = 0; begin < level.size(); begin += chunk) {
        const std::size_t end = std::min(begin + chunk, level.size());
        Eigen::MatrixXd yt = clause_targets(level, begin, end, xs_train);
        Eigen::MatrixXd yv = clause_targets(level, begin, end, xs_val);
        shared.cross_train = phi_train * yt / static_cast<double>(cfg.n_train);
        shared.cross_val = phi_val * yv / static_cast<double>(cfg.n_val);
        shared.ysq_train = yt.array().square().colwise().mean();
        shared.ysq_val = yv.array().square().colwise().mean();

        Eigen::VectorXd train_losses, val_losses;
        const bool project = cfg.mode == ProbeMode::theoretical;
        Eigen::MatrixXd W = batch_fit(shared, cfg.tau, cfg.iters, project,
                                      train_losses, val_losses);
        for (std::size_t c = begin; c < end; ++c) {
          ProbeResult res;
          res.w = W.col(static_cast<Eigen::Index>(c - begin));
          res.train_loss = train_losses(static_cast<Eigen::Index>(c - begin));
          res.val_loss = val_losses(static_cast<Eigen::Index>(c - begin));
          results.emplace_back(level[c], res);
        }
      }
      state.probe_count += static_cast<long>(level.size());

      if (cfg.mode == ProbeMode::theoretical) {
        const double eps_i = std::pow(2.0, -i - 3);
        for (auto& [clause, res] : results) {
          res.decision = decide(res, eps_i);
          if (res.decision) pruned.push_back(clause);
        }
      } else {
        pruned = filter_top_k(results, cfg.k_filter);
        std::sort(pruned.begin(), pruned.end());
      }
    } else {
      pruned = level;
    }
    state.accepted.push_back(pruned);

    if (i < r_levels) {
      std::unordered_set<Clause, ClauseHash> next;
      for (const auto& s : pruned)
        for (auto& succ : successors(s)) next.insert(std::move(succ));
      if (static_cast<long>(next.size()) > cfg.frontier_cap)
        throw BudgetExceeded("phase1_search: frontier exceeds cap at level " +
                             std::to_string(i + 1));
      std::vector<Clause> next_level(next.begin(), next.end());
      std::sort(next_level.begin(), next_level.end());
      state.levels.push_back(std::move(next_level));
    }
  }
  return state;
}

LeafValues estimate_leaf_values(const std::vector<Clause>& clauses,
                                const BatchBoolFn& f, const DistributionSampler& dist,
                                double eps, int size_budget, double delta, Rng& rng,
                                long sample_override) {
  if (size_budget < 1) throw std::invalid_argument("estimate_leaf_values: s must be >= 1");
  LeafValues out;
  const int d = dist.dim();

  if (dist.is_uniform() && d <= 12) {
    const std::uint64_t total = 1ull << d;
    std::vector<BitInput> xs;
    xs.reserve(total);
    for (std::uint64_t idx = 0; idx < total; ++idx)
      xs.push_back(BitInput::from_index(idx, d));
    std::vector<std::uint8_t> fx = f(xs);
    for (const auto& s : clauses) {
      double acc = 0.0;
      for (std::uint64_t idx = 0; idx < total; ++idx)
        if (eval_and(s, xs[idx]))
          acc += fx[idx] ? 1.0 : -1.0;
      out.v[s] = acc / static_cast<double>(total);
    }
    return out;
  }

  long n = sample_override;
  if (n <= 0) {
    const double s2 = static_cast<double>(size_budget) * size_budget;
    n = static_cast<long>(std::ceil(
        s2 / (2.0 * eps * eps) *
        std::log(4.0 * static_cast<double>(clauses.size()) / delta)));
  }
  out.samples_used = n;
  std::vector<double> acc(clauses.size(), 0.0);
  const long chunk = 8192;
  for (long done = 0; done < n; done += chunk) {
    const int take = static_cast<int>(std::min(chunk, n - done));
    auto xs = dist.draw(take, rng);
    std::vector<std::uint8_t> fx = f(xs);
    for (std::size_t c = 0; c < clauses.size(); ++c) {
      double a = 0.0;
      for (int i = 0; i < take; ++i)
        if (eval_and(clauses[c], xs[static_cast<std::size_t>(i)]))
          a += fx[static_cast<std::size_t>(i)] ? 1.0 : -1.0;
      acc[c] += a;
    }
  }
  for (std::size_t c = 0; c < clauses.size(); ++c)
    out.v[clauses[c]] = acc[c] / static_cast<double>(n);
  return out;
}

namespace {

struct DpCell {
  bool computed = false;
  double value = 0.0;
  bool is_leaf = true;
  int leaf_label = 0;
  int split_var = -1;
  int left_budget = 0;
  int low_idx = -1, high_idx = -1;
};

struct DpContext {
  const std::vector<Clause>* clauses;
  const LeafValues* values;
  std::vector<std::vector<std::pair<int, std::pair<int, int>>>> splits;  // (var, (low, high))
  std::vector<std::vector<DpCell>> table;  // [clause][(sigma-1)/2]
  int depth_budget = 0;

  const DpCell& best(int idx, int sigma);
};

const DpCell& DpContext::best(int idx, int sigma) {
  DpCell& cell = table[static_cast<std::size_t>(idx)][static_cast<std::size_t>((sigma - 1) / 2)];
  if (cell.computed) return cell;
  cell.computed = true;

  const Clause& s = (*clauses)[static_cast<std::size_t>(idx)];
  const double v = values->v.at(s);
  cell.value = std::abs(v);
  cell.leaf_label = v > 0.0 ? 1 : 0;

  if (s.size() < depth_budget && sigma >= 3) {
    for (const auto& [var, children] : splits[static_cast<std::size_t>(idx)]) {
      for (int left = 1; left <= sigma - 2; left += 2) {
        const int right = sigma - 1 - left;
        double val = best(children.first, left).value + best(children.second, right).value;
        if (val > cell.value) {
          cell.value = val;
          cell.is_leaf = false;
          cell.split_var = var;
          cell.left_budget = left;
          cell.low_idx = children.first;
          cell.high_idx = children.second;
        }
      }
    }
  }
  return cell;
}

int emit_tree(DpContext& ctx, int idx, int sigma,
              std::vector<DecisionTree::Node>& nodes) {
  const DpCell& cell = ctx.best(idx, sigma);
  int node_idx = static_cast<int>(nodes.size());
  nodes.emplace_back();
  if (cell.is_leaf) {
    nodes[static_cast<std::size_t>(node_idx)].label = cell.leaf_label;
  } else {
    int low = emit_tree(ctx, cell.low_idx, cell.left_budget, nodes);
    int high = emit_tree(ctx, cell.high_idx, sigma - 1 - cell.left_budget, nodes);
    nodes[static_cast<std::size_t>(node_idx)].var = cell.split_var;
    nodes[static_cast<std::size_t>(node_idx)].low = low;
    nodes[static_cast<std::size_t>(node_idx)].high = high;
  }
  return node_idx;
}

}  // namespace

StitchResult stitch_optimal_tree(const std::vector<Clause>& clauses,
                                 const LeafValues& values, int size_budget,
                                 int depth_budget) {
  if (size_budget < 1 || size_budget % 2 == 0)
    throw std::invalid_argument("stitch_optimal_tree: size budget must be odd and >= 1");

  std::vector<Clause> sorted = clauses;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::unordered_map<Clause, int, ClauseHash> index;
  for (std::size_t i = 0; i < sorted.size(); ++i)
    index.emplace(sorted[i], static_cast<int>(i));

  const int d = sorted.empty() ? 0 : sorted.front().dim();
  auto root_it = index.find(Clause::empty(d));
  if (sorted.empty() || root_it == index.end())
    throw std::invalid_argument("stitch_optimal_tree: clause set must contain the empty clause");

  DpContext ctx;
  ctx.clauses = &sorted;
  ctx.values = &values;
  ctx.depth_budget = depth_budget;
  ctx.splits.resize(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const Clause& s = sorted[i];
    if (s.size() >= depth_budget) continue;
    for (int var = 0; var < s.dim(); ++var) {
      if (s.uses_variable(var)) continue;
      auto lo = index.find(s.extended({var, false}));
      if (lo == index.end()) continue;
      auto hi = index.find(s.extended({var, true}));
      if (hi == index.end()) continue;
      ctx.splits[i].push_back({var, {lo->second, hi->second}});
    }
  }
  ctx.table.assign(sorted.size(),
                   std::vector<DpCell>(static_cast<std::size_t>((size_budget + 1) / 2)));

  const DpCell& root = ctx.best(root_it->second, size_budget);
  std::vector<DecisionTree::Node> nodes;
  emit_tree(ctx, root_it->second, size_budget, nodes);
  return StitchResult{DecisionTree(std::move(nodes), d), root.value};
}

DistillTreeResult distill_tree(const BatchBoolFn& f, const RepresentationOracle& oracle,
                               const DistributionSampler& dist,
                               const DistillTreeParams& params, Rng& rng) {
  const auto t0 = std::chrono::steady_clock::now();
  const int r = params.depth_budget;
  const int s = params.size_budget > 0 ? params.size_budget : (1 << (r + 1)) - 1;
  if (s % 2 == 0) throw std::invalid_argument("distill_tree: size budget must be odd");
  int search_depth = params.search_depth;
  if (search_depth < 0) {
    const int log_term = static_cast<int>(
        std::ceil(std::log2(4.0 * static_cast<double>(s) / params.eps)));
    search_depth = std::min(r, log_term);
  }
  if (search_depth > dist.dim())
    throw std::invalid_argument("distill_tree: search depth exceeds dimension");

  SearchConfig search;
  search.depth = search_depth;
  search.tau = params.tau;
  search.delta = params.delta;
  search.mode = params.mode;
  search.k_filter = params.k_filter;
  search.n_train = params.probe_n_train;
  search.n_val = params.probe_n_val;
  search.iters = params.probe_iters;
  search.frontier_cap = params.frontier_cap;

  FrontierState frontier = phase1_search(oracle, dist, search, rng);
  std::vector<Clause> clauses = frontier.all_clauses();

  LeafValues values = estimate_leaf_values(clauses, f, dist, params.eps, s,
                                           params.delta, rng, params.phase2_samples);
  StitchResult stitched = stitch_optimal_tree(clauses, values, s, r);

  DistillTreeResult out{std::move(stitched.tree), {}};
  for (const auto& level : frontier.levels) out.report.level_sizes.push_back(level.size());
  out.report.probe_count = frontier.probe_count;
  out.report.phase2_samples = values.samples_used;
  out.report.value = stitched.value;
  out.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

RepresentationOracle planted_oracle(const DecisionTree& tree) {
  auto clauses = intermediate_computations(tree);
  RepresentationOracle oracle;
  oracle.m = static_cast<int>(clauses.size());
  oracle.norm_bound = std::sqrt(static_cast<double>(tree.depth() + 1));
  oracle.features = [clauses](const std::vector<BitInput>& xs) {
    Eigen::MatrixXd phi(static_cast<Eigen::Index>(clauses.size()),
                        static_cast<Eigen::Index>(xs.size()));
    for (std::size_t j = 0; j < xs.size(); ++j)
      for (std::size_t i = 0; i < clauses.size(); ++i)
        phi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            static_cast<double>(eval_and(clauses[i], xs[j]));
    return phi;
  };
  return oracle;
}

PackingAuditResult packing_audit(const Eigen::MatrixXd& phi, int d,
                                 const std::vector<Clause>& family, int k,
                                 double tau) {
  const Eigen::Index n = phi.cols();
  if (n != (Eigen::Index{1} << d))
    throw std::invalid_argument("packing_audit: phi must cover all 2^d inputs");
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));

  // min_{||w|| <= tau} E[(w . phi(x) - y(x))^2] via the SVD of the scaled
  // design matrix; the constrained solution follows a ridge path in the
  // Lagrange multiplier.
  Eigen::MatrixXd design = phi.transpose() * inv_sqrt_n;  // n x m
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const Eigen::MatrixXd& u = svd.matrixU();

  PackingAuditResult result;
  result.losses.reserve(family.size());
  const double threshold = std::pow(2.0, -k - 2);

  for (const auto& s : family) {
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i)
      b(i) = static_cast<double>(eval_and(s, BitInput::from_index(
                                                 static_cast<std::uint64_t>(i), d))) *
             inv_sqrt_n;
    const double bsq = b.squaredNorm();  // E[y^2]
    Eigen::VectorXd c = u.transpose() * b;

    double loss;
    if (tau <= 0.0) {
      loss = bsq;
    } else {
      auto norm_sq_at = [&](double lambda) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < sigma.size(); ++i) {
          if (sigma(i) <= 1e-12) continue;
          double t = sigma(i) * c(i) / (sigma(i) * sigma(i) + lambda);
          acc += t * t;
        }
        return acc;
      };
      auto loss_at = [&](double lambda) {
        double acc = bsq;
        for (Eigen::Index i = 0; i < sigma.size(); ++i) {
          if (sigma(i) <= 1e-12) continue;
          double ratio = lambda / (sigma(i) * sigma(i) + lambda);
          acc += c(i) * c(i) * (ratio * ratio - 1.0);
        }
        return acc;
      };
      if (norm_sq_at(0.0) <= tau * tau) {
        loss = loss_at(0.0);
      } else {
        double lo = 0.0, hi = 1.0;
        while (norm_sq_at(hi) > tau * tau) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
          double mid = 0.5 * (lo + hi);
          (norm_sq_at(mid) > tau * tau ? lo : hi) = mid;
        }
        loss = loss_at(hi);
      }
    }
    result.losses.push_back(loss);
    if (loss <= threshold + 1e-12) ++result.representable;
  }

  const double mean_phi_sq = phi.array().square().colwise().sum().mean();
  result.bound = std::pow(2.0, 3 * k + 4) * tau * tau * mean_phi_sq;
  return result;
}

}  // namespace distill
