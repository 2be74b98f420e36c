#include "distill/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <iomanip>
#include <sstream>
#include <thread>
#include <tuple>

namespace distill {

namespace {

int resolve_workers(int configured) {
  if (configured > 0) return configured;
  if (const char* env = std::getenv("DISTILL_WORKERS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

std::uint64_t cell_seed(std::uint64_t base, int depth, int k, int seed_index) {
  // splitmix-style scramble so neighboring cells get unrelated streams
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(depth) * 1000003u +
                                                    static_cast<std::uint64_t>(k) * 1009u +
                                                    static_cast<std::uint64_t>(seed_index) + 1u);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

void run_cell(const Figure4Config& cfg, Figure4Row& row) {
  try {
    Rng rng(row.seed);
    DecisionTree target = random_tree(cfg.d, row.depth, rng);
    BoolFn target_fn = [&target](const BitInput& x) { return eval_tree(target, x); };
    auto dist = DistributionSampler::uniform(cfg.d);

    LabeledDataset data = gen_dataset(target_fn, "figure4", cfg.train_samples, dist, rng);
    TrainConfig train_cfg = cfg.train;
    train_cfg.seed = row.seed ^ 0x5bf03635u;
    ResidualMLP model = train(data, train_cfg);
    RepresentationOracle oracle = make_oracle(model);

    DistillTreeParams params;
    params.depth_budget = row.depth;
    params.search_depth = row.depth;
    params.eps = cfg.eps;
    params.delta = cfg.delta;
    params.tau = cfg.tau;
    params.mode = ProbeMode::empirical;
    params.k_filter = row.k;
    params.probe_n_train = cfg.probe_n_train;
    params.probe_n_val = cfg.probe_n_val;
    params.probe_iters = cfg.probe_iters;
    params.phase2_samples = cfg.phase2_samples;

    DistillTreeResult res = distill_tree(batchify(model), oracle, dist, params, rng);

    BoolFn model_fn = [&model](const BitInput& x) { return model.predict(x); };
    BoolFn distilled_fn = [&res](const BitInput& x) { return eval_tree(res.tree, x); };
    double disagreement =
        cfg.d <= 12 ? disagreement_exact(model_fn, distilled_fn, cfg.d)
                    : disagreement_sampled(model_fn, distilled_fn, dist, cfg.eval_samples, rng);

    row.accuracy = 1.0 - disagreement;
    row.num_probes = res.report.probe_count;
    BigInt total = total_possible_probes(cfg.d, row.depth);
    row.fraction_possible =
        static_cast<double>(row.num_probes) / total.convert_to<double>();
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
}

}  // namespace

Figure4Report run_figure4(const Figure4Config& cfg) {
  Figure4Report report;
  for (int depth : cfg.depths)
    for (int k : cfg.k_values)
      for (int s = 0; s < cfg.seeds; ++s) {
        Figure4Row row;
        row.depth = depth;
        row.k = k;
        row.seed = cell_seed(cfg.base_seed, depth, k, s);
        report.rows.push_back(row);
      }

  const int workers = resolve_workers(cfg.workers);
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= report.rows.size()) return;
      run_cell(cfg, report.rows[i]);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::sort(report.rows.begin(), report.rows.end(),
            [](const Figure4Row& a, const Figure4Row& b) {
              return std::tie(a.depth, a.k, a.seed) < std::tie(b.depth, b.k, b.seed);
            });
  return report;
}

std::string figure4_csv(const Figure4Report& report) {
  std::ostringstream out;
  out << "depth,k,seed,accuracy,num_probes,fraction_possible\n";
  for (const auto& row : report.rows) {
    if (!row.ok) continue;
    out << row.depth << ',' << row.k << ',' << row.seed << ','
        << std::setprecision(6) << std::fixed << row.accuracy << ','
        << row.num_probes << ',' << row.fraction_possible << '\n';
    out.unsetf(std::ios::fixed);
    out << std::setprecision(6);
  }
  return out.str();
}

}  // namespace distill
