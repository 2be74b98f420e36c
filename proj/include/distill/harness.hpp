#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "distill/nnmodel.hpp"
#include "distill/treedistill.hpp"

namespace distill {

/// One experiment grid: for every (depth, k, seed) cell, plant a random
/// tree, train a network on it, and distill the network back into a tree
/// in empirical mode.
struct Figure4Config {
  int d = 30;
  std::vector<int> depths{2, 3};
  std::vector<int> k_values{100};
  int seeds = 3;
  std::uint64_t base_seed = 1;

  int train_samples = 50000;
  TrainConfig train;

  double tau = 1.0;
  double eps = 0.2;
  double delta = 0.05;
  int probe_n_train = 1000;
  int probe_n_val = 10000;
  int probe_iters = 100;
  long phase2_samples = -1;

  int eval_samples = 10000;
  int workers = 0;  // 0: read DISTILL_WORKERS from the environment, default 1
};

struct Figure4Row {
  int depth = 0;
  int k = 0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  long num_probes = 0;
  double fraction_possible = 0.0;
  bool ok = false;
  std::string error;  // nonempty iff a stage failed
};

struct Figure4Report {
  std::vector<Figure4Row> rows;  // sorted by (depth, k, seed)
};

/// Runs every cell of the grid in a bounded worker pool; a failing cell
/// records its error and the run continues.
Figure4Report run_figure4(const Figure4Config& cfg);

/// Header depth,k,seed,accuracy,num_probes,fraction_possible; failed rows
/// are skipped (their errors live in the report).
std::string figure4_csv(const Figure4Report& report);

}  // namespace distill
