#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace distill::suites {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// DP optimality against exhaustive tree enumeration on random small
/// instances.
SuiteResult run_dp_oracle(int instances = 1000, std::uint64_t seed = 7);

/// Planted-realizable acceptance and provably-infeasible rejection rates
/// at m=64, tau=5, eps=0.05.
SuiteResult run_probe_soundness(int instances = 100, std::uint64_t seed = 11);

/// Exact recovery of random k<=4 juntas at d=100 within the query
/// budget, plus the junta-to-tree composition check.
SuiteResult run_junta(int instances = 100, std::uint64_t seed = 13);

/// Packing bound audits: planted indicators, tau=0, and random features.
SuiteResult run_packing(std::uint64_t seed = 17);

/// VC dimension, Pareto frontier, threshold simulation, and the agnostic
/// instance error formula.
SuiteResult run_statlab(std::uint64_t seed = 19);

/// Dispatch by name; throws std::invalid_argument on unknown names.
SuiteResult run_suite(const std::string& name);

std::vector<std::string> suite_names();

}  // namespace distill::suites
