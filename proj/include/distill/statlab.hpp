#pragma once

#include <string>
#include <vector>

#include "distill/boolcore.hpp"

namespace distill {

/// An explicit finite function class: one bit row per function, one
/// column per input point.
struct FiniteClass {
  std::vector<std::string> input_ids;
  std::vector<std::vector<std::uint8_t>> rows;
  std::string name;

  int num_inputs() const { return static_cast<int>(input_ids.size()); }
  int num_functions() const { return static_cast<int>(rows.size()); }

  /// Deduplicated rows in lexicographic order.
  FiniteClass canonical() const;

  std::string to_csv() const;
  static FiniteClass from_csv(const std::string& text);

  /// All 2^m functions on m points.
  static FiniteClass all_functions(int m);
};

/// Exact VC dimension by subset enumeration, smallest sizes first;
/// requires at most 24 input points.
int vc_dimension(const FiniteClass& c);

/// Rows become elementwise inequality indicators against f.
FiniteClass xor_class(const std::vector<std::uint8_t>& f, const FiniteClass& g);

/// The maximal rows under the partial order g < g' iff every zero of g
/// is a zero of g'. Deduplicates first; output in lexicographic order.
FiniteClass pareto_frontier(const FiniteClass& c);

/// max_f VCdim(PF(f xor G)).
int vcdim_pf(const FiniteClass& f, const FiniteClass& g);

/// Threshold family g_i(x) = 1(x > i) on {1..N} together with the zero
/// source function.
struct ThresholdFamily {
  int truncation = 0;
  static std::uint8_t threshold(int i, int x) { return x > i ? 1 : 0; }
};

/// Runs the draw-max-threshold distiller with n = ceil(log(1/delta)/eps)
/// samples per trial and returns the fraction of trials whose exact
/// error exceeds eps. Masses index points {1..N}.
double simulate_threshold_distillation(double eps, double delta, int truncation,
                                       const std::vector<double>& masses,
                                       int trials, Rng& rng,
                                       long sample_override = -1);

/// The half-size m, the planted labels theta in {1,2}^m, the bias alpha,
/// and the induced point masses over the 2m-point space.
struct AgnosticInstance {
  int half_size = 0;
  std::vector<int> theta;
  double alpha = 0.0;

  static AgnosticInstance random(int m, double alpha, Rng& rng);

  /// Mass of point x_{i,j}, i in {1,2}, j in [m].
  double mass(int i, int j) const;
  /// Label of hypothesis theta' at point x_{i,j}.
  static std::uint8_t hypothesis(const std::vector<int>& theta_prime, int i, int j) {
    return theta_prime[static_cast<std::size_t>(j)] == i ? 1 : 0;
  }
};

/// Closed form: 1/2 + alpha/2 - (alpha/m) |{i : theta_i = theta'_i}|.
double agnostic_instance_error(const AgnosticInstance& inst,
                               const std::vector<int>& theta_prime);

/// The same error as a direct mass-weighted disagreement sum against the
/// zero source; the closed form's independent check.
double agnostic_instance_error_direct(const AgnosticInstance& inst,
                                      const std::vector<int>& theta_prime);

}  // namespace distill
