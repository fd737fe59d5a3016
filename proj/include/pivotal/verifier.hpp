#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "pivotal/core.hpp"
#include "pivotal/sampler.hpp"

namespace pivotal {

struct EnumerationConfig {
  std::size_t max_n = 14;  // tree has at most 2^(n-1) leaves
};

struct VarianceDiagnostics {
  double expected_vt = 0.0;  // E[V_T] for the tracked subset
  double max_path_vt = 0.0;  // largest V_T over any path (diagnostic only)
  double k_eta = 0.0;        // kwA - k^2 sum w_i^2 = sum x0_i (1 - x0_i)
};

// Exact law of a procedure on a small instance, from full traversal of the
// branching tree. Probabilities are exact up to floating-point rounding.
struct ExactDistribution {
  std::vector<double> inclusion;              // P[i in S]
  std::vector<double> subset_pmf;             // P[|S ∩ A| = j], j = 0..k
  std::map<std::uint32_t, double> sample_dist;  // final-sample bitmask -> probability
  std::uint64_t leaf_count = 0;
  int rounds_min = 0;  // saturation events per path (min over paths)
  int rounds_max = 0;
  // Max over steps of Var(Y^A) - sum_{i in A, i active} Var(Y^i); <= 0 when
  // per-step variance subadditivity holds.
  double subadditivity_max_excess = 0.0;
  std::optional<VarianceDiagnostics> variance;  // absent for round-based enumeration
};

// Enumerates procedure X under a deterministic pair policy (in_order or
// custom_order). Throws TooLarge for n > cfg.max_n.
ExactDistribution exact_distribution(const ScaledState& x0, const PairPolicy& policy,
                                     const SubsetSpec& a, const EnumerationConfig& cfg = {});

// Enumerates procedure X** (one branching node per round) under `order`.
ExactDistribution exact_distribution_rounds(const ScaledState& x0,
                                            const std::vector<std::size_t>& order,
                                            const SubsetSpec& a,
                                            const EnumerationConfig& cfg = {});

// Total variation distance between two exact sample distributions.
double total_variation(const std::map<std::uint32_t, double>& p,
                       const std::map<std::uint32_t, double>& q);

struct ProcedureComparison {
  double tv_star_vs_star_star = 0.0;
  double tv_x_in_order_vs_star = 0.0;
  int expected_rounds = 0;  // k - |{i : x0_i = 1}|
  bool rounds_consistent = false;
};

// Exact-law comparison of X (in-order), X*, and X** under one order.
ProcedureComparison compare_procedures(const ScaledState& x0,
                                       const std::vector<std::size_t>& order, const SubsetSpec& a,
                                       const EnumerationConfig& cfg = {});

struct MartingaleCheck {
  int samples = 0;
  double max_error_transfer = 0.0;  // max |E[new value] - old value|, case i
  double max_error_saturate = 0.0;  // case ii
};

// Branch-probability-weighted one-step expectation check on random pairs.
MartingaleCheck check_martingale_step(int samples, std::uint64_t seed = 1);

// Tail cutoffs used consistently by exact and Monte Carlo verification:
// upper tail counts |S ∩ A| >= k(alpha+delta), lower counts <= k(alpha-delta),
// with a 1e-9 fuzz absorbing rounding of k*alpha.
long long upper_tail_min_count(double alpha, double delta, int k);
long long lower_tail_max_count(double alpha, double delta, int k);

struct McOptions {
  Procedure procedure = Procedure::x_star;
  PairPolicy policy = PairPolicy::in_order();    // procedure X only
  std::vector<std::size_t> order;                // X*/X**; empty means natural
  double delta = 0.1;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
  int jobs = 1;  // parallel replication workers; results independent of jobs
};

struct McTail {
  double empirical = 0.0;
  double radius = 0.0;  // sqrt(p(1-p)/trials) at the empirical p
};

struct McReport {
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  Procedure procedure = Procedure::x_star;
  double alpha = 0.0;
  double eta = 0.0;
  double delta = 0.0;
  int k = 0;

  std::vector<double> empirical_inclusion;
  std::vector<double> inclusion_radius;
  double max_inclusion_error = 0.0;
  bool inclusion_pass = false;

  McTail upper;
  McTail lower;
  double bound_freedman = 0.0;
  double bound_fgl = 0.0;
  double bound_chernoff_ref = 0.0;  // with-replacement reference, not a verdict

  bool upper_pass_freedman = false;
  bool upper_pass_fgl = false;
  bool lower_pass_freedman = false;
  bool lower_pass_fgl = false;
  bool chernoff_upper_within = false;  // informational
  bool chernoff_lower_within = false;  // informational

  bool all_pass() const noexcept {
    return inclusion_pass && upper_pass_freedman && upper_pass_fgl && lower_pass_freedman &&
           lower_pass_fgl;
  }
};

// Monte Carlo verification: `trials` independent replications, one RNG
// stream per replication, aggregated with integer counters so the result
// does not depend on the worker count.
McReport mc_estimate(const WeightVector& wv, const SubsetSpec& a, const McOptions& options);

}  // namespace pivotal
