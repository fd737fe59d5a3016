#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pivotal/core.hpp"
#include "pivotal/rng.hpp"

namespace pivotal {

// How the active undecided pair is chosen at each step.
struct PairPolicy {
  enum class Kind { in_order, random_pair, custom_order };

  Kind kind = Kind::in_order;
  std::vector<std::size_t> order;  // custom_order only: permutation of [0, n)

  static PairPolicy in_order() { return {Kind::in_order, {}}; }
  static PairPolicy random_pair() { return {Kind::random_pair, {}}; }
  static PairPolicy custom_order(std::vector<std::size_t> order) {
    return {Kind::custom_order, std::move(order)};
  }
};

// Outcome of one pivotal step on the pair (xi, xj), both in (0, 1).
//
// transfer (xi + xj < 1): one coordinate absorbs the whole pair weight,
//   first branch (xi + xj, 0) with probability xi / (xi + xj).
// saturate (xi + xj >= 1): one coordinate is raised to exactly 1,
//   first branch (1, xi + xj - 1) with probability (1 - xj) / (2 - xi - xj).
//
// The branch is the first one iff u < first-branch probability; both cases
// keep the conditional expectation of each coordinate equal to its input.
struct StepOutcome {
  double new_xi = 0.0;
  double new_xj = 0.0;
  StepCase case_tag = StepCase::transfer;
  double branch_prob = 1.0;  // probability of the branch actually taken
};

StepOutcome pivotal_step(double xi, double xj, double u);

// Conditional variance of either coordinate's increment in a pivotal step:
// xi * xj in the transfer case, (1 - xi) * (1 - xj) in the saturate case.
double step_variance(double xi, double xj) noexcept;

// Joint outcome of a whole round resolved with a single variate.
// `winner` indexes into the prefix; the winner's coordinate ends at 1 (and
// `next` at residual) when winner_saturates, otherwise at residual (and
// `next` at 1). Every other prefix coordinate ends at 0.
struct RoundOutcome {
  std::size_t winner = 0;
  bool winner_saturates = false;
  double residual = 0.0;  // xi_prefix + next - 1
};

// prefix: undecided weights x^1..x^t in round order with sum < 1;
// next: the weight x^{t+1} that closes the round (sum + next >= 1).
// Winner r is chosen with probability prefix[r] / sum; the winner then
// saturates with probability (1 - next) / (2 - sum - next), else `next`
// saturates. Segments are scanned in prefix order, saturation sub-branch
// first, so a single u replays deterministically.
RoundOutcome round_step(std::span<const double> prefix, double next, double u);

// Procedure X: repeatedly applies pivotal_step to the policy's pair choice
// until every coordinate is decided. If trace_subset is given, the result
// carries a TrajectoryTrace tracking that subset.
SampleResult run_procedure_x(const ScaledState& x0, const PairPolicy& policy, RandomSource& rng,
                             const std::optional<SubsetSpec>& trace_subset = std::nullopt);

// Procedure X*: in-order pivotal steps under `order` (the minimal yet
// undecided pair), with round boundaries recorded at each saturation.
SampleResult run_procedure_x_star(const ScaledState& x0, const std::vector<std::size_t>& order,
                                  RandomSource& rng,
                                  const std::optional<SubsetSpec>& trace_subset = std::nullopt);

// Procedure X**: one round_step randomization per round; at most k rounds.
// Distribution over samples is identical to run_procedure_x_star under the
// same order.
SampleResult run_procedure_x_star_star(const ScaledState& x0,
                                       const std::vector<std::size_t>& order, RandomSource& rng);

// Identity order helper [0, 1, ..., n).
std::vector<std::size_t> natural_order(std::size_t n);

// Throws InvalidPermutation unless `order` is a bijection on [0, n).
void check_permutation(const std::vector<std::size_t>& order, std::size_t n);

}  // namespace pivotal
