#include "pivotal/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace pivotal {

namespace {

constexpr double kSnapTol = 1e-12;
// Fallback tolerance for the last coordinate when rounding drift leaves it
// marginally undecided.
constexpr double kFinalSnapTol = 1e-9;

double snapped(double v) {
  if (std::fabs(v) <= kSnapTol) return 0.0;
  if (std::fabs(v - 1.0) <= kSnapTol) return 1.0;
  return v;
}

bool is_decided(double v) { return v == 0.0 || v == 1.0; }

}  // namespace

StepOutcome pivotal_step(double xi, double xj, double u) {
  if (!(xi > 0.0 && xi < 1.0) || !(xj > 0.0 && xj < 1.0))
    fail(ErrorCode::DomainError, "pivotal_step requires both weights strictly inside (0, 1)");
  const double sum = xi + xj;
  if (sum < 1.0) {
    const double p_first = xi / sum;
    if (u < p_first) return {sum, 0.0, StepCase::transfer, p_first};
    return {0.0, sum, StepCase::transfer, 1.0 - p_first};
  }
  const double p_first = (1.0 - xj) / (2.0 - sum);
  if (u < p_first) return {1.0, sum - 1.0, StepCase::saturate, p_first};
  return {sum - 1.0, 1.0, StepCase::saturate, 1.0 - p_first};
}

double step_variance(double xi, double xj) noexcept {
  const double sum = xi + xj;
  if (sum < 1.0) return xi * xj;
  return (1.0 - xi) * (1.0 - xj);
}

RoundOutcome round_step(std::span<const double> prefix, double next, double u) {
  if (prefix.empty()) fail(ErrorCode::DomainError, "round_step requires a nonempty prefix");
  double xi_sum = 0.0;
  for (double v : prefix) {
    if (!(v > 0.0 && v < 1.0))
      fail(ErrorCode::DomainError, "round_step prefix weights must lie in (0, 1)");
    xi_sum += v;
  }
  if (!(next > 0.0 && next < 1.0))
    fail(ErrorCode::DomainError, "round_step closing weight must lie in (0, 1)");
  if (xi_sum >= 1.0) fail(ErrorCode::DomainError, "round_step prefix sum must be < 1");
  if (xi_sum + next < 1.0) fail(ErrorCode::DomainError, "round_step requires sum + next >= 1");

  const double p_winner_saturates = (1.0 - next) / (2.0 - xi_sum - next);
  const double residual = xi_sum + next - 1.0;

  double cumulative = 0.0;
  for (std::size_t r = 0; r < prefix.size(); ++r) {
    const double width = prefix[r] / xi_sum;
    const double upper = (r + 1 == prefix.size()) ? 1.0 : cumulative + width;
    if (u < upper || r + 1 == prefix.size()) {
      const double local = std::clamp((u - cumulative) / width, 0.0, 1.0);
      return {r, local < p_winner_saturates, residual};
    }
    cumulative = upper;
  }
  fail(ErrorCode::NumericFailure, "round_step failed to select a winner");
}

std::vector<std::size_t> natural_order(std::size_t n) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  return order;
}

void check_permutation(const std::vector<std::size_t>& order, std::size_t n) {
  if (order.size() != n)
    fail(ErrorCode::InvalidPermutation, "order has length " + std::to_string(order.size()) +
                                            ", expected " + std::to_string(n));
  std::vector<bool> seen(n, false);
  for (auto v : order) {
    if (v >= n || seen[v]) fail(ErrorCode::InvalidPermutation, "order is not a bijection on [0, n)");
    seen[v] = true;
  }
}

namespace {

// Shared mutable run state; traces only the designated subset.
struct Runner {
  std::vector<double> x;
  int k;
  std::uint64_t seed;
  std::uint64_t stream;
  int steps = 0;
  int rounds = 0;
  bool tracing = false;
  TrajectoryTrace trace;
  std::vector<double> round_start;  // tracing only: state at the current round start

  Runner(const ScaledState& x0, RandomSource& rng, const std::optional<SubsetSpec>& trace_subset)
      : x(x0.values()), k(x0.k()), seed(rng.seed()), stream(rng.stream()) {
    if (trace_subset) {
      for (auto i : trace_subset->members) {
        if (i >= x.size())
          fail(ErrorCode::IndexOutOfRange, "trace subset index " + std::to_string(i));
      }
      tracing = true;
      trace.tracked_subset = *trace_subset;
      round_start = x;
    }
  }

  // Applies one pivotal step on elements (i, j); returns true if some
  // coordinate reached 1 (a round boundary).
  bool apply_step(std::size_t i, std::size_t j, double u) {
    const double xi = x[i];
    const double xj = x[j];
    const StepOutcome out = pivotal_step(xi, xj, u);
    x[i] = snapped(out.new_xi);
    x[j] = snapped(out.new_xj);
    const bool saturated = x[i] == 1.0 || x[j] == 1.0;

    if (tracing) {
      StepRecord rec;
      rec.t = steps;
      rec.i = i;
      rec.j = j;
      rec.case_tag = out.case_tag;
      rec.xi_before = xi;
      rec.xj_before = xj;
      rec.xi_after = x[i];
      rec.xj_after = x[j];
      const bool i_in = trace.tracked_subset->contains(i);
      const bool j_in = trace.tracked_subset->contains(j);
      if (i_in != j_in) {
        rec.subset_variance = step_variance(xi, xj);
        rec.subset_delta = i_in ? (x[i] - xi) : (x[j] - xj);
      }
      trace.steps.push_back(rec);
      if (saturated) {
        trace.round_boundaries.push_back(steps);
        double moved = 0.0;
        for (std::size_t c = 0; c < x.size(); ++c) moved += std::max(x[c] - round_start[c], 0.0);
        trace.round_movement.push_back(moved);
        round_start = x;
      }
    }

    ++steps;
    if (saturated) ++rounds;
    return saturated;
  }

  SampleResult finish(Procedure procedure) {
    // At most one coordinate can remain marginally undecided after the
    // main loop; anything beyond rounding drift is a genuine failure.
    for (auto& v : x) {
      if (is_decided(v)) continue;
      if (std::fabs(v) <= kFinalSnapTol) {
        v = 0.0;
      } else if (std::fabs(v - 1.0) <= kFinalSnapTol) {
        v = 1.0;
        ++rounds;
        // Keep the trace's boundary count in sync with `rounds`: the
        // saturation effectively happened on the final step.
        if (tracing && steps > 0) {
          trace.round_boundaries.push_back(steps - 1);
          double moved = 0.0;
          for (std::size_t d = 0; d < x.size(); ++d)
            moved += std::max(x[d] - round_start[d], 0.0);
          trace.round_movement.push_back(moved);
          round_start = x;
        }
      } else {
        fail(ErrorCode::NumericFailure,
             "coordinate failed to decide: " + std::to_string(v));
      }
    }
    SampleResult result;
    result.seed = seed;
    result.stream = stream;
    result.procedure = procedure;
    result.steps = steps;
    result.rounds = rounds;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 1.0) result.sample.push_back(i);
    }
    if (result.sample.size() != static_cast<std::size_t>(k))
      fail(ErrorCode::NumericFailure, "final sample has size " +
                                          std::to_string(result.sample.size()) + ", expected k = " +
                                          std::to_string(k));
    if (tracing) result.trace = std::move(trace);
    return result;
  }
};

SampleResult run_in_order(const ScaledState& x0, const std::vector<std::size_t>& order,
                          RandomSource& rng, const std::optional<SubsetSpec>& trace_subset,
                          Procedure procedure) {
  check_permutation(order, x0.size());
  Runner run(x0, rng, trace_subset);

  // first: order position of the minimal undecided element. It only moves
  // forward, so the scan is O(n) amortized.
  std::size_t first = 0;
  const std::size_t n = order.size();
  for (;;) {
    while (first < n && is_decided(run.x[order[first]])) ++first;
    std::size_t second = first + 1;
    while (second < n && is_decided(run.x[order[second]])) ++second;
    if (second >= n) break;
    run.apply_step(order[first], order[second], rng.next_unit());
  }
  return run.finish(procedure);
}

SampleResult run_random_pairs(const ScaledState& x0, RandomSource& rng,
                              const std::optional<SubsetSpec>& trace_subset) {
  Runner run(x0, rng, trace_subset);

  std::vector<std::size_t> undecided;
  undecided.reserve(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) {
    if (!x0.decided(i)) undecided.push_back(i);
  }

  while (undecided.size() >= 2) {
    const std::size_t a = static_cast<std::size_t>(rng.next_below(undecided.size()));
    std::size_t b = static_cast<std::size_t>(rng.next_below(undecided.size() - 1));
    if (b >= a) ++b;
    // Orient the unordered pair by element index so replays are stable.
    const std::size_t i = std::min(undecided[a], undecided[b]);
    const std::size_t j = std::max(undecided[a], undecided[b]);
    run.apply_step(i, j, rng.next_unit());
    for (std::size_t slot = undecided.size(); slot-- > 0;) {
      if (is_decided(run.x[undecided[slot]])) {
        undecided[slot] = undecided.back();
        undecided.pop_back();
      }
    }
  }
  return run.finish(Procedure::x);
}

}  // namespace

SampleResult run_procedure_x(const ScaledState& x0, const PairPolicy& policy, RandomSource& rng,
                             const std::optional<SubsetSpec>& trace_subset) {
  switch (policy.kind) {
    case PairPolicy::Kind::in_order:
      return run_in_order(x0, natural_order(x0.size()), rng, trace_subset, Procedure::x);
    case PairPolicy::Kind::custom_order:
      return run_in_order(x0, policy.order, rng, trace_subset, Procedure::x);
    case PairPolicy::Kind::random_pair:
      return run_random_pairs(x0, rng, trace_subset);
  }
  fail(ErrorCode::DomainError, "unknown pair policy");
}

SampleResult run_procedure_x_star(const ScaledState& x0, const std::vector<std::size_t>& order,
                                  RandomSource& rng,
                                  const std::optional<SubsetSpec>& trace_subset) {
  return run_in_order(x0, order, rng, trace_subset, Procedure::x_star);
}

SampleResult run_procedure_x_star_star(const ScaledState& x0,
                                       const std::vector<std::size_t>& order, RandomSource& rng) {
  check_permutation(order, x0.size());
  Runner run(x0, rng, std::nullopt);
  const std::size_t n = order.size();

  std::vector<std::size_t> prefix_elems;
  std::vector<double> prefix_vals;
  for (;;) {
    prefix_elems.clear();
    prefix_vals.clear();
    double xi_sum = 0.0;
    std::size_t closer = n;  // element that closes the round

    for (std::size_t pos = 0; pos < n; ++pos) {
      const std::size_t elem = order[pos];
      const double v = run.x[elem];
      if (is_decided(v)) continue;
      if (!prefix_elems.empty() && xi_sum + v >= 1.0) {
        closer = elem;
        break;
      }
      // A lone opener with x >= 1 is impossible: coordinates live in (0, 1).
      prefix_elems.push_back(elem);
      prefix_vals.push_back(v);
      xi_sum += v;
      if (xi_sum >= 1.0) {
        // Undecided weights sum to an integer, so the greedy prefix must
        // close strictly below 1; reaching it means drift broke the state.
        fail(ErrorCode::NumericFailure, "round prefix reached weight 1 without a closer");
      }
    }

    if (prefix_elems.empty()) break;  // everything decided
    if (closer == n) {
      if (prefix_elems.size() == 1) {
        // Single marginally undecided coordinate left over from drift.
        break;
      }
      if (std::fabs(xi_sum - 1.0) > kFinalSnapTol)
        fail(ErrorCode::NumericFailure, "undecided weights sum below 1");
      // Exact arithmetic leaves the last round summing to exactly 1, closed
      // by the final undecided element; accumulated drift can land the
      // computed sum marginally under. Rebuild that round, absorbing the
      // dust into the closing weight.
      closer = prefix_elems.back();
      prefix_elems.pop_back();
      prefix_vals.pop_back();
      xi_sum = 0.0;
      for (double v : prefix_vals) xi_sum += v;
      double close_v = 1.0 - xi_sum;
      while (xi_sum + close_v < 1.0) close_v = std::nextafter(close_v, 2.0);
      run.x[closer] = close_v;
    }

    const RoundOutcome out = round_step(prefix_vals, run.x[closer], rng.next_unit());
    for (std::size_t r = 0; r < prefix_elems.size(); ++r) run.x[prefix_elems[r]] = 0.0;
    const std::size_t winner_elem = prefix_elems[out.winner];
    if (out.winner_saturates) {
      run.x[winner_elem] = 1.0;
      run.x[closer] = snapped(out.residual);
    } else {
      run.x[winner_elem] = snapped(out.residual);
      run.x[closer] = 1.0;
    }
    ++run.steps;
    ++run.rounds;
  }
  return run.finish(Procedure::x_star_star);
}

}  // namespace pivotal
