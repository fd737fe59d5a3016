#include "pivotal/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "pivotal/bounds.hpp"

namespace pivotal {

namespace {

constexpr double kSnapTol = 1e-12;
constexpr double kFinalSnapTol = 1e-9;

double snapped(double v) {
  if (std::fabs(v) <= kSnapTol) return 0.0;
  if (std::fabs(v - 1.0) <= kSnapTol) return 1.0;
  return v;
}

bool is_decided(double v) { return v == 0.0 || v == 1.0; }

// Shared leaf accounting for both enumerators. Probabilities arrive exact
// (products of branch probabilities), so no renormalization happens here.
struct EnumCore {
  const SubsetSpec& a;
  std::size_t n = 0;
  int k = 0;
  ExactDistribution out;
  double expected_vt = 0.0;
  double max_path_vt = 0.0;

  EnumCore(const SubsetSpec& subset, std::size_t size, int sample_k) : a(subset), n(size), k(sample_k) {
    out.inclusion.assign(n, 0.0);
    out.subset_pmf.assign(static_cast<std::size_t>(k) + 1, 0.0);
  }

  void leaf(std::vector<double> x, double prob, double var_acc, int rounds) {
    std::uint32_t mask = 0;
    int ones = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double v = x[i];
      if (!is_decided(v)) {
        if (std::fabs(v) <= kFinalSnapTol) {
          v = 0.0;
        } else if (std::fabs(v - 1.0) <= kFinalSnapTol) {
          v = 1.0;
          ++rounds;
        } else {
          fail(ErrorCode::NumericFailure,
               "enumeration leaf left coordinate undecided: " + std::to_string(v));
        }
      }
      if (v == 1.0) {
        mask |= 1u << i;
        ++ones;
        out.inclusion[i] += prob;
      }
    }
    if (ones != k)
      fail(ErrorCode::NumericFailure, "enumeration leaf selected " + std::to_string(ones) +
                                          " elements, expected " + std::to_string(k));
    int in_a = 0;
    for (auto i : a.members) {
      if (mask & (1u << i)) ++in_a;
    }
    out.subset_pmf[static_cast<std::size_t>(in_a)] += prob;
    out.sample_dist[mask] += prob;
    if (out.leaf_count == 0) {
      out.rounds_min = out.rounds_max = rounds;
    } else {
      out.rounds_min = std::min(out.rounds_min, rounds);
      out.rounds_max = std::max(out.rounds_max, rounds);
    }
    ++out.leaf_count;
    expected_vt += prob * var_acc;
    max_path_vt = std::max(max_path_vt, var_acc);
  }

  void check_total_mass() const {
    double mass = 0.0;
    for (const auto& [mask, p] : out.sample_dist) mass += p;
    if (std::fabs(mass - 1.0) > 1e-9)
      fail(ErrorCode::NumericFailure,
           "enumeration probability mass " + std::to_string(mass) + " != 1");
  }
};

// Step-by-step binary tree of procedure X under a fixed order.
struct StepEnumerator {
  EnumCore core;
  const std::vector<std::size_t>& order;

  StepEnumerator(const SubsetSpec& a, std::size_t n, int k, const std::vector<std::size_t>& ord)
      : core(a, n, k), order(ord) {}

  void walk(std::vector<double> x, double prob, double var_acc, int rounds, std::size_t cursor) {
    const std::size_t n = core.n;
    while (cursor < n && is_decided(x[order[cursor]])) ++cursor;
    std::size_t second = cursor + 1;
    while (second < n && is_decided(x[order[second]])) ++second;
    if (second >= n) {
      core.leaf(std::move(x), prob, var_acc, rounds);
      return;
    }

    const std::size_t i = order[cursor];
    const std::size_t j = order[second];
    const double xi = x[i];
    const double xj = x[j];
    const StepOutcome first = pivotal_step(xi, xj, 0.0);
    const StepOutcome alt = pivotal_step(xi, xj, first.branch_prob);

    const bool i_in = core.a.contains(i);
    const bool j_in = core.a.contains(j);
    const double sv = step_variance(xi, xj);
    const double subset_var = (i_in != j_in) ? sv : 0.0;
    const double singleton_sum = sv * ((i_in ? 1 : 0) + (j_in ? 1 : 0));
    core.out.subadditivity_max_excess =
        std::max(core.out.subadditivity_max_excess, subset_var - singleton_sum);

    for (const StepOutcome* o : {&first, &alt}) {
      std::vector<double> next = x;
      next[i] = snapped(o->new_xi);
      next[j] = snapped(o->new_xj);
      const int sat = (next[i] == 1.0 || next[j] == 1.0) ? 1 : 0;
      walk(std::move(next), prob * o->branch_prob, var_acc + subset_var, rounds + sat, cursor);
    }
  }
};

// Round-by-round tree of procedure X**: one node per round, 2t branches.
struct RoundEnumerator {
  EnumCore core;
  const std::vector<std::size_t>& order;

  RoundEnumerator(const SubsetSpec& a, std::size_t n, int k, const std::vector<std::size_t>& ord)
      : core(a, n, k), order(ord) {}

  void walk(std::vector<double> x, double prob, int rounds) {
    const std::size_t n = core.n;
    std::vector<std::size_t> prefix;
    double xi_sum = 0.0;
    std::size_t closer = n;
    for (std::size_t pos = 0; pos < n; ++pos) {
      const std::size_t elem = order[pos];
      const double v = x[elem];
      if (is_decided(v)) continue;
      if (!prefix.empty() && xi_sum + v >= 1.0) {
        closer = elem;
        break;
      }
      prefix.push_back(elem);
      xi_sum += v;
    }

    if (prefix.empty()) {
      core.leaf(std::move(x), prob, 0.0, rounds);
      return;
    }
    if (closer == n) {
      if (prefix.size() == 1) {  // drift leftover; leaf handles the snap
        core.leaf(std::move(x), prob, 0.0, rounds);
        return;
      }
      if (std::fabs(xi_sum - 1.0) > kFinalSnapTol)
        fail(ErrorCode::NumericFailure, "undecided weights sum below 1");
      // Final round: exact arithmetic sums it to exactly 1, with the last
      // undecided element closing. Drift can land the computed sum
      // marginally under; the branch formulas below absorb the dust.
      closer = prefix.back();
      prefix.pop_back();
      xi_sum = 0.0;
      for (const std::size_t elem : prefix) xi_sum += x[elem];
    }

    const double next_v = x[closer];
    const double p_winner_saturates = (1.0 - next_v) / (2.0 - xi_sum - next_v);
    const double residual = xi_sum + next_v - 1.0;

    for (const std::size_t winner : prefix) {
      const double p_winner = x[winner] / xi_sum;
      for (const bool winner_saturates : {true, false}) {
        std::vector<double> next = x;
        for (const std::size_t elem : prefix) next[elem] = 0.0;
        if (winner_saturates) {
          next[winner] = 1.0;
          next[closer] = snapped(residual);
        } else {
          next[winner] = snapped(residual);
          next[closer] = 1.0;
        }
        const double p_branch = winner_saturates ? p_winner_saturates : 1.0 - p_winner_saturates;
        walk(std::move(next), prob * p_winner * p_branch, rounds + 1);
      }
    }
  }
};

std::vector<std::size_t> resolve_enum_order(const ScaledState& x0, const PairPolicy& policy) {
  switch (policy.kind) {
    case PairPolicy::Kind::in_order:
      return natural_order(x0.size());
    case PairPolicy::Kind::custom_order:
      check_permutation(policy.order, x0.size());
      return policy.order;
    case PairPolicy::Kind::random_pair:
      break;
  }
  fail(ErrorCode::DomainError, "exact enumeration requires a deterministic pair policy");
}

void check_enum_size(std::size_t n, const EnumerationConfig& cfg) {
  const std::size_t cap = std::min<std::size_t>(cfg.max_n, 25);
  if (n > cap)
    fail(ErrorCode::TooLarge, "exact enumeration supports n <= " + std::to_string(cap) +
                                  ", got n = " + std::to_string(n));
}

void check_subset_indices(const SubsetSpec& a, std::size_t n) {
  for (auto i : a.members) {
    if (i >= n) fail(ErrorCode::IndexOutOfRange, "subset index " + std::to_string(i));
  }
}

}  // namespace

ExactDistribution exact_distribution(const ScaledState& x0, const PairPolicy& policy,
                                     const SubsetSpec& a, const EnumerationConfig& cfg) {
  check_enum_size(x0.size(), cfg);
  check_subset_indices(a, x0.size());
  const std::vector<std::size_t> order = resolve_enum_order(x0, policy);

  StepEnumerator e(a, x0.size(), x0.k(), order);
  e.walk(x0.values(), 1.0, 0.0, 0, 0);
  e.core.check_total_mass();

  ExactDistribution out = std::move(e.core.out);
  out.variance = VarianceDiagnostics{e.core.expected_vt, e.core.max_path_vt, k_eta_scaled(x0, a)};
  return out;
}

ExactDistribution exact_distribution_rounds(const ScaledState& x0,
                                            const std::vector<std::size_t>& order,
                                            const SubsetSpec& a, const EnumerationConfig& cfg) {
  check_enum_size(x0.size(), cfg);
  check_subset_indices(a, x0.size());
  check_permutation(order, x0.size());

  RoundEnumerator e(a, x0.size(), x0.k(), order);
  e.walk(x0.values(), 1.0, 0);
  e.core.check_total_mass();
  return std::move(e.core.out);
}

double total_variation(const std::map<std::uint32_t, double>& p,
                       const std::map<std::uint32_t, double>& q) {
  double acc = 0.0;
  auto it = p.begin();
  auto jt = q.begin();
  while (it != p.end() || jt != q.end()) {
    if (jt == q.end() || (it != p.end() && it->first < jt->first)) {
      acc += std::fabs(it->second);
      ++it;
    } else if (it == p.end() || jt->first < it->first) {
      acc += std::fabs(jt->second);
      ++jt;
    } else {
      acc += std::fabs(it->second - jt->second);
      ++it;
      ++jt;
    }
  }
  return 0.5 * acc;
}

ProcedureComparison compare_procedures(const ScaledState& x0,
                                       const std::vector<std::size_t>& order, const SubsetSpec& a,
                                       const EnumerationConfig& cfg) {
  EnumerationConfig capped = cfg;
  capped.max_n = std::min<std::size_t>(cfg.max_n, 10);
  check_enum_size(x0.size(), capped);

  const ExactDistribution star = exact_distribution(x0, PairPolicy::custom_order(order), a, capped);
  const ExactDistribution star_star = exact_distribution_rounds(x0, order, a, capped);
  const ExactDistribution x_in = exact_distribution(x0, PairPolicy::in_order(), a, capped);
  const ExactDistribution star_nat =
      exact_distribution(x0, PairPolicy::custom_order(natural_order(x0.size())), a, capped);

  int ones = 0;
  for (std::size_t i = 0; i < x0.size(); ++i) ones += x0[i] == 1.0 ? 1 : 0;

  ProcedureComparison cmp;
  cmp.tv_star_vs_star_star = total_variation(star.sample_dist, star_star.sample_dist);
  cmp.tv_x_in_order_vs_star = total_variation(x_in.sample_dist, star_nat.sample_dist);
  cmp.expected_rounds = x0.k() - ones;
  auto rounds_match = [&](const ExactDistribution& d) {
    return d.rounds_min == cmp.expected_rounds && d.rounds_max == cmp.expected_rounds;
  };
  cmp.rounds_consistent = rounds_match(star) && rounds_match(star_star) && rounds_match(x_in);
  return cmp;
}

MartingaleCheck check_martingale_step(int samples, std::uint64_t seed) {
  if (samples < 1) fail(ErrorCode::DomainError, "check_martingale_step needs samples >= 1");
  MartingaleCheck chk;
  chk.samples = samples;
  RandomSource rng(seed, 0);

  auto probe = [&chk](double xi, double xj) {
    const StepOutcome first = pivotal_step(xi, xj, 0.0);
    const StepOutcome alt = pivotal_step(xi, xj, first.branch_prob);
    const double p = first.branch_prob;
    const double e_i = p * first.new_xi + (1.0 - p) * alt.new_xi;
    const double e_j = p * first.new_xj + (1.0 - p) * alt.new_xj;
    const double err = std::max(std::fabs(e_i - xi), std::fabs(e_j - xj));
    if (first.case_tag == StepCase::transfer) {
      chk.max_error_transfer = std::max(chk.max_error_transfer, err);
    } else {
      chk.max_error_saturate = std::max(chk.max_error_saturate, err);
    }
  };

  for (int s = 0; s < samples; ++s) {
    double a = rng.next_unit();
    while (a == 0.0) a = rng.next_unit();
    double b = rng.next_unit();
    while (b == 0.0) b = rng.next_unit();
    probe(a, b);
    probe(1.0 - a, 1.0 - b);  // mirrored pair exercises the other case
  }
  return chk;
}

long long upper_tail_min_count(double alpha, double delta, int k) {
  return static_cast<long long>(std::ceil(static_cast<double>(k) * (alpha + delta) - 1e-9));
}

long long lower_tail_max_count(double alpha, double delta, int k) {
  return static_cast<long long>(std::floor(static_cast<double>(k) * (alpha - delta) + 1e-9));
}

McReport mc_estimate(const WeightVector& wv, const SubsetSpec& a, const McOptions& options) {
  if (options.trials < 1) fail(ErrorCode::DomainError, "mc_estimate needs trials >= 1");
  if (!(options.delta >= 0.0)) fail(ErrorCode::DomainError, "mc_estimate needs delta >= 0");
  const std::size_t n = wv.size();
  check_subset_indices(a, n);

  const ScaledState x0 = scale_weights(wv);
  const std::vector<std::size_t> order =
      options.order.empty() ? natural_order(n) : options.order;
  check_permutation(order, n);
  if (options.procedure == Procedure::x && options.policy.kind == PairPolicy::Kind::custom_order)
    check_permutation(options.policy.order, n);

  const int k = wv.k();
  const double alpha = subset_alpha(wv, a);
  const double eta = eta_exact(wv, a);
  const long long up_min = upper_tail_min_count(alpha, options.delta, k);
  const long long lo_max = lower_tail_max_count(alpha, options.delta, k);

  const std::uint64_t trials = options.trials;
  int jobs = std::max(options.jobs, 1);
  if (static_cast<std::uint64_t>(jobs) > trials) jobs = static_cast<int>(trials);

  struct Tally {
    std::vector<std::uint64_t> inclusion;
    std::uint64_t upper = 0;
    std::uint64_t lower = 0;
  };
  std::vector<Tally> tallies(static_cast<std::size_t>(jobs));

  auto worker = [&](int w, std::uint64_t lo, std::uint64_t hi) {
    Tally& tally = tallies[static_cast<std::size_t>(w)];
    tally.inclusion.assign(n, 0);
    for (std::uint64_t trial = lo; trial < hi; ++trial) {
      RandomSource rng(options.seed, trial);
      SampleResult res = [&] {
        switch (options.procedure) {
          case Procedure::x:
            return run_procedure_x(x0, options.policy, rng);
          case Procedure::x_star:
            return run_procedure_x_star(x0, order, rng);
          case Procedure::x_star_star:
            return run_procedure_x_star_star(x0, order, rng);
        }
        fail(ErrorCode::DomainError, "unknown procedure");
      }();
      long long in_a = 0;
      for (auto idx : res.sample) {
        ++tally.inclusion[idx];
        if (a.contains(idx)) ++in_a;
      }
      if (in_a >= up_min) ++tally.upper;
      if (in_a <= lo_max) ++tally.lower;
    }
  };

  if (jobs == 1) {
    worker(0, 0, trials);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
      const std::uint64_t lo = trials * static_cast<std::uint64_t>(w) / static_cast<std::uint64_t>(jobs);
      const std::uint64_t hi =
          trials * (static_cast<std::uint64_t>(w) + 1) / static_cast<std::uint64_t>(jobs);
      threads.emplace_back(worker, w, lo, hi);
    }
    for (auto& t : threads) t.join();
  }

  std::vector<std::uint64_t> inclusion_counts(n, 0);
  std::uint64_t upper_count = 0;
  std::uint64_t lower_count = 0;
  for (const auto& tally : tallies) {
    for (std::size_t i = 0; i < n; ++i) inclusion_counts[i] += tally.inclusion[i];
    upper_count += tally.upper;
    lower_count += tally.lower;
  }

  const double t = static_cast<double>(trials);
  auto rad = [t](double p) { return std::sqrt(std::max(p * (1.0 - p), 0.0) / t); };

  McReport report;
  report.trials = trials;
  report.seed = options.seed;
  report.procedure = options.procedure;
  report.alpha = alpha;
  report.eta = eta;
  report.delta = options.delta;
  report.k = k;

  report.empirical_inclusion.resize(n);
  report.inclusion_radius.resize(n);
  report.inclusion_pass = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double p_hat = static_cast<double>(inclusion_counts[i]) / t;
    const double target = x0[i];
    report.empirical_inclusion[i] = p_hat;
    report.inclusion_radius[i] = rad(p_hat);
    const double err = std::fabs(p_hat - target);
    report.max_inclusion_error = std::max(report.max_inclusion_error, err);
    const double sigma0 = rad(target);  // null-hypothesis standard error
    if (sigma0 == 0.0) {
      report.inclusion_pass = report.inclusion_pass && p_hat == target;
    } else {
      report.inclusion_pass = report.inclusion_pass && err <= 4.0 * sigma0;
    }
  }

  report.upper.empirical = static_cast<double>(upper_count) / t;
  report.upper.radius = rad(report.upper.empirical);
  report.lower.empirical = static_cast<double>(lower_count) / t;
  report.lower.radius = rad(report.lower.empirical);

  report.bound_freedman = freedman_pi(eta, options.delta, k);
  report.bound_fgl = fgl_pi_star(eta, options.delta, k);
  report.bound_chernoff_ref =
      (alpha > 0.0 && alpha < 1.0) ? chernoff_bound(alpha, options.delta, k) : 1.0;

  auto within = [](const McTail& tail, double bound) {
    return tail.empirical <= bound + 4.0 * tail.radius;
  };
  report.upper_pass_freedman = within(report.upper, report.bound_freedman);
  report.upper_pass_fgl = within(report.upper, report.bound_fgl);
  report.lower_pass_freedman = within(report.lower, report.bound_freedman);
  report.lower_pass_fgl = within(report.lower, report.bound_fgl);
  report.chernoff_upper_within = within(report.upper, report.bound_chernoff_ref);
  report.chernoff_lower_within = within(report.lower, report.bound_chernoff_ref);
  return report;
}

}  // namespace pivotal
