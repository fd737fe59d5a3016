#include "pivotal/cli.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "pivotal/bounds.hpp"
#include "pivotal/io.hpp"
#include "pivotal/sampler.hpp"
#include "pivotal/verifier.hpp"

namespace pivotal {

namespace {

using nlohmann::ordered_json;

// Rounds to `digits` significant digits so emitted numbers honor --precision
// without any locale-dependent formatting.
double round_sig(double v, int digits) {
  if (!std::isfinite(v) || digits <= 0 || digits >= 17) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

std::string fmt_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits <= 0 ? 6 : digits, v);
  return buf;
}

std::string fmt_m(double m) {
  if (std::isinf(m)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", m);
  return buf;
}

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

int resolve_jobs(int requested) {
  if (requested >= 1) return requested;
  if (const char* env = std::getenv("PIVOTAL_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1 && v <= 1024) return static_cast<int>(v);
  }
  return 1;
}

const char* verdict(bool pass) { return pass ? "PASS" : "FAIL"; }

WeightVector load_validated_weights(const std::string& path, int k) {
  if (path.empty()) fail(ErrorCode::UsageError, "missing weights file");
  if (k < 1) fail(ErrorCode::UsageError, "--k must be >= 1");
  WeightFile wf = load_weight_file(path);
  return validate_weights(std::move(wf.weights), k, false, std::move(wf.ids));
}

struct ResolvedProcedure {
  Procedure procedure = Procedure::x_star;
  PairPolicy policy = PairPolicy::in_order();     // procedure x only
  std::vector<std::size_t> order;                 // x-star / x-star-star
};

ResolvedProcedure resolve_procedure(const std::string& procedure_text,
                                    const std::string& policy_text,
                                    const std::string& order_file, std::size_t n) {
  const auto procedure = parse_procedure(procedure_text);
  if (!procedure) fail(ErrorCode::UsageError, "unknown procedure '" + procedure_text + "'");
  if (policy_text != "in-order" && policy_text != "random-pair")
    fail(ErrorCode::UsageError, "unknown policy '" + policy_text + "'");

  ResolvedProcedure r;
  r.procedure = *procedure;
  std::optional<std::vector<std::size_t>> order;
  if (!order_file.empty()) order = load_order_file(order_file, n);

  if (r.procedure == Procedure::x) {
    if (policy_text == "random-pair") {
      if (order) fail(ErrorCode::UsageError, "--order-file conflicts with --policy random-pair");
      r.policy = PairPolicy::random_pair();
    } else {
      r.policy = order ? PairPolicy::custom_order(*order) : PairPolicy::in_order();
    }
    r.order = order ? *order : natural_order(n);
  } else {
    if (policy_text == "random-pair")
      fail(ErrorCode::UsageError, "--policy random-pair applies only to --procedure x");
    r.order = order ? std::move(*order) : natural_order(n);
  }
  return r;
}

SampleResult run_resolved(const ScaledState& x0, const ResolvedProcedure& r, RandomSource& rng,
                          const std::optional<SubsetSpec>& trace_subset) {
  switch (r.procedure) {
    case Procedure::x:
      return run_procedure_x(x0, r.policy, rng, trace_subset);
    case Procedure::x_star:
      return run_procedure_x_star(x0, r.order, rng, trace_subset);
    case Procedure::x_star_star:
      return run_procedure_x_star_star(x0, r.order, rng);
  }
  fail(ErrorCode::UsageError, "unknown procedure");
}

ordered_json trace_json(const TrajectoryTrace& trace, int digits) {
  ordered_json steps = ordered_json::array();
  for (const auto& s : trace.steps) {
    steps.push_back(ordered_json{{"t", s.t},
                                 {"i", s.i},
                                 {"j", s.j},
                                 {"case", s.case_tag == StepCase::transfer ? "transfer" : "saturate"},
                                 {"xi_before", round_sig(s.xi_before, digits)},
                                 {"xj_before", round_sig(s.xj_before, digits)},
                                 {"xi_after", round_sig(s.xi_after, digits)},
                                 {"xj_after", round_sig(s.xj_after, digits)}});
  }
  ordered_json movement = ordered_json::array();
  for (double m : trace.round_movement) movement.push_back(round_sig(m, digits));
  return ordered_json{
      {"steps", std::move(steps)},
      {"round_boundaries", trace.round_boundaries},
      {"round_movement", std::move(movement)},
  };
}

}  // namespace

int cmd_sample(const SampleOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const WeightVector wv = load_validated_weights(opt.weights_file, opt.k);
    const ScaledState x0 = scale_weights(wv);
    const ResolvedProcedure resolved =
        resolve_procedure(opt.procedure, opt.policy, opt.order_file, wv.size());
    if (opt.count < 1) fail(ErrorCode::UsageError, "--count must be >= 1");
    if (opt.trace && resolved.procedure == Procedure::x_star_star)
      fail(ErrorCode::UsageError, "--trace records pivotal steps; x-star-star has none");

    std::optional<SubsetSpec> trace_subset;
    if (opt.trace) trace_subset = make_subset(natural_order(wv.size()), wv.size());

    const std::uint64_t seed = opt.have_seed ? opt.seed : fresh_seed();
    for (std::uint64_t stream = 0; stream < opt.count; ++stream) {
      RandomSource rng(seed, stream);
      const SampleResult res = run_resolved(x0, resolved, rng, trace_subset);

      ordered_json sample = ordered_json::array();
      for (auto idx : res.sample) {
        if (wv.has_ids()) {
          sample.push_back(wv.ids()[idx]);
        } else {
          sample.push_back(idx);
        }
      }
      ordered_json rec{{"seed", seed},
                       {"stream", stream},
                       {"sample", std::move(sample)},
                       {"rounds", res.rounds},
                       {"steps", res.steps}};
      if (res.trace) rec["trace"] = trace_json(*res.trace, opt.precision);
      out << rec.dump() << '\n';
    }
    return 0;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return 2;
  }
}

namespace {

ordered_json inputs_json(const BoundInputs& in, int digits) {
  ordered_json doc{{"alpha", round_sig(in.alpha, digits)},
                   {"delta", round_sig(in.delta, digits)},
                   {"k", in.k},
                   {"eta", round_sig(in.eta, digits)},
                   {"eta_provenance", eta_provenance_name(in.provenance)}};
  if (in.provenance == EtaProvenance::eta_bar) doc["m"] = round_sig(in.m, digits);
  return doc;
}

ordered_json bounds_json(const BoundReport& r, int digits) {
  return ordered_json{{"chernoff", round_sig(r.chernoff, digits)},
                      {"hoeffding_simple", round_sig(r.hoeffding, digits)},
                      {"azuma", round_sig(r.azuma, digits)},
                      {"freedman", round_sig(r.freedman, digits)},
                      {"freedman_simplified", round_sig(r.freedman_simple, digits)},
                      {"fgl", round_sig(r.fgl, digits)}};
}

}  // namespace

int cmd_bounds(const BoundsOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    if (opt.delta_text.empty()) fail(ErrorCode::UsageError, "--delta is required");
    const double delta = parse_real_or_fraction(opt.delta_text);
    if (opt.side != "upper" && opt.side != "lower" && opt.side != "both")
      fail(ErrorCode::UsageError, "--side must be upper, lower, or both");
    const bool file_based = !opt.weights_file.empty() || !opt.subset_file.empty();
    if (opt.have_alpha == file_based)
      fail(ErrorCode::UsageError,
           "pass either --alpha (analytic eta-bar) or --weights-file with --subset-file (exact eta)");

    BoundInputs inputs;
    ordered_json complement;
    if (opt.have_alpha) {
      if (opt.k < 1) fail(ErrorCode::UsageError, "--k must be >= 1");
      if (opt.best_of_complement)
        fail(ErrorCode::UsageError, "--best-of-complement needs a concrete subset");
      const double alpha = parse_real_or_fraction(opt.alpha_text);
      const double m =
          opt.m_text.empty() ? std::numeric_limits<double>::infinity()
                             : parse_real_fraction_or_inf(opt.m_text);
      inputs = inputs_from_alpha(alpha, delta, opt.k, m);
    } else {
      if (opt.weights_file.empty() || opt.subset_file.empty())
        fail(ErrorCode::UsageError, "file-based eta needs both --weights-file and --subset-file");
      if (!opt.m_text.empty()) fail(ErrorCode::UsageError, "--m conflicts with file-based eta");
      const WeightVector wv = load_validated_weights(opt.weights_file, opt.k);
      const SubsetSpec a = load_subset_file(opt.subset_file, wv);
      inputs = inputs_from_subset(wv, a, delta);
      if (opt.best_of_complement) {
        const ComplementChoice fr = best_of_complement(wv, a, delta, TailBoundKind::freedman);
        const ComplementChoice fg = best_of_complement(wv, a, delta, TailBoundKind::fgl);
        complement = ordered_json{{"eta_subset", round_sig(fr.eta_a, opt.precision)},
                                  {"eta_complement", round_sig(fr.eta_b, opt.precision)},
                                  {"eta_used", round_sig(fr.eta_used, opt.precision)},
                                  {"used_complement", fr.used_complement},
                                  {"freedman", round_sig(fr.value, opt.precision)},
                                  {"fgl", round_sig(fg.value, opt.precision)}};
      }
    }

    const BoundReport report = evaluate_bounds(inputs);
    if (opt.format == "json") {
      ordered_json doc{{"inputs", inputs_json(report.inputs, opt.precision)},
                       {"side", opt.side},
                       {"bounds", bounds_json(report, opt.precision)}};
      if (!complement.is_null()) doc["best_of_complement"] = std::move(complement);
      out << doc.dump(2) << '\n';
    } else if (opt.format == "csv" || opt.format == "pretty") {
      const ordered_json bounds = bounds_json(report, opt.precision);
      const char sep = opt.format == "csv" ? ',' : ' ';
      if (opt.format == "csv") out << "bound,value\n";
      for (const auto& [name, value] : bounds.items()) {
        out << name << sep << fmt_sig(value.get<double>(), opt.precision) << '\n';
      }
      if (!complement.is_null()) {
        out << "best_of_complement_freedman" << sep
            << fmt_sig(complement["freedman"].get<double>(), opt.precision) << '\n';
        out << "best_of_complement_fgl" << sep
            << fmt_sig(complement["fgl"].get<double>(), opt.precision) << '\n';
      }
    } else {
      fail(ErrorCode::UsageError, "unknown format '" + opt.format + "'");
    }
    return 0;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return 2;
  }
}

int cmd_table(const TableOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const double alpha = parse_real_or_fraction(opt.alpha_text);
    const double delta = parse_real_or_fraction(opt.delta_text);

    std::vector<double> m_list;
    std::stringstream ss(opt.m_list_text);
    std::string token;
    while (std::getline(ss, token, ',')) {
      if (!token.empty()) m_list.push_back(parse_real_fraction_or_inf(token));
    }
    if (m_list.empty()) fail(ErrorCode::UsageError, "--m-list is empty");

    const BoundTable table = bound_table(alpha, delta, opt.k, m_list);
    const std::size_t cols = table.m_values.size();

    if (opt.format == "pretty") {
      char buf[64];
      out << "k = " << table.k << ", alpha = " << fmt_sig(table.alpha, opt.precision)
          << ", delta = " << fmt_sig(table.delta, opt.precision) << "\n\n";
      std::snprintf(buf, sizeof buf, "%-18s", "bound");
      out << buf;
      for (std::size_t c = 0; c < cols; ++c) {
        std::snprintf(buf, sizeof buf, "  m=%-8s", fmt_m(table.m_values[c]).c_str());
        out << buf;
      }
      out << '\n';
      const auto row = [&](const char* name, const std::vector<double>& values) {
        std::snprintf(buf, sizeof buf, "%-18s", name);
        out << buf;
        for (std::size_t c = 0; c < cols; ++c) {
          std::snprintf(buf, sizeof buf, "  %-10.4f", values[c]);
          out << buf;
        }
        out << '\n';
      };
      row("with-replacement", table.with_replacement);
      row("procedure-x", table.procedure_x);
      row("procedure-x-star", table.procedure_x_star);
    } else if (opt.format == "csv") {
      out << "bound";
      for (std::size_t c = 0; c < cols; ++c) out << ",m=" << fmt_m(table.m_values[c]);
      out << '\n';
      const auto row = [&](const char* name, const std::vector<double>& values) {
        out << name;
        for (std::size_t c = 0; c < cols; ++c)
          out << ',' << fmt_sig(values[c], opt.precision);
        out << '\n';
      };
      row("with-replacement", table.with_replacement);
      row("procedure-x", table.procedure_x);
      row("procedure-x-star", table.procedure_x_star);
    } else if (opt.format == "json") {
      ordered_json columns = ordered_json::array();
      for (std::size_t c = 0; c < cols; ++c) {
        columns.push_back(
            ordered_json{{"m", fmt_m(table.m_values[c])},
                         {"eta_bar", round_sig(table.eta_values[c], opt.precision)},
                         {"with_replacement", round_sig(table.with_replacement[c], opt.precision)},
                         {"procedure_x", round_sig(table.procedure_x[c], opt.precision)},
                         {"procedure_x_star", round_sig(table.procedure_x_star[c], opt.precision)}});
      }
      const ordered_json doc{{"k", table.k},
                             {"alpha", round_sig(table.alpha, opt.precision)},
                             {"delta", round_sig(table.delta, opt.precision)},
                             {"columns", std::move(columns)}};
      out << doc.dump(2) << '\n';
    } else {
      fail(ErrorCode::UsageError, "unknown format '" + opt.format + "'");
    }
    return 0;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return 2;
  }
}

namespace {

constexpr double kExactTol = 1e-10;
constexpr double kSubadditivityTol = 1e-12;

ordered_json instance_json(const WeightVector& wv, const SubsetSpec& a, double alpha, double eta,
                           double delta, int digits) {
  return ordered_json{{"n", wv.size()},
                      {"k", wv.k()},
                      {"alpha", round_sig(alpha, digits)},
                      {"eta", round_sig(eta, digits)},
                      {"delta", round_sig(delta, digits)},
                      {"subset", a.members}};
}

int verify_exact(const VerifyOptions& opt, const WeightVector& wv, const SubsetSpec& a,
                 double delta, const ResolvedProcedure& resolved, std::ostream& out) {
  const ScaledState x0 = scale_weights(wv);
  EnumerationConfig cfg;
  cfg.max_n = opt.max_n;

  ExactDistribution dist;
  if (resolved.procedure == Procedure::x_star_star) {
    dist = exact_distribution_rounds(x0, resolved.order, a, cfg);
  } else if (resolved.procedure == Procedure::x_star) {
    dist = exact_distribution(x0, PairPolicy::custom_order(resolved.order), a, cfg);
  } else {
    dist = exact_distribution(x0, resolved.policy, a, cfg);
  }

  const int k = wv.k();
  const double alpha = subset_alpha(wv, a);
  const double eta = eta_exact(wv, a);

  double max_inclusion_error = 0.0;
  for (std::size_t i = 0; i < wv.size(); ++i)
    max_inclusion_error = std::max(max_inclusion_error, std::fabs(dist.inclusion[i] - x0[i]));
  const bool inclusion_pass = max_inclusion_error <= kExactTol;

  const long long up_min = upper_tail_min_count(alpha, delta, k);
  const long long lo_max = lower_tail_max_count(alpha, delta, k);
  double upper_exact = 0.0;
  double lower_exact = 0.0;
  for (long long j = 0; j <= k; ++j) {
    const double p = dist.subset_pmf[static_cast<std::size_t>(j)];
    if (j >= up_min) upper_exact += p;
    if (j <= lo_max) lower_exact += p;
  }

  const double bound_freedman = freedman_pi(eta, delta, k);
  const double bound_fgl = fgl_pi_star(eta, delta, k);
  const double bound_chernoff =
      (alpha > 0.0 && alpha < 1.0) ? chernoff_bound(alpha, delta, k) : 1.0;

  const bool up_fr = upper_exact <= bound_freedman + kExactTol;
  const bool up_fgl = upper_exact <= bound_fgl + kExactTol;
  const bool lo_fr = lower_exact <= bound_freedman + kExactTol;
  const bool lo_fgl = lower_exact <= bound_fgl + kExactTol;
  const bool tail_pass = up_fr && up_fgl && lo_fr && lo_fgl;

  const double expected_vt = dist.variance ? dist.variance->expected_vt : 0.0;
  const double max_path_vt = dist.variance ? dist.variance->max_path_vt : 0.0;
  const double k_eta = k_eta_scaled(x0, a);
  // Round-based enumeration has no per-step variance; skip that verdict.
  const bool variance_pass =
      !dist.variance ||
      (expected_vt <= k_eta + kExactTol && dist.subadditivity_max_excess <= kSubadditivityTol);

  int ones = 0;
  for (std::size_t i = 0; i < x0.size(); ++i) ones += x0[i] == 1.0 ? 1 : 0;
  const int expected_rounds = k - ones;
  const bool rounds_pass =
      dist.rounds_min == expected_rounds && dist.rounds_max == expected_rounds;

  const bool overall = inclusion_pass && tail_pass && variance_pass && rounds_pass;
  const int digits = opt.precision;

  ordered_json doc{
      {"instance", instance_json(wv, a, alpha, eta, delta, digits)},
      {"procedure", procedure_name(resolved.procedure)},
      {"mode", "exact"},
      {"leaf_count", dist.leaf_count},
      {"inclusion_errors",
       ordered_json{{"max_abs", max_inclusion_error}, {"tolerance", kExactTol}}},
      {"tail",
       ordered_json{
           {"upper", ordered_json{{"exact", round_sig(upper_exact, digits)}}},
           {"lower", ordered_json{{"exact", round_sig(lower_exact, digits)}}},
           {"bounds", ordered_json{{"freedman", round_sig(bound_freedman, digits)},
                                   {"fgl", round_sig(bound_fgl, digits)},
                                   {"chernoff_ref", round_sig(bound_chernoff, digits)}}},
           {"verdicts", ordered_json{{"upper_freedman", verdict(up_fr)},
                                     {"upper_fgl", verdict(up_fgl)},
                                     {"lower_freedman", verdict(lo_fr)},
                                     {"lower_fgl", verdict(lo_fgl)}}},
       }},
      {"variance", ordered_json{{"expected", round_sig(expected_vt, digits)},
                                {"max_path", round_sig(max_path_vt, digits)},
                                {"k_eta", round_sig(k_eta, digits)}}},
      {"rounds", ordered_json{{"min", dist.rounds_min},
                              {"max", dist.rounds_max},
                              {"expected", expected_rounds}}},
      {"verdicts", ordered_json{{"inclusion", verdict(inclusion_pass)},
                                {"tail", verdict(tail_pass)},
                                {"variance", verdict(variance_pass)},
                                {"rounds", verdict(rounds_pass)},
                                {"overall", verdict(overall)}}},
  };
  out << doc.dump(2) << '\n';
  return overall ? 0 : 1;
}

int verify_mc(const VerifyOptions& opt, const WeightVector& wv, const SubsetSpec& a, double delta,
              const ResolvedProcedure& resolved, std::uint64_t seed, std::ostream& out) {
  McOptions mc;
  mc.procedure = resolved.procedure;
  mc.policy = resolved.policy;
  mc.order = resolved.order;
  mc.delta = delta;
  mc.trials = opt.trials;
  mc.seed = seed;
  mc.jobs = resolve_jobs(opt.jobs);

  const McReport report = mc_estimate(wv, a, mc);
  const bool tail_pass = report.upper_pass_freedman && report.upper_pass_fgl &&
                         report.lower_pass_freedman && report.lower_pass_fgl;
  const bool overall = report.all_pass();
  const int digits = opt.precision;

  ordered_json doc{
      {"instance", instance_json(wv, a, report.alpha, report.eta, delta, digits)},
      {"procedure", procedure_name(resolved.procedure)},
      {"mode", "mc"},
      {"trials", report.trials},
      {"seed", report.seed},
      {"jobs", mc.jobs},
      {"inclusion_errors", ordered_json{{"max_abs", round_sig(report.max_inclusion_error, digits)},
                                        {"radius_rule", "4 sigma at k*w_i"}}},
      {"tail",
       ordered_json{
           {"upper", ordered_json{{"empirical", round_sig(report.upper.empirical, digits)},
                                  {"radius", round_sig(report.upper.radius, digits)}}},
           {"lower", ordered_json{{"empirical", round_sig(report.lower.empirical, digits)},
                                  {"radius", round_sig(report.lower.radius, digits)}}},
           {"bounds", ordered_json{{"freedman", round_sig(report.bound_freedman, digits)},
                                   {"fgl", round_sig(report.bound_fgl, digits)},
                                   {"chernoff_ref", round_sig(report.bound_chernoff_ref, digits)}}},
           {"verdicts", ordered_json{{"upper_freedman", verdict(report.upper_pass_freedman)},
                                     {"upper_fgl", verdict(report.upper_pass_fgl)},
                                     {"lower_freedman", verdict(report.lower_pass_freedman)},
                                     {"lower_fgl", verdict(report.lower_pass_fgl)}}},
       }},
      {"verdicts", ordered_json{{"inclusion", verdict(report.inclusion_pass)},
                                {"tail", verdict(tail_pass)},
                                {"overall", verdict(overall)}}},
  };
  out << doc.dump(2) << '\n';
  return overall ? 0 : 1;
}

}  // namespace

int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    if (opt.mode != "exact" && opt.mode != "mc")
      fail(ErrorCode::UsageError, "--mode must be exact or mc");
    if (opt.subset_file.empty()) fail(ErrorCode::UsageError, "--subset-file is required");
    const double delta = parse_real_or_fraction(opt.delta_text);
    const WeightVector wv = load_validated_weights(opt.weights_file, opt.k);
    const SubsetSpec a = load_subset_file(opt.subset_file, wv);
    const ResolvedProcedure resolved =
        resolve_procedure(opt.procedure, opt.policy, opt.order_file, wv.size());

    if (opt.mode == "exact") return verify_exact(opt, wv, a, delta, resolved, out);
    if (opt.trials < 1) fail(ErrorCode::UsageError, "--trials must be >= 1");
    const std::uint64_t seed = opt.have_seed ? opt.seed : fresh_seed();
    return verify_mc(opt, wv, a, delta, resolved, seed, out);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return 2;
  }
}

}  // namespace pivotal
