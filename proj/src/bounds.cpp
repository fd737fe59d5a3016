#include "pivotal/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace pivotal {

namespace {

void require(bool ok, const char* message) {
  if (!ok) fail(ErrorCode::DomainError, message);
}

// All bound evaluators work in log space and only exponentiate at the end;
// a positive log can appear from rounding and is clamped away.
double exp_clamped(double log_value) {
  return log_value >= 0.0 ? 1.0 : std::exp(log_value);
}

}  // namespace

double kl_divergence(double q, double p) {
  require(p > 0.0 && p < 1.0, "kl_divergence needs p strictly inside (0, 1)");
  require(q >= 0.0 && q <= 1.0, "kl_divergence needs q in [0, 1]");
  double d = 0.0;
  if (q > 0.0) d += q * std::log(q / p);
  if (q < 1.0) d += (1.0 - q) * std::log((1.0 - q) / (1.0 - p));
  return std::max(d, 0.0);
}

double chernoff_bound(double alpha, double delta, int k) {
  require(k >= 1, "chernoff_bound needs k >= 1");
  require(alpha > 0.0 && alpha < 1.0, "chernoff_bound needs alpha in (0, 1)");
  require(delta >= 0.0, "chernoff_bound needs delta >= 0");
  const double q = alpha + delta;
  if (q > 1.0 + 1e-12) return 0.0;  // deviation target above 1: empty tail
  return exp_clamped(-static_cast<double>(k) * kl_divergence(std::min(q, 1.0), alpha));
}

double hoeffding_simple(double delta, int k) {
  require(k >= 1, "hoeffding_simple needs k >= 1");
  require(delta >= 0.0, "hoeffding_simple needs delta >= 0");
  return exp_clamped(-2.0 * delta * delta * static_cast<double>(k));
}

double azuma_bound(double delta, int k) {
  require(k >= 1, "azuma_bound needs k >= 1");
  require(delta >= 0.0, "azuma_bound needs delta >= 0");
  return exp_clamped(-0.5 * delta * delta * static_cast<double>(k));
}

double freedman_pi(double eta, double delta, int k) {
  require(k >= 1, "freedman_pi needs k >= 1");
  require(eta >= 0.0, "freedman_pi needs eta >= 0");
  require(delta >= 0.0, "freedman_pi needs delta >= 0");
  if (eta == 0.0) return delta > 0.0 ? 0.0 : 1.0;
  const double log_pi = (eta + delta) * std::log(eta / (eta + delta)) + delta;
  return exp_clamped(static_cast<double>(k) * log_pi);
}

double freedman_pi_simple(double eta, double delta, int k) {
  require(k >= 1, "freedman_pi_simple needs k >= 1");
  require(eta >= 0.0, "freedman_pi_simple needs eta >= 0");
  require(delta >= 0.0, "freedman_pi_simple needs delta >= 0");
  if (eta == 0.0 && delta == 0.0) return 1.0;
  const double log_term = -(0.5 * delta * delta) / (eta + delta / 3.0);
  return exp_clamped(static_cast<double>(k) * log_term);
}

double fgl_pi_star(double eta, double delta, int k) {
  require(k >= 1, "fgl_pi_star needs k >= 1");
  require(eta >= 0.0, "fgl_pi_star needs eta >= 0");
  require(delta >= 0.0, "fgl_pi_star needs delta >= 0");
  if (eta == 0.0) return delta > 0.0 ? 0.0 : 1.0;
  const double p = eta / (1.0 + eta);
  const double q = std::min((eta + delta) / (1.0 + eta), 1.0);
  return exp_clamped(-static_cast<double>(k) * kl_divergence(q, p));
}

double freedman_general(double v, double c) {
  require(v >= 0.0, "freedman_general needs v >= 0");
  require(c >= 0.0, "freedman_general needs c >= 0");
  if (v == 0.0) return c > 0.0 ? 0.0 : 1.0;
  return exp_clamped((v + c) * std::log(v / (v + c)) + c);
}

double freedman_general_simple(double v, double c) {
  require(v >= 0.0, "freedman_general_simple needs v >= 0");
  require(c >= 0.0, "freedman_general_simple needs c >= 0");
  if (v == 0.0 && c == 0.0) return 1.0;
  return exp_clamped(-(0.5 * c * c) / (v + c / 3.0));
}

double fgl_general(double v, double c, double t) {
  require(t > 0.0, "fgl_general needs T > 0");
  require(v >= 0.0, "fgl_general needs v >= 0");
  require(c >= 0.0, "fgl_general needs c >= 0");
  if (v == 0.0) return c > 0.0 ? 0.0 : 1.0;
  const double p = v / (v + t);
  const double q = std::min((v + c) / (v + t), 1.0);  // c >= T: all-ones path
  return exp_clamped(-t * kl_divergence(q, p));
}

double fgl_general_product(double v, double c, double t) {
  require(t > 0.0, "fgl_general_product needs T > 0");
  require(v >= 0.0, "fgl_general_product needs v >= 0");
  require(c >= 0.0, "fgl_general_product needs c >= 0");
  if (v == 0.0) return c > 0.0 ? 0.0 : 1.0;
  const double cc = std::min(c, t);
  double inner = (v + cc) * std::log(v / (v + cc));
  if (t - cc > 0.0) inner += (t - cc) * std::log(t / (t - cc));
  return exp_clamped(t / (v + t) * inner);
}

double eta_upper_bound(double alpha, double m, int k) {
  require(k >= 1, "eta_upper_bound needs k >= 1");
  require(alpha >= 0.0 && alpha <= 1.0, "eta_upper_bound needs alpha in [0, 1]");
  require(m >= 1.0, "eta_upper_bound needs m >= 1");
  const double eta = alpha - (static_cast<double>(k) / m) * alpha * alpha;
  return std::max(eta, 0.0);
}

long long m_upper_bound(std::size_t n, int k, double alpha) {
  require(k >= 1, "m_upper_bound needs k >= 1");
  require(n >= static_cast<std::size_t>(k), "m_upper_bound needs n >= k");
  require(alpha >= 0.0 && alpha <= 1.0, "m_upper_bound needs alpha in [0, 1]");
  const double held = std::ceil(static_cast<double>(k) * (1.0 - alpha) - 1e-9);
  return static_cast<long long>(n) - static_cast<long long>(std::max(held, 0.0));
}

double uniform_bound(double delta, int k) { return fgl_pi_star(0.5, delta, k); }

double uniform_bound_relaxed(double delta, int k, bool refined_constant) {
  require(k >= 1, "uniform_bound_relaxed needs k >= 1");
  require(delta >= 0.0, "uniform_bound_relaxed needs delta >= 0");
  const double gamma = refined_constant ? 4.0 * std::log(2.0) / 3.0 : 8.0 / 9.0;
  return exp_clamped(-gamma * delta * delta * static_cast<double>(k));
}

double pinsker_constant(double p) {
  require(p > 0.0 && p < 1.0, "pinsker_constant needs p in (0, 1)");
  const double u = 1.0 - 2.0 * p;
  if (u == 0.0) return 2.0;
  // ln((1-p)/p) = ln(1+u) - ln(1-u); log1p keeps this exact as u -> 0.
  return (std::log1p(u) - std::log1p(-u)) / u;
}

const char* eta_provenance_name(EtaProvenance p) noexcept {
  switch (p) {
    case EtaProvenance::exact: return "exact";
    case EtaProvenance::eta_bar: return "eta-bar";
    case EtaProvenance::worst_case_alpha: return "worst-case-alpha";
    case EtaProvenance::half: return "half";
  }
  return "exact";
}

BoundReport evaluate_bounds(const BoundInputs& in) {
  require(in.alpha > 0.0 && in.alpha < 1.0, "bound inputs need alpha in (0, 1)");
  require(in.delta >= 0.0, "bound inputs need delta >= 0");
  require(in.k >= 1, "bound inputs need k >= 1");
  require(in.eta >= 0.0, "bound inputs need eta >= 0");
  BoundReport r;
  r.inputs = in;
  r.chernoff = chernoff_bound(in.alpha, in.delta, in.k);
  r.hoeffding = hoeffding_simple(in.delta, in.k);
  r.azuma = azuma_bound(in.delta, in.k);
  r.freedman = freedman_pi(in.eta, in.delta, in.k);
  r.freedman_simple = freedman_pi_simple(in.eta, in.delta, in.k);
  r.fgl = fgl_pi_star(in.eta, in.delta, in.k);
  return r;
}

BoundInputs inputs_from_subset(const WeightVector& wv, const SubsetSpec& a, double delta) {
  BoundInputs in;
  in.alpha = subset_alpha(wv, a);
  in.delta = delta;
  in.k = wv.k();
  in.eta = eta_exact(wv, a);
  in.provenance = EtaProvenance::exact;
  in.m = static_cast<double>(a.size());
  return in;
}

BoundInputs inputs_from_alpha(double alpha, double delta, int k, double m) {
  BoundInputs in;
  in.alpha = alpha;
  in.delta = delta;
  in.k = k;
  in.eta = eta_upper_bound(alpha, m, k);
  in.provenance = std::isinf(m) ? EtaProvenance::worst_case_alpha : EtaProvenance::eta_bar;
  in.m = m;
  return in;
}

ComplementChoice best_of_complement(const WeightVector& wv, const SubsetSpec& a, double delta,
                                    TailBoundKind kind) {
  const SubsetSpec b = complement_subset(a, wv.size());
  ComplementChoice choice;
  choice.eta_a = eta_exact(wv, a);
  choice.eta_b = eta_exact(wv, b);
  choice.used_complement = choice.eta_b < choice.eta_a;
  choice.eta_used = choice.used_complement ? choice.eta_b : choice.eta_a;
  choice.value = kind == TailBoundKind::freedman ? freedman_pi(choice.eta_used, delta, wv.k())
                                                 : fgl_pi_star(choice.eta_used, delta, wv.k());
  return choice;
}

BoundTable bound_table(double alpha, double delta, int k, const std::vector<double>& m_list) {
  require(!m_list.empty(), "bound_table needs at least one m");
  const double with_replacement = chernoff_bound(alpha, delta, k);
  BoundTable table;
  table.alpha = alpha;
  table.delta = delta;
  table.k = k;
  for (const double m : m_list) {
    const double eta = eta_upper_bound(alpha, m, k);
    table.m_values.push_back(m);
    table.eta_values.push_back(eta);
    table.with_replacement.push_back(with_replacement);
    table.procedure_x.push_back(freedman_pi(eta, delta, k));
    table.procedure_x_star.push_back(fgl_pi_star(eta, delta, k));
  }
  return table;
}

}  // namespace pivotal
