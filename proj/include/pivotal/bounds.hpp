#pragma once

#include <limits>
#include <vector>

#include "pivotal/core.hpp"

namespace pivotal {

// Binary relative entropy D(q || p) in nats; q may sit on the boundary.
double kl_divergence(double q, double p);

// With-replacement reference: P[Bin(k, alpha) >= (alpha+delta)k] <= exp(-D(alpha+delta||alpha) k).
double chernoff_bound(double alpha, double delta, int k);

// exp(-2 delta^2 k), the classical sub-Gaussian relaxation of the above.
double hoeffding_simple(double delta, int k);

// Worst-case Azuma bound for a martingale with increments in [-1, 1]:
// exp(-delta^2 k / 2).
double azuma_bound(double delta, int k);

// Freedman tail factor pi(eta, delta)^k = [(eta/(eta+delta))^(eta+delta) e^delta]^k
// for a martingale with per-step variance rate eta and increments <= 1.
double freedman_pi(double eta, double delta, int k);

// exp(-(delta^2/2)/(eta + delta/3) k), the Bernstein-style relaxation.
double freedman_pi_simple(double eta, double delta, int k);

// Sharper factor pi*(eta, delta)^k = exp(-D((eta+delta)/(1+eta) || eta/(1+eta)) k).
// Dominates freedman_pi: pi* <= pi everywhere.
double fgl_pi_star(double eta, double delta, int k);

// Freedman's inequality in general form: total variance v, deviation c,
// increments <= 1. Value (v/(v+c))^(v+c) e^c, clamped to [0, 1].
double freedman_general(double v, double c);

// exp(-(c^2/2)/(v + c/3)).
double freedman_general_simple(double v, double c);

// General sharpened bound with explicit horizon T (deviation c capped at T):
// exp(-T D((v+c)/(v+T) || v/(v+T))).
double fgl_general(double v, double c, double t);

// Product form of fgl_general:
// [(v/(v+c))^(v+c) (T/(T-c))^(T-c)]^(T/(v+T)); algebraically identical.
double fgl_general_product(double v, double c, double t);

// eta-bar(alpha, m) = alpha - (k/m) alpha^2, the worst eta over subsets with
// weight alpha and at most m elements; m may be infinity. Clamped at 0.
double eta_upper_bound(double alpha, double m, int k);

// Largest subset size consistent with weight alpha when every element weighs
// at most 1/k: n - ceil(k (1 - alpha)).
long long m_upper_bound(std::size_t n, int k, double alpha);

// Uniform bound over all subsets: pi*(1/2, delta)^k.
double uniform_bound(double delta, int k);

// Closed-form relaxations of uniform_bound: exp(-gamma delta^2 k) with
// gamma = 4 ln 2 / 3 when refined_constant, else gamma = 8/9.
double uniform_bound_relaxed(double delta, int k, bool refined_constant);

// C(p) = ln((1-p)/p) / (1 - 2p), the sharp constant in D(q||p) >= C(p)(q-p)^2;
// C(1/2) = 2 recovers Pinsker.
double pinsker_constant(double p);

enum class EtaProvenance { exact, eta_bar, worst_case_alpha, half };

const char* eta_provenance_name(EtaProvenance p) noexcept;

struct BoundInputs {
  double alpha = 0.0;
  double delta = 0.0;
  int k = 0;
  double eta = 0.0;
  EtaProvenance provenance = EtaProvenance::exact;
  double m = std::numeric_limits<double>::infinity();  // eta_bar provenance only
};

struct BoundReport {
  BoundInputs inputs;
  double chernoff = 0.0;  // with-replacement reference
  double hoeffding = 0.0;
  double azuma = 0.0;
  double freedman = 0.0;
  double freedman_simple = 0.0;
  double fgl = 0.0;
};

BoundReport evaluate_bounds(const BoundInputs& in);

// Inputs with exact alpha and eta computed from a concrete subset.
BoundInputs inputs_from_subset(const WeightVector& wv, const SubsetSpec& a, double delta);

// Inputs from alpha alone, eta replaced by eta-bar(alpha, m).
BoundInputs inputs_from_alpha(double alpha, double delta, int k, double m);

enum class TailBoundKind { freedman, fgl };

// A and its complement deviate together, so the smaller of the two etas is
// admissible; reports which one was used.
struct ComplementChoice {
  double eta_a = 0.0;
  double eta_b = 0.0;
  double eta_used = 0.0;
  bool used_complement = false;
  double value = 0.0;
};

ComplementChoice best_of_complement(const WeightVector& wv, const SubsetSpec& a, double delta,
                                    TailBoundKind kind);

// One column per m in m_list (infinity allowed): eta-bar, the constant
// with-replacement reference, and the two without-replacement bounds.
struct BoundTable {
  double alpha = 0.0;
  double delta = 0.0;
  int k = 0;
  std::vector<double> m_values;
  std::vector<double> eta_values;
  std::vector<double> with_replacement;
  std::vector<double> procedure_x;       // freedman_pi at eta-bar
  std::vector<double> procedure_x_star;  // fgl_pi_star at eta-bar
};

BoundTable bound_table(double alpha, double delta, int k, const std::vector<double>& m_list);

}  // namespace pivotal
