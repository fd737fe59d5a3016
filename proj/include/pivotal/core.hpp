#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pivotal/errors.hpp"

namespace pivotal {

// Validation tolerances. The math assumes exact reals; these absorb
// floating-point drift without hiding genuine input errors.
struct Tolerances {
  double sum_abs = 1e-9;      // |sum(w) - 1| and |sum(x) - k|
  double bound_slack = 1e-12; // w_i <= 1/k + bound_slack
  double snap = 1e-12;        // coordinates this close to 0/1 are decided
};

// Relative weights w with sum(w) = 1 and every w_i <= 1/k, together with
// the sample size k. Immutable after validation.
class WeightVector {
 public:
  const std::vector<double>& weights() const noexcept { return weights_; }
  int k() const noexcept { return k_; }
  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }

  bool has_ids() const noexcept { return !ids_.empty(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

  // Label for element i: its id if present, else the decimal index.
  std::string label(std::size_t i) const;

  friend WeightVector validate_weights(std::vector<double> raw, int k, bool normalize,
                                       std::vector<std::string> ids, const Tolerances& tol);

 private:
  WeightVector(std::vector<double> w, int k, std::vector<std::string> ids)
      : weights_(std::move(w)), k_(k), ids_(std::move(ids)) {}

  std::vector<double> weights_;
  int k_;
  std::vector<std::string> ids_;
};

// Validates (and optionally normalizes) raw nonnegative weights.
// Throws NonPositiveTotal, WeightTooLarge, or LengthBelowK.
WeightVector validate_weights(std::vector<double> raw, int k, bool normalize = false,
                              std::vector<std::string> ids = {}, const Tolerances& tol = {});

// A subset A of [0, n): sorted, duplicate-free member indices.
struct SubsetSpec {
  std::vector<std::size_t> members;

  bool contains(std::size_t i) const noexcept;
  std::size_t size() const noexcept { return members.size(); }
};

// Builds a SubsetSpec, checking every index against n. Duplicates collapse.
SubsetSpec make_subset(std::vector<std::size_t> indices, std::size_t n);

// Complement of A within [0, n).
SubsetSpec complement_subset(const SubsetSpec& a, std::size_t n);

// Scaled weights x in [0,1]^n with sum(x) = k. Coordinates at exactly 0 or 1
// are decided; the samplers evolve copies of x until all are decided.
class ScaledState {
 public:
  // x_i = k * w_i.
  static ScaledState from_weights(const WeightVector& wv);

  // Accepts any x in [0,1]^n whose sum is within tol of a positive integer k.
  // Coordinates within tol.snap of 0/1 are snapped.
  static ScaledState from_values(std::vector<double> x, const Tolerances& tol = {});

  const std::vector<double>& values() const noexcept { return x_; }
  int k() const noexcept { return k_; }
  std::size_t size() const noexcept { return x_.size(); }
  double operator[](std::size_t i) const { return x_[i]; }

  bool decided(std::size_t i) const noexcept { return x_[i] == 0.0 || x_[i] == 1.0; }
  std::size_t undecided_count() const noexcept;

 private:
  ScaledState(std::vector<double> x, int k) : x_(std::move(x)), k_(k) {}

  std::vector<double> x_;
  int k_;
};

// scale_weights(wv) = k * w.
ScaledState scale_weights(const WeightVector& wv);

// alpha = sum of w_i over A.
double subset_alpha(const WeightVector& wv, const SubsetSpec& a);

// eta = alpha - k * sum of w_i^2 over A. Nonnegative whenever all w_i <= 1/k;
// tiny negative residue from rounding is clamped to 0.
double eta_exact(const WeightVector& wv, const SubsetSpec& a);

// Equivalent of eta_exact on a scaled state: sum over A of x_i (1 - x_i),
// which equals k * eta when x = k * w.
double k_eta_scaled(const ScaledState& x0, const SubsetSpec& a);

enum class Procedure { x, x_star, x_star_star };

const char* procedure_name(Procedure p) noexcept;
std::optional<Procedure> parse_procedure(const std::string& text) noexcept;

enum class StepCase { transfer, saturate };

// One resolved pivotal step: which pair moved, the case taken, the pre/post
// values, and the conditional-variance contribution for the tracked subset.
struct StepRecord {
  int t = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  StepCase case_tag = StepCase::transfer;
  double xi_before = 0.0;
  double xj_before = 0.0;
  double xi_after = 0.0;
  double xj_after = 0.0;
  double subset_variance = 0.0;  // Var(Y_t^A | F_{t-1}) for the tracked subset
  double subset_delta = 0.0;     // Y_t^A for the tracked subset
};

struct TrajectoryTrace {
  std::vector<StepRecord> steps;
  std::vector<int> round_boundaries;       // step indices where a weight hit 1
  std::vector<double> round_movement;      // net positive coordinate movement per round
  std::optional<SubsetSpec> tracked_subset;

  // Accumulated conditional variance V_T for the tracked subset.
  double accumulated_variance() const noexcept;

  // Z_l^A snapshots for the tracked subset at round boundaries (Z_0 first).
  std::vector<double> subset_round_values(double initial_subset_weight) const;
};

struct SampleResult {
  std::vector<std::size_t> sample;  // sorted indices with x_T = 1, |sample| = k
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  Procedure procedure = Procedure::x;
  int steps = 0;
  int rounds = 0;  // number of saturation events, k - |{i : x0_i = 1}|
  std::optional<TrajectoryTrace> trace;
};

}  // namespace pivotal
