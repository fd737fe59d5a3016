#include "pivotal/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pivotal {

const char* error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveTotal: return "NonPositiveTotal";
    case ErrorCode::WeightTooLarge: return "WeightTooLarge";
    case ErrorCode::LengthBelowK: return "LengthBelowK";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InvalidPermutation: return "InvalidPermutation";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NumericFailure: return "NumericFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Error";
}

std::string WeightVector::label(std::size_t i) const {
  if (i < ids_.size()) return ids_[i];
  return std::to_string(i);
}

WeightVector validate_weights(std::vector<double> raw, int k, bool normalize,
                              std::vector<std::string> ids, const Tolerances& tol) {
  if (k < 1) fail(ErrorCode::DomainError, "sample size k must be >= 1, got " + std::to_string(k));
  if (raw.empty()) fail(ErrorCode::LengthBelowK, "weight vector is empty");
  if (!ids.empty() && ids.size() != raw.size())
    fail(ErrorCode::DomainError, "ids length does not match weights length");
  if (raw.size() < static_cast<std::size_t>(k))
    fail(ErrorCode::LengthBelowK, "need n >= k, got n = " + std::to_string(raw.size()) +
                                      ", k = " + std::to_string(k));

  double total = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!(raw[i] >= 0.0))
      fail(ErrorCode::DomainError, "weight at index " + std::to_string(i) + " is negative or NaN");
    total += raw[i];
  }
  if (total <= 0.0) fail(ErrorCode::NonPositiveTotal, "weights sum to zero");

  if (normalize) {
    for (auto& w : raw) w /= total;
    total = std::accumulate(raw.begin(), raw.end(), 0.0);
  }
  if (std::fabs(total - 1.0) > tol.sum_abs)
    fail(ErrorCode::DomainError, "weights must sum to 1 (got " + std::to_string(total) +
                                     "); pass normalize to rescale");

  const double cap = 1.0 / static_cast<double>(k);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] > cap + tol.bound_slack)
      fail(ErrorCode::WeightTooLarge, "weight " + std::to_string(raw[i]) + " at index " +
                                          std::to_string(i) + " exceeds 1/k = " + std::to_string(cap));
    if (raw[i] > cap) raw[i] = cap;  // within slack: treat as exactly 1/k
  }
  return WeightVector(std::move(raw), k, std::move(ids));
}

bool SubsetSpec::contains(std::size_t i) const noexcept {
  return std::binary_search(members.begin(), members.end(), i);
}

SubsetSpec make_subset(std::vector<std::size_t> indices, std::size_t n) {
  for (auto i : indices) {
    if (i >= n)
      fail(ErrorCode::IndexOutOfRange,
           "subset index " + std::to_string(i) + " out of range [0, " + std::to_string(n) + ")");
  }
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  return SubsetSpec{std::move(indices)};
}

SubsetSpec complement_subset(const SubsetSpec& a, std::size_t n) {
  std::vector<std::size_t> out;
  out.reserve(n - a.members.size());
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (pos < a.members.size() && a.members[pos] == i) {
      ++pos;
    } else {
      out.push_back(i);
    }
  }
  return SubsetSpec{std::move(out)};
}

namespace {

double snap_unit(double v, double snap_tol) {
  if (std::fabs(v) <= snap_tol) return 0.0;
  if (std::fabs(v - 1.0) <= snap_tol) return 1.0;
  return v;
}

}  // namespace

ScaledState ScaledState::from_weights(const WeightVector& wv) {
  std::vector<double> x(wv.size());
  const double k = static_cast<double>(wv.k());
  Tolerances tol;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = snap_unit(k * wv[i], tol.snap);
  return ScaledState(std::move(x), wv.k());
}

ScaledState ScaledState::from_values(std::vector<double> x, const Tolerances& tol) {
  if (x.empty()) fail(ErrorCode::DomainError, "scaled state is empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = snap_unit(x[i], tol.snap);
    if (x[i] < 0.0 || x[i] > 1.0)
      fail(ErrorCode::DomainError,
           "scaled weight at index " + std::to_string(i) + " outside [0, 1]");
    sum += x[i];
  }
  const double rounded = std::round(sum);
  if (std::fabs(sum - rounded) > tol.sum_abs || rounded < 1.0)
    fail(ErrorCode::DomainError,
         "scaled weights must sum to a positive integer k (got " + std::to_string(sum) + ")");
  const int k = static_cast<int>(rounded);
  if (static_cast<std::size_t>(k) > x.size())
    fail(ErrorCode::LengthBelowK, "scaled weight sum exceeds dimension");
  return ScaledState(std::move(x), k);
}

std::size_t ScaledState::undecided_count() const noexcept {
  std::size_t c = 0;
  for (std::size_t i = 0; i < x_.size(); ++i) c += !decided(i);
  return c;
}

ScaledState scale_weights(const WeightVector& wv) { return ScaledState::from_weights(wv); }

double subset_alpha(const WeightVector& wv, const SubsetSpec& a) {
  double alpha = 0.0;
  for (auto i : a.members) {
    if (i >= wv.size()) fail(ErrorCode::IndexOutOfRange, "subset index " + std::to_string(i));
    alpha += wv[i];
  }
  return alpha;
}

double eta_exact(const WeightVector& wv, const SubsetSpec& a) {
  double alpha = 0.0;
  double sq = 0.0;
  for (auto i : a.members) {
    if (i >= wv.size()) fail(ErrorCode::IndexOutOfRange, "subset index " + std::to_string(i));
    alpha += wv[i];
    sq += wv[i] * wv[i];
  }
  const double eta = alpha - static_cast<double>(wv.k()) * sq;
  return eta < 0.0 ? 0.0 : eta;
}

double k_eta_scaled(const ScaledState& x0, const SubsetSpec& a) {
  double v = 0.0;
  for (auto i : a.members) {
    if (i >= x0.size()) fail(ErrorCode::IndexOutOfRange, "subset index " + std::to_string(i));
    v += x0[i] * (1.0 - x0[i]);
  }
  return v;
}

const char* procedure_name(Procedure p) noexcept {
  switch (p) {
    case Procedure::x: return "x";
    case Procedure::x_star: return "x-star";
    case Procedure::x_star_star: return "x-star-star";
  }
  return "x";
}

std::optional<Procedure> parse_procedure(const std::string& text) noexcept {
  if (text == "x") return Procedure::x;
  if (text == "x-star" || text == "x*") return Procedure::x_star;
  if (text == "x-star-star" || text == "x**") return Procedure::x_star_star;
  return std::nullopt;
}

double TrajectoryTrace::accumulated_variance() const noexcept {
  double v = 0.0;
  for (const auto& s : steps) v += s.subset_variance;
  return v;
}

std::vector<double> TrajectoryTrace::subset_round_values(double initial_subset_weight) const {
  std::vector<double> z;
  z.reserve(round_boundaries.size() + 1);
  z.push_back(initial_subset_weight);
  double running = initial_subset_weight;
  std::size_t next_boundary = 0;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    running += steps[t].subset_delta;
    if (next_boundary < round_boundaries.size() &&
        static_cast<int>(t) == round_boundaries[next_boundary]) {
      z.push_back(running);
      ++next_boundary;
    }
  }
  return z;
}

}  // namespace pivotal
