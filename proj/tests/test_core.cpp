#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "pivotal/core.hpp"

using namespace pivotal;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::UsageError;  // sentinel: "did not throw"
}

}  // namespace

TEST_CASE("validate_weights accepts valid input") {
  auto wv = validate_weights({0.3, 0.7}, 1);
  CHECK(wv.k() == 1);
  CHECK(wv.size() == 2);
  CHECK(wv[0] == 0.3);
  CHECK(wv[1] == 0.7);
  CHECK_FALSE(wv.has_ids());
  CHECK(wv.label(1) == "1");
}

TEST_CASE("validate_weights normalizes on request") {
  auto wv = validate_weights({3.0, 7.0}, 1, true);
  CHECK(wv[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(wv[1] == doctest::Approx(0.7).epsilon(1e-15));

  // Without the flag the same input is rejected: the sum is 10, not 1.
  CHECK(code_of([] { validate_weights({3.0, 7.0}, 1); }) == ErrorCode::DomainError);
}

TEST_CASE("validate_weights attaches ids") {
  auto wv = validate_weights({0.5, 0.5}, 1, false, {"left", "right"});
  REQUIRE(wv.has_ids());
  CHECK(wv.label(0) == "left");
  CHECK(wv.label(1) == "right");
  CHECK(code_of([] { validate_weights({0.5, 0.5}, 1, false, {"only-one"}); }) ==
        ErrorCode::DomainError);
}

TEST_CASE("validate_weights error taxonomy") {
  CHECK(code_of([] { validate_weights({}, 1); }) == ErrorCode::LengthBelowK);
  CHECK(code_of([] { validate_weights({1.0}, 2); }) == ErrorCode::LengthBelowK);
  CHECK(code_of([] { validate_weights({0.5, 0.5}, 0); }) == ErrorCode::DomainError);
  CHECK(code_of([] { validate_weights({0.0, 0.0}, 1, true); }) == ErrorCode::NonPositiveTotal);
  CHECK(code_of([] { validate_weights({-0.1, 1.1}, 1); }) == ErrorCode::DomainError);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK(code_of([nan] { validate_weights({nan, 1.0}, 1); }) == ErrorCode::DomainError);

  // 0.6 > 1/2, so k=2 rejects it, and the message names the offender.
  try {
    validate_weights({0.6, 0.4}, 2);
    FAIL("expected WeightTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WeightTooLarge);
    CHECK(std::string(e.what()).find("index 0") != std::string::npos);
  }
}

TEST_CASE("validate_weights clamps a weight within slack of the cap") {
  // 1/4 + 5e-13 is inside the 1e-12 slack; it must come out as exactly 1/4.
  std::vector<double> raw{0.25 + 5e-13, 0.25, 0.25, 0.25 - 5e-13};
  auto wv = validate_weights(raw, 4);
  CHECK(wv[0] == 0.25);
  auto x0 = scale_weights(wv);
  CHECK(x0[0] == 1.0);
  CHECK(x0.decided(0));

  CHECK(code_of([] { validate_weights({0.25 + 1e-10, 0.25, 0.25, 0.25 - 1e-10}, 4); }) ==
        ErrorCode::WeightTooLarge);
}

TEST_CASE("zero weights are allowed and start decided at 0") {
  auto wv = validate_weights({0.0, 0.5, 0.5}, 1);
  auto x0 = scale_weights(wv);
  CHECK(x0[0] == 0.0);
  CHECK(x0.decided(0));
  CHECK(x0.undecided_count() == 2);
}

TEST_CASE("scale_weights multiplies by k") {
  auto id1 = scale_weights(validate_weights({0.3, 0.7}, 1));
  CHECK(id1[0] == 0.3);
  CHECK(id1[1] == 0.7);

  auto uni = scale_weights(validate_weights({0.25, 0.25, 0.25, 0.25}, 2));
  for (std::size_t i = 0; i < 4; ++i) CHECK(uni[i] == 0.5);

  auto x0 = scale_weights(validate_weights({0.1, 0.2, 0.3, 0.4}, 2));
  CHECK(x0[0] == 0.2);
  CHECK(x0[1] == 0.4);
  CHECK(x0[2] == 0.6);
  CHECK(x0[3] == 0.8);
  CHECK(x0.k() == 2);
  CHECK(x0.undecided_count() == 4);

  // 0.4 > 1/3 makes the same weights invalid for k=3.
  CHECK(code_of([] { validate_weights({0.1, 0.2, 0.3, 0.4}, 3); }) == ErrorCode::WeightTooLarge);
}

TEST_CASE("scale then unscale round-trips") {
  RandomSource rng(11, 0);
  for (int rep = 0; rep < 50; ++rep) {
    std::size_t n = 3 + rep % 9;
    int k = 1 + static_cast<int>(rng.next_below(n - 1));
    auto wv = validate_weights(testutil::random_weights(n, k, rng), k);
    auto x0 = scale_weights(wv);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::fabs(x0[i] / k - wv[i]) <= 1e-15);
      sum += x0[i];
    }
    CHECK(std::fabs(sum - k) <= 1e-9);
  }
}

TEST_CASE("from_values snaps and validates") {
  auto st = ScaledState::from_values({1.0 - 1e-13, 0.5, 0.5 + 1e-13});
  CHECK(st[0] == 1.0);
  CHECK(st.k() == 2);
  CHECK(st.undecided_count() == 2);

  CHECK(code_of([] { ScaledState::from_values({0.5, 0.2}); }) == ErrorCode::DomainError);
  CHECK(code_of([] { ScaledState::from_values({1.5, 0.5}); }) == ErrorCode::DomainError);
  CHECK(code_of([] { ScaledState::from_values({}); }) == ErrorCode::DomainError);
}

TEST_CASE("make_subset and complement") {
  auto a = make_subset({3, 0, 3}, 4);  // duplicates collapse
  REQUIRE(a.size() == 2);
  CHECK(a.contains(0));
  CHECK(a.contains(3));
  CHECK_FALSE(a.contains(1));

  auto b = complement_subset(a, 4);
  REQUIRE(b.size() == 2);
  CHECK(b.contains(1));
  CHECK(b.contains(2));

  CHECK(code_of([] { make_subset({4}, 4); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("subset_alpha sums member weights") {
  auto wv = validate_weights({0.1, 0.1, 0.3, 0.5}, 1);
  CHECK(subset_alpha(wv, make_subset({}, 4)) == 0.0);
  CHECK(subset_alpha(wv, make_subset({0, 1, 2, 3}, 4)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(subset_alpha(wv, make_subset({0, 2}, 4)) == doctest::Approx(0.4).epsilon(1e-15));

  auto bad = SubsetSpec{{7}};
  CHECK_THROWS_AS((void)subset_alpha(wv, bad), Error);
}

TEST_CASE("eta_exact on uniform weights matches (m/n)(1-k/n)") {
  const std::size_t n = 10;
  const int k = 3;
  std::vector<double> w(n, 1.0 / n);
  auto wv = validate_weights(w, k, true);
  for (std::size_t m : {std::size_t{1}, std::size_t{4}, n}) {
    std::vector<std::size_t> idx(m);
    for (std::size_t i = 0; i < m; ++i) idx[i] = i;
    double eta = eta_exact(wv, make_subset(idx, n));
    double want = (double(m) / n) * (1.0 - double(k) / n);
    CHECK(eta == doctest::Approx(want).epsilon(1e-13));
  }
  CHECK(eta_exact(wv, make_subset({}, n)) == 0.0);
}

TEST_CASE("eta_exact agrees with the variance decomposition") {
  // alpha - (k/m) alpha^2 - k m beta, beta the weight variance over A,
  // must match the direct formula on random instances.
  RandomSource rng(17, 0);
  for (int rep = 0; rep < 1000; ++rep) {
    std::size_t n = 2 + rep % 14;
    int k = 1 + static_cast<int>(rng.next_below(n - 1));
    auto wv = validate_weights(testutil::random_weights(n, k, rng), k);
    std::size_t m = 1 + rng.next_below(n);
    auto a = make_subset(testutil::random_subset(n, m, rng), n);

    double eta = eta_exact(wv, a);
    double alpha = subset_alpha(wv, a);
    double mean = alpha / double(m);
    double beta = 0.0;
    for (auto i : a.members) beta += (wv[i] - mean) * (wv[i] - mean);
    beta /= double(m);
    double decomposed = alpha - (double(k) / double(m)) * alpha * alpha -
                        double(k) * double(m) * beta;
    CHECK(std::fabs(eta - decomposed) <= 1e-12);
    CHECK(eta >= 0.0);
    CHECK(eta <= alpha + 1e-12);
  }
}

TEST_CASE("k_eta_scaled equals k times eta_exact") {
  RandomSource rng(19, 0);
  for (int rep = 0; rep < 200; ++rep) {
    std::size_t n = 2 + rep % 10;
    int k = 1 + static_cast<int>(rng.next_below(n - 1));
    auto wv = validate_weights(testutil::random_weights(n, k, rng), k);
    auto a = make_subset(testutil::random_subset(n, 1 + rng.next_below(n), rng), n);
    CHECK(k_eta_scaled(scale_weights(wv), a) ==
          doctest::Approx(k * eta_exact(wv, a)).epsilon(1e-12));
  }
}

TEST_CASE("procedure names parse both canonical and starred spellings") {
  CHECK(parse_procedure("x") == Procedure::x);
  CHECK(parse_procedure("x-star") == Procedure::x_star);
  CHECK(parse_procedure("x*") == Procedure::x_star);
  CHECK(parse_procedure("x-star-star") == Procedure::x_star_star);
  CHECK(parse_procedure("x**") == Procedure::x_star_star);
  CHECK_FALSE(parse_procedure("y").has_value());
  CHECK(procedure_name(Procedure::x_star_star) == std::string("x-star-star"));
}
