#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "pivotal/rng.hpp"

namespace testutil {

// Random weights with sum 1 and max strictly below 1/k. Starts from
// exponential draws and blends toward uniform until the cap holds, so the
// loop terminates deterministically even for k = n - 1.
inline std::vector<double> random_weights(std::size_t n, int k, pivotal::RandomSource& rng) {
  std::vector<double> e(n);
  for (auto& v : e) v = -std::log(1.0 - rng.next_unit());
  for (double blend = 0.0;; blend += 0.5) {
    std::vector<double> w(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = e[i] + blend;
      total += w[i];
    }
    double max_w = 0.0;
    for (auto& v : w) {
      v /= total;
      max_w = std::max(max_w, v);
    }
    if (max_w * k <= 0.999) return w;
  }
}

// Random size-m subset of [0, n) via partial Fisher-Yates.
inline std::vector<std::size_t> random_subset(std::size_t n, std::size_t m,
                                              pivotal::RandomSource& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}

inline std::vector<std::size_t> random_permutation(std::size_t n, pivotal::RandomSource& rng) {
  return random_subset(n, n, rng);
}

}  // namespace testutil
