// Copyright 2026 The satqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reference computations shared by the unit and acceptance tests. They avoid
// the library's own numerics: binomial coefficients come from Pascal's rule
// and tail probabilities from explicit enumeration.

#ifndef SATQKD_TESTS_ORACLES_H_
#define SATQKD_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "satqkd/finite_key.h"

namespace satqkd::testing {

class Pascal {
 public:
  explicit Pascal(int n_max) : rows_(n_max + 1) {
    for (int n = 0; n <= n_max; ++n) {
      rows_[n].assign(n + 1, 1.0L);
      for (int k = 1; k < n; ++k) rows_[n][k] = rows_[n - 1][k - 1] + rows_[n - 1][k];
    }
  }
  long double operator()(int n, int k) const {
    if (k < 0 || k > n) return 0.0L;
    return rows_[n][k];
  }

 private:
  std::vector<std::vector<long double>> rows_;
};

inline const Pascal& Choose() {
  static const Pascal* pascal = new Pascal(420);
  return *pascal;
}

inline long double BinomialPmf(int n, int x, long double p) {
  return Choose()(n, x) * std::pow(p, x) * std::pow(1.0L - p, n - x);
}

inline long double HyperPmf(int population, int marked, int draws, int x) {
  return Choose()(marked, x) * Choose()(population - marked, draws - x) /
         Choose()(population, draws);
}

struct Coverage {
  long double upper = 0.0L;  // P[upper bound below the mean]
  long double lower = 0.0L;  // P[lower bound above the mean]
};

// Exact failure probabilities of the Chernoff bounds for a sum of n
// Bernoulli(p) variables.
inline Coverage ChernoffFailure(int n, double p, double eps) {
  using finitekey::BoundDirection;
  const double mean = n * p;
  Coverage c;
  for (int x = 0; x <= n; ++x) {
    const long double pmf = BinomialPmf(n, x, p);
    if (finitekey::ChernoffBound(x, eps, BoundDirection::kUpper) < mean) c.upper += pmf;
    if (finitekey::ChernoffBound(x, eps, BoundDirection::kLower) > mean) c.lower += pmf;
  }
  return c;
}

// Largest exact failure probability of the sampling bound over every total
// error count, with k test bits drawn from n + k.
inline long double SamplingWorstFailure(int n, int k, double eps) {
  std::vector<double> phi(k + 1);
  for (int e = 0; e <= k; ++e) {
    phi[e] = finitekey::SamplingCorrection(n, k, static_cast<double>(e) / k, eps);
  }
  long double worst = 0.0L;
  for (int errors = 0; errors <= n + k; ++errors) {
    long double fail = 0.0L;
    for (int e = 0; e <= std::min(k, errors); ++e) {
      if (static_cast<double>(errors - e) / n > phi[e] + 1e-12) {
        fail += HyperPmf(n + k, errors, k, e);
      }
    }
    worst = std::max(worst, fail);
  }
  return worst;
}

struct MonteCarloFailures {
  int upper = 0;
  int lower = 0;
};

// Seeded trials of Binomial(n, p) checked against both Chernoff bounds.
inline MonteCarloFailures ChernoffMonteCarlo(int n, double p, double eps, int trials,
                                             std::uint64_t seed) {
  using finitekey::BoundDirection;
  std::mt19937_64 rng(seed);
  std::binomial_distribution<int> draw(n, p);
  const double mean = n * p;
  MonteCarloFailures f;
  for (int t = 0; t < trials; ++t) {
    const double x = draw(rng);
    f.upper += finitekey::ChernoffBound(x, eps, BoundDirection::kUpper) < mean;
    f.lower += finitekey::ChernoffBound(x, eps, BoundDirection::kLower) > mean;
  }
  return f;
}

// Seeded trials of a uniform n + k split holding `errors` errors; counts the
// trials whose key error rate exceeds the sampling bound.
inline int SamplingMonteCarlo(int n, int k, int errors, double eps, int trials,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::map<int, double> bound;
  int failures = 0;
  for (int t = 0; t < trials; ++t) {
    // Place each error in the test sample with the urn's current odds.
    int in_test = 0, slots = k, remaining = n + k;
    for (int i = 0; i < errors; ++i) {
      if (u(rng) * remaining < slots) {
        ++in_test;
        --slots;
      }
      --remaining;
    }
    auto it = bound.find(in_test);
    if (it == bound.end()) {
      it = bound.emplace(in_test, finitekey::SamplingCorrection(
                                      n, k, static_cast<double>(in_test) / k, eps))
               .first;
    }
    failures += static_cast<double>(errors - in_test) / n > it->second;
  }
  return failures;
}

}  // namespace satqkd::testing

#endif  // SATQKD_TESTS_ORACLES_H_
