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

#include "satqkd/finite_key.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "satqkd/errors.h"

namespace satqkd::finitekey {
namespace {

using detect::BlockStats;
using detect::ProtocolParams;

// Tail sums stop once a term falls below this fraction of the running sum.
constexpr long double kTailTolerance = 1e-22L;

long double LogChoose(std::int64_t n, std::int64_t k) {
  const auto ln = static_cast<long double>(n);
  const auto lk = static_cast<long double>(k);
  return std::lgamma(ln + 1.0L) - std::lgamma(lk + 1.0L) - std::lgamma(ln - lk + 1.0L);
}

long double Log2(long double x) { return std::log2(x); }

long double EntropyLong(long double x) {
  if (x <= 0.0L || x >= 1.0L) return 0.0L;
  return -(x * std::log(x) + (1.0L - x) * std::log1p(-x)) / std::log(2.0L);
}

// Sums a unimodal discrete law's tail starting at `start` and moving away from
// the mode; `log_pmf(start)` seeds the sum and `ratio(x)` maps pmf(x) to the
// next term.
template <typename Ratio>
long double TailSum(long double log_first, std::int64_t start, std::int64_t stop,
                    int step, Ratio ratio) {
  long double term = std::exp(log_first);
  long double sum = term;
  for (std::int64_t x = start; x != stop;) {
    term *= ratio(x);
    x += step;
    sum += term;
    if (term <= sum * kTailTolerance) break;
  }
  return sum;
}

void Flag(std::vector<std::string>& diagnostics, const std::string& flag) {
  if (std::find(diagnostics.begin(), diagnostics.end(), flag) == diagnostics.end()) {
    diagnostics.push_back(flag);
  }
}

std::int64_t FloorToBits(long double value, double raw_bits) {
  if (!(value > 0.0L)) return 0;
  const long double capped = std::min(value, static_cast<long double>(raw_bits));
  return static_cast<std::int64_t>(std::floor(capped));
}

}  // namespace

std::string_view ToString(LeakageModel model) {
  return model == LeakageModel::kSyndromeSet ? "syndrome_set" : "efficiency_factor";
}

LeakageModel LeakageModelFromString(std::string_view name) {
  if (name == "syndrome_set") return LeakageModel::kSyndromeSet;
  if (name == "efficiency_factor") return LeakageModel::kEfficiencyFactor;
  throw ConfigError("finitekey", fmt::format("unknown leakage model '{}'", name));
}

void SecurityParams::Validate() const {
  if (!(eps_sec > 0.0 && eps_sec < 1.0) || !(eps_cor > 0.0 && eps_cor < 1.0)) {
    throw ConfigError("finitekey", "eps_sec and eps_cor must lie in (0, 1)");
  }
  if (!(f_ec >= 1.0)) throw ConfigError("finitekey", "f_ec must be >= 1");
  if (syndrome_failure_prob.has_value() &&
      !(*syndrome_failure_prob > 0.0 && *syndrome_failure_prob < 1.0)) {
    throw ConfigError("finitekey", "syndrome_failure_prob must lie in (0, 1)");
  }
}

double BinaryEntropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("finitekey", fmt::format("entropy argument {} outside [0, 1]", x));
  }
  return static_cast<double>(EntropyLong(x));
}

double ChernoffBound(double observed, double eps, BoundDirection direction) {
  if (!(observed >= 0.0) || !(eps > 0.0 && eps < 1.0)) {
    throw DomainError("finitekey", "Chernoff bound needs count >= 0 and eps in (0, 1)");
  }
  const double beta = std::log(1.0 / eps);
  if (direction == BoundDirection::kUpper) {
    // P[X <= (1-d) E] <= exp(-d^2 E / 2), solved for E.
    return observed + beta + std::sqrt(2.0 * beta * observed + beta * beta);
  }
  // P[X >= (1+d) E] <= exp(-d^2 E / (2+d)), solved for E.
  const double lower =
      observed + 0.5 * beta - std::sqrt(2.0 * beta * observed + 0.25 * beta * beta);
  return std::max(0.0, lower);
}

long double HypergeometricCdf(std::int64_t population, std::int64_t marked,
                              std::int64_t draws, std::int64_t x) {
  const std::int64_t lo = std::max<std::int64_t>(0, draws - (population - marked));
  const std::int64_t hi = std::min(draws, marked);
  if (x < lo) return 0.0L;
  if (x >= hi) return 1.0L;
  const std::int64_t unmarked = population - marked;
  auto log_pmf = [&](std::int64_t y) {
    return LogChoose(marked, y) + LogChoose(unmarked, draws - y) -
           LogChoose(population, draws);
  };
  const auto mode = static_cast<std::int64_t>(
      std::floor(static_cast<long double>(draws + 1) * (marked + 1) / (population + 2)));
  if (x < mode) {
    return TailSum(log_pmf(x), x, lo, -1, [&](std::int64_t y) {
      return static_cast<long double>(y) * static_cast<long double>(unmarked - draws + y) /
             (static_cast<long double>(marked - y + 1) * static_cast<long double>(draws - y + 1));
    });
  }
  const long double upper =
      TailSum(log_pmf(x + 1), x + 1, hi, +1, [&](std::int64_t y) {
        return static_cast<long double>(marked - y) * static_cast<long double>(draws - y) /
               (static_cast<long double>(y + 1) *
                static_cast<long double>(unmarked - draws + y + 1));
      });
  return std::max(0.0L, 1.0L - upper);
}

std::int64_t BinomialQuantile(std::int64_t trials, double p, double q) {
  if (trials < 0 || !(p >= 0.0 && p <= 1.0) || !(q > 0.0 && q < 1.0)) {
    throw DomainError("finitekey", "binomial quantile needs trials >= 0, p in [0,1], q in (0,1)");
  }
  if (p == 0.0 || trials == 0) return 0;
  if (p == 1.0) return trials;
  const long double lp = std::log(static_cast<long double>(p));
  const long double lq = std::log1p(-static_cast<long double>(p));
  const long double odds = (1.0L - p) / p;
  auto cdf = [&](std::int64_t x) -> long double {
    if (x >= trials) return 1.0L;
    auto log_pmf = [&](std::int64_t y) {
      return LogChoose(trials, y) + y * lp + (trials - y) * lq;
    };
    const auto mode = static_cast<std::int64_t>(std::floor((trials + 1) * p));
    if (x < mode) {
      return TailSum(log_pmf(x), x, 0, -1, [&](std::int64_t y) {
        return static_cast<long double>(y) * odds / static_cast<long double>(trials - y + 1);
      });
    }
    const long double upper =
        TailSum(log_pmf(x + 1), x + 1, trials, +1, [&](std::int64_t y) {
          return static_cast<long double>(trials - y) /
                 (static_cast<long double>(y + 1) * odds);
        });
    return std::max(0.0L, 1.0L - upper);
  };
  std::int64_t lo = 0;
  std::int64_t hi = trials;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (cdf(mid) >= q) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

double SamplingCorrection(double n_key, double n_test, double test_error_rate,
                          double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw DomainError("finitekey", "sampling bound needs eps in (0, 1)");
  }
  if (!(test_error_rate >= 0.0 && test_error_rate <= 1.0)) {
    throw DomainError("finitekey", "test error rate must lie in [0, 1]");
  }
  const std::int64_t k = std::llround(n_test);
  if (!(n_test > 0.0) || k < 1) {
    throw ModelError("finitekey", "degenerate block: no test-basis bits");
  }
  const std::int64_t n = std::max<std::int64_t>(1, std::llround(n_key));
  std::int64_t errors = static_cast<std::int64_t>(
      std::ceil(test_error_rate * n_test - 1e-9));
  errors = std::clamp<std::int64_t>(errors, 0, k);

  // Largest total error count E for which seeing at most `errors` test errors
  // is still more likely than eps. P[X <= errors | E] falls with E.
  std::int64_t lo = errors;
  std::int64_t hi = errors + n;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo + 1) / 2;
    if (HypergeometricCdf(n + k, mid, k, errors) > eps) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return static_cast<double>(lo - errors) / static_cast<double>(n);
}

DecoyBounds DecoyYieldBounds(const BlockStats& stats, const ProtocolParams& params,
                             double eps) {
  if (stats.key.size() != 3 || stats.test.size() != 3) {
    throw ModelError("finitekey", "decoy bounds need three intensity cells per basis");
  }
  params.Validate();
  const auto& mu = params.intensities;
  const auto& p = params.intensity_probs;
  if (mu[2] != 0.0) throw ConfigError("finitekey", "decoy bounds assume mu3 = 0");

  auto tau = [&](int photons) {
    double sum = 0.0;
    for (int k = 0; k < 3; ++k) {
      sum += p[k] * std::exp(-mu[k]) * std::pow(mu[k], photons) / std::tgamma(photons + 1.0);
    }
    return sum;
  };
  const double tau0 = tau(0);
  const double tau1 = tau(1);

  auto scaled = [&](double count, int k, BoundDirection dir) {
    return std::exp(mu[k]) / p[k] * ChernoffBound(count, eps, dir);
  };

  DecoyBounds out;
  auto estimate = [&](const std::vector<detect::CountCell>& cells, double& s0, double& s1) {
    const double n1_up = scaled(cells[0].n, 0, BoundDirection::kUpper);
    const double n2_lo = scaled(cells[1].n, 1, BoundDirection::kLower);
    const double n2_up = scaled(cells[1].n, 1, BoundDirection::kUpper);
    const double n3_lo = scaled(cells[2].n, 2, BoundDirection::kLower);
    const double n3_up = scaled(cells[2].n, 2, BoundDirection::kUpper);
    s0 = tau0 * (mu[1] * n3_lo - mu[2] * n2_up) / (mu[1] - mu[2]);
    if (s0 < 0.0) {
      Flag(out.diagnostics, "s0_clamped");
      s0 = 0.0;
    }
    const double mu_sq = mu[1] * mu[1] - mu[2] * mu[2];
    s1 = tau1 * mu[0] *
         (n2_lo - n3_up - mu_sq / (mu[0] * mu[0]) * (n1_up - s0 / tau0)) /
         (mu[0] * (mu[1] - mu[2]) - mu_sq);
    if (s1 < 0.0) {
      Flag(out.diagnostics, "s1_clamped");
      s1 = 0.0;
    }
  };
  estimate(stats.key, out.s0_lower, out.s1_lower);
  estimate(stats.test, out.s0_test_lower, out.s1_test_lower);

  const double m2_up = std::exp(mu[1]) / p[1] *
                       ChernoffBound(stats.test[1].m, eps, BoundDirection::kUpper);
  const double m3_lo = std::exp(mu[2]) / p[2] *
                       ChernoffBound(stats.test[2].m, eps, BoundDirection::kLower);
  out.v1_test_upper = std::max(0.0, tau1 * (m2_up - m3_lo) / (mu[1] - mu[2]));

  if (out.s1_test_lower < 1.0 || out.s1_lower < 1.0) {
    Flag(out.diagnostics, "phase_error_unbounded");
    out.phi_upper = 0.5;
    return out;
  }
  double ratio = out.v1_test_upper / out.s1_test_lower;
  if (ratio > 0.5) {
    Flag(out.diagnostics, "phase_error_clamped");
    ratio = 0.5;
  }
  out.phi_upper = SamplingCorrection(out.s1_lower, out.s1_test_lower, ratio, eps);
  if (out.phi_upper > 0.5) {
    Flag(out.diagnostics, "phase_error_clamped");
    out.phi_upper = 0.5;
  }
  return out;
}

double EcLeakage(double n, double qber, const SecurityParams& sec) {
  if (!(qber >= 0.0 && qber <= 1.0)) {
    throw DomainError("finitekey", fmt::format("QBER {} outside [0, 1]", qber));
  }
  if (!(n > 0.0)) return 0.0;
  const double q = std::min(qber, 0.5);
  const long double h = EntropyLong(q);
  if (sec.leakage_model == LeakageModel::kEfficiencyFactor) {
    return static_cast<double>(sec.f_ec * n * h);
  }
  if (q == 0.0) return 0.0;
  const double eps = sec.syndrome_failure_prob.value_or(sec.eps_cor);
  const std::int64_t trials = std::max<std::int64_t>(1, std::llround(n));
  const auto quantile = static_cast<long double>(BinomialQuantile(trials, 1.0 - q, eps));
  const long double leak = n * h +
                           (n * (1.0L - q) - quantile - 1.0L) * Log2((1.0L - q) / q) -
                           0.5L * Log2(n) - Log2(1.0L / eps);
  return static_cast<double>(std::clamp<long double>(leak, 0.0L, n));
}

KeyResult SklDecoyBb84(const BlockStats& stats, const ProtocolParams& params,
                       const SecurityParams& sec) {
  sec.Validate();
  KeyResult result;
  result.analysis = "decoy_bb84";
  result.params_used = params;
  const double eps_bound = sec.eps_sec / 21.0;
  result.epsilon_budget = {{"eps_sec", sec.eps_sec},
                           {"eps_cor", sec.eps_cor},
                           {"eps_per_bound", eps_bound},
                           {"pa_penalty_bits", 6.0 * std::log2(21.0 / sec.eps_sec)},
                           {"cor_penalty_bits", std::log2(2.0 / sec.eps_cor)}};
  const auto key = stats.KeyTotal();
  const auto test = stats.TestTotal();
  result.raw_bits = key.n;
  result.qber = key.qber();
  result.test_qber = test.qber();
  if (!(key.n >= 1.0) || !(test.n >= 1.0)) {
    Flag(result.diagnostics, "block_too_small");
    result.phase_error_upper = 0.5;
    return result;
  }

  const DecoyBounds bounds = DecoyYieldBounds(stats, params, eps_bound);
  result.diagnostics = bounds.diagnostics;
  result.s0_lower = bounds.s0_lower;
  result.s1_lower = bounds.s1_lower;
  result.phase_error_upper = bounds.phi_upper;
  result.lambda_ec_bits = EcLeakage(key.n, std::min(result.qber, 0.5), sec);
  if (result.qber > 0.5) Flag(result.diagnostics, "qber_clamped");

  const long double value =
      static_cast<long double>(bounds.s0_lower) +
      static_cast<long double>(bounds.s1_lower) * (1.0L - EntropyLong(bounds.phi_upper)) -
      result.lambda_ec_bits - 6.0L * Log2(21.0L / sec.eps_sec) -
      Log2(2.0L / sec.eps_cor);
  result.skl_real = static_cast<double>(value);
  result.skl_bits = FloorToBits(value, key.n);
  return result;
}

namespace {

struct Bbm92Block {
  detect::CountCell key;
  detect::CountCell test;
  bool usable = false;
};

Bbm92Block PrepareBbm92(const BlockStats& stats, KeyResult& result) {
  if (stats.key.size() != 1 || stats.test.size() != 1) {
    throw ModelError("finitekey", "BBM92 key length needs single-cell bases");
  }
  Bbm92Block block{stats.KeyTotal(), stats.TestTotal(), false};
  result.raw_bits = block.key.n;
  result.qber = std::min(block.key.qber(), 0.5);
  result.test_qber = block.test.qber();
  if (block.key.n == 0.0 && block.test.n == 0.0) {
    Flag(result.diagnostics, "empty_block");
    result.phase_error_upper = 0.5;
    return block;
  }
  if (block.key.n == 0.0 || block.test.n == 0.0) {
    throw ModelError("finitekey", "degenerate block: one basis is empty");
  }
  if (block.key.n < 1.0 || block.test.n < 1.0) {
    Flag(result.diagnostics, "block_too_small");
    result.phase_error_upper = 0.5;
    return block;
  }
  if (block.key.qber() > 0.5 || block.test.qber() > 0.5) {
    Flag(result.diagnostics, "qber_clamped");
  }
  block.usable = true;
  return block;
}

}  // namespace

KeyResult SklBbm92(const BlockStats& stats, const SecurityParams& sec) {
  sec.Validate();
  KeyResult result;
  result.analysis = "bbm92";
  const double eps_pe = sec.eps_sec / 2.0;
  const double eps_pa = sec.eps_sec / 2.0;
  result.epsilon_budget = {{"eps_sec", sec.eps_sec},
                           {"eps_cor", sec.eps_cor},
                           {"eps_pe", eps_pe},
                           {"eps_pa", eps_pa},
                           {"pa_penalty_bits", 2.0 * std::log2(1.0 / (2.0 * eps_pa))},
                           {"cor_penalty_bits", std::log2(2.0 / sec.eps_cor)}};
  const Bbm92Block block = PrepareBbm92(stats, result);
  if (!block.usable) return result;

  double phi = SamplingCorrection(block.key.n, block.test.n,
                                  std::min(block.test.qber(), 0.5), eps_pe);
  if (phi > 0.5) {
    Flag(result.diagnostics, "phase_error_clamped");
    phi = 0.5;
  }
  result.phase_error_upper = phi;
  result.lambda_ec_bits = EcLeakage(block.key.n, result.qber, sec);
  const long double value = static_cast<long double>(block.key.n) * (1.0L - EntropyLong(phi)) -
                            result.lambda_ec_bits - Log2(2.0L / sec.eps_cor) -
                            2.0L * Log2(1.0L / (2.0L * eps_pa));
  result.skl_real = static_cast<double>(value);
  result.skl_bits = FloorToBits(value, block.key.n);
  return result;
}

KeyResult SklBbm92Legacy(const BlockStats& stats, const SecurityParams& sec) {
  sec.Validate();
  KeyResult result;
  result.analysis = "bbm92_legacy";
  result.epsilon_budget = {
      {"eps_sec", sec.eps_sec},
      {"eps_cor", sec.eps_cor},
      {"penalty_bits", std::log2(2.0 / (sec.eps_sec * sec.eps_sec * sec.eps_cor))}};
  const Bbm92Block block = PrepareBbm92(stats, result);
  if (!block.usable) return result;

  const long double n = block.key.n;
  const long double k = block.test.n;
  const long double mu =
      std::sqrt((n + k) * (k + 1.0L) / (n * k * k) * std::log(2.0L / sec.eps_sec));
  long double phi = std::min(0.5L, static_cast<long double>(block.test.qber()) + mu);
  if (phi >= 0.5L) Flag(result.diagnostics, "phase_error_clamped");
  result.phase_error_upper = static_cast<double>(phi);
  result.lambda_ec_bits = static_cast<double>(sec.f_ec * n * EntropyLong(result.qber));
  const long double value = n * (1.0L - EntropyLong(phi)) - result.lambda_ec_bits -
                            Log2(2.0L / (static_cast<long double>(sec.eps_sec) *
                                         sec.eps_sec * sec.eps_cor));
  result.skl_real = static_cast<double>(value);
  result.skl_bits = FloorToBits(value, block.key.n);
  return result;
}

}  // namespace satqkd::finitekey
