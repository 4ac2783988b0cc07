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

// Composable finite-key secret key length.
//
// Statistical ingredients:
//   * multiplicative Chernoff bounds on the expectation of a sum of
//     independent Bernoulli variables, given one observation;
//   * an exact sampling-without-replacement bound: the test-basis error count
//     is inverted through the hypergeometric law to bound the error rate of
//     the unobserved key string;
//   * two-decoy (three-intensity, vacuum third) lower bounds on vacuum and
//     single-photon detections and an upper bound on single-photon phase
//     errors.
//
// Key-length expressions:
//   decoy BB84  l = s0 + s1 (1 - h(phi)) - leak_EC - 6 log2(21/eps_sec)
//                   - log2(2/eps_cor),
//               every concentration and sampling bound run at eps_sec/21;
//   BBM92       l = n_X (1 - h(phi)) - leak_EC - log2(2/eps_cor)
//                   - 2 log2(1/(2 eps_pa)),  eps_pe = eps_pa = eps_sec/2;
//   BBM92 legacy (Serfling correction)
//               l = n_X (1 - h(Q_Z + mu)) - f n_X h(Q_X)
//                   - log2(2/(eps_sec^2 eps_cor)),
//               mu = sqrt((n+k)(k+1)/(n k^2) ln(2/eps_sec)).
//
// Expected (real-valued) counts are accepted everywhere; the sampling bound
// rounds them to whole bits, rounding observed errors up.

#ifndef SATQKD_FINITE_KEY_H_
#define SATQKD_FINITE_KEY_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "satqkd/detection.h"

namespace satqkd::finitekey {

enum class LeakageModel { kEfficiencyFactor, kSyndromeSet };
enum class BoundDirection { kUpper, kLower };

std::string_view ToString(LeakageModel model);
LeakageModel LeakageModelFromString(std::string_view name);

struct SecurityParams {
  double eps_sec = 1e-10;
  double eps_cor = 1e-15;
  double f_ec = 1.18;
  LeakageModel leakage_model = LeakageModel::kEfficiencyFactor;
  // Decoding failure probability used by the syndrome-set estimate; falls
  // back to eps_cor.
  std::optional<double> syndrome_failure_prob;

  void Validate() const;
};

struct EpsilonTerm {
  std::string name;
  double value = 0.0;
};

struct KeyResult {
  std::int64_t skl_bits = 0;
  double skl_real = 0.0;  // key-length expression before flooring and clamping
  double raw_bits = 0.0;  // sifted key-basis block size
  double qber = 0.0;      // key-basis error rate
  double test_qber = 0.0;
  double phase_error_upper = 0.0;
  double lambda_ec_bits = 0.0;
  double s0_lower = 0.0;  // decoy only
  double s1_lower = 0.0;  // decoy only
  std::string analysis;   // "decoy_bb84", "bbm92" or "bbm92_legacy"
  std::optional<detect::ProtocolParams> params_used;
  std::vector<EpsilonTerm> epsilon_budget;
  std::vector<std::string> diagnostics;
};

// h(x) = -x log2 x - (1-x) log2(1-x); DomainError outside [0, 1].
double BinaryEntropy(double x);

// Bound on the expectation of a Bernoulli sum from one observation. The
// expectation lies above the upper bound (or below the lower bound) with
// probability at most `eps`.
double ChernoffBound(double observed, double eps, BoundDirection direction);

// Upper bound on the error rate of the key string, given `test_error_rate`
// observed on `n_test` bits sampled uniformly without replacement from the
// `n_key + n_test` total. Fails with probability at most `eps`.
double SamplingCorrection(double n_key, double n_test, double test_error_rate,
                          double eps);

// Hypergeometric lower-tail probability P[X <= x] for X the number of marked
// items in `draws` picked from `population` containing `marked`.
long double HypergeometricCdf(std::int64_t population, std::int64_t marked,
                              std::int64_t draws, std::int64_t x);

// Smallest x with P[Binomial(trials, p) <= x] >= q.
std::int64_t BinomialQuantile(std::int64_t trials, double p, double q);

struct DecoyBounds {
  double s0_lower = 0.0;       // key-basis vacuum detections
  double s1_lower = 0.0;       // key-basis single-photon detections
  double phi_upper = 0.0;      // single-photon phase error rate
  double s0_test_lower = 0.0;
  double s1_test_lower = 0.0;
  double v1_test_upper = 0.0;  // single-photon errors in the test basis
  std::vector<std::string> diagnostics;
};

// Two-decoy estimate; each of its Chernoff and sampling bounds runs at
// `eps`. Negative lower bounds are clamped to zero and flagged.
DecoyBounds DecoyYieldBounds(const detect::BlockStats& stats,
                             const detect::ProtocolParams& params, double eps);

// Information leaked during error correction, in bits.
double EcLeakage(double n, double qber, const SecurityParams& sec);

KeyResult SklDecoyBb84(const detect::BlockStats& stats,
                       const detect::ProtocolParams& params,
                       const SecurityParams& sec);

KeyResult SklBbm92(const detect::BlockStats& stats, const SecurityParams& sec);

KeyResult SklBbm92Legacy(const detect::BlockStats& stats, const SecurityParams& sec);

}  // namespace satqkd::finitekey

#endif  // SATQKD_FINITE_KEY_H_
