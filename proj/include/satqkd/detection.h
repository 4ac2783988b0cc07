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

// Detection statistics: turns a loss profile and source/detector parameters
// into sifted and error counts for one transmission block.
//
// Two protocols are modelled. Decoy-state BB84 with weak coherent pulses
// uses the standard threshold-detector click model with an extraneous count
// probability per window. Entanglement-based BBM92 uses singles,
// true-coincidence and accidental-coincidence rates.
//
// Counts are expected values by default. In sampled mode each count cell is
// drawn from its Poisson law with a seeded generator, and the true numbers of
// vacuum and single-photon detections are tallied alongside.

#ifndef SATQKD_DETECTION_H_
#define SATQKD_DETECTION_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "satqkd/link_budget.h"

namespace satqkd::detect {

enum class Protocol { kDecoyBb84, kBbm92 };
enum class CountMode { kExpected, kSampled };

std::string_view ToString(Protocol protocol);
Protocol ProtocolFromString(std::string_view name);

struct ProtocolParams {
  Protocol protocol = Protocol::kDecoyBb84;

  // Decoy BB84: signal, decoy and vacuum intensities with mu3 = 0.
  std::array<double, 3> intensities = {0.5, 0.1, 0.0};
  std::array<double, 3> intensity_probs = {0.7, 0.2, 0.1};
  double basis_prob = 0.5;  // probability of the key (X) basis
  double source_rate_hz = 1e8;
  double p_ec = 0.0;        // extraneous count probability per window
  double qber_i = 0.0;      // intrinsic error rate
  double p_ap = 0.0;        // after-pulse probability

  // BBM92. The remote arm crosses the channel; the local arm stays with the
  // source.
  double coincidence_window_ns = 0.5;
  double detector_efficiency = 1.0;  // remote arm, on top of the link loss
  double local_efficiency = 1.0;     // local arm including its detectors
  double dark_cps = 0.0;             // per detector
  int detectors_per_side = 4;
  double background_cps = 0.0;       // remote receiver
  double dead_time_ns = 0.0;
  // Fraction of true coincidences that survive timing-jitter clipping.
  double coincidence_efficiency = 1.0;
  // Samples with visibility 1 - 2*QBER below this are dropped (0 disables).
  double visibility_cutoff = 0.0;

  void Validate() const;
};

struct CountCell {
  double n = 0.0;  // sifted detections
  double m = 0.0;  // errors among them

  double qber() const { return n > 0.0 ? m / n : 0.0; }
};

// True numbers of vacuum and single-photon detections in one basis.
struct PhotonTally {
  double vacuum = 0.0;
  double single = 0.0;
};

struct BlockStats {
  Protocol protocol = Protocol::kDecoyBb84;
  link::LinkDirection direction = link::LinkDirection::kDownlink;
  CountMode mode = CountMode::kExpected;
  // One cell per intensity for decoy BB84, a single cell for BBM92.
  std::vector<CountCell> key;   // X basis
  std::vector<CountCell> test;  // Z basis
  PhotonTally key_photons;
  PhotonTally test_photons;
  double total_pulses = 0.0;
  double elapsed_s = 0.0;
  int samples_used = 0;
  int samples_excluded = 0;
  std::vector<std::string> diagnostics;

  CountCell KeyTotal() const;
  CountCell TestTotal() const;

  // Multiplies every count by `factor` (block-size scaling studies).
  BlockStats Scaled(double factor) const;
  // Pools another block of the same protocol into this one.
  BlockStats& operator+=(const BlockStats& other);
};

// Probability that a pulse of mean photon number `mu` produces a click.
double WcpClickProb(double mu, double transmittance, double p_ec);

struct ErrorProb {
  double per_pulse = 0.0;       // error clicks per pulse
  double rate_in_clicks = 0.0;  // clamped to 1/2
  bool clamped = false;         // unclamped rate exceeded 1/2
};

ErrorProb WcpErrorProb(double mu, double transmittance, double p_ec, double qber_i);

BlockStats WcpBlockStats(const ProtocolParams& params,
                         const link::LossProfile& profile,
                         CountMode mode = CountMode::kExpected,
                         std::uint64_t seed = 0);

struct Bbm92Rates {
  double coincidences_cps = 0.0;
  double accidentals_cps = 0.0;
  double singles_signal_cps = 0.0;
  double singles_idler_cps = 0.0;
};

Bbm92Rates ComputeBbm92Rates(double pair_rate_cps, double eta_signal,
                             double eta_idler, double dark_cps,
                             double background_cps, double coincidence_window_ns);

// Error rate of the coincidences; accidentals are random. Throws ModelError
// when there are no coincidences at all.
double Bbm92Qber(double coincidences_cps, double accidentals_cps, double qber_i);

BlockStats Bbm92BlockStats(const ProtocolParams& params,
                           const link::LossProfile& profile,
                           link::LinkDirection direction,
                           CountMode mode = CountMode::kExpected,
                           std::uint64_t seed = 0);

}  // namespace satqkd::detect

#endif  // SATQKD_DETECTION_H_
