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

#include "satqkd/detection.h"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "satqkd/errors.h"

namespace satqkd::detect {
namespace {

constexpr int kPhotonClasses = 3;  // vacuum, single, multi

void Require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("detstats", what);
}

bool InOpenUnit(double p) { return p > 0.0 && p < 1.0; }

// Trapezoid weights: sample i stands for half the gap to each neighbour, so
// the weights sum to the profile's span.
std::vector<double> SampleWeights(const link::LossProfile& profile) {
  const auto& s = profile.samples;
  std::vector<double> w(s.size(), 0.0);
  for (size_t i = 0; i + 1 < s.size(); ++i) {
    const double gap = s[i + 1].time_s - s[i].time_s;
    w[i] += 0.5 * gap;
    w[i + 1] += 0.5 * gap;
  }
  return w;
}

double Span(const link::LossProfile& profile) {
  if (profile.samples.size() < 2) return 0.0;
  return profile.samples.back().time_s - profile.samples.front().time_s;
}

double DrawPoisson(std::mt19937_64& rng, double mean) {
  if (!(mean > 0.0)) return 0.0;
  std::poisson_distribution<long long> dist(mean);
  return static_cast<double>(dist(rng));
}

double DrawBinomial(std::mt19937_64& rng, double trials, double p) {
  if (!(trials > 0.0) || !(p > 0.0)) return 0.0;
  if (p >= 1.0) return trials;
  std::binomial_distribution<long long> dist(static_cast<long long>(trials), p);
  return static_cast<double>(dist(rng));
}

}  // namespace

std::string_view ToString(Protocol protocol) {
  return protocol == Protocol::kBbm92 ? "bbm92" : "decoy_bb84";
}

Protocol ProtocolFromString(std::string_view name) {
  if (name == "bbm92") return Protocol::kBbm92;
  if (name == "decoy_bb84") return Protocol::kDecoyBb84;
  throw ConfigError("detstats", fmt::format("unknown protocol '{}'", name));
}

void ProtocolParams::Validate() const {
  Require(source_rate_hz > 0.0, "source_rate_hz must be positive");
  Require(basis_prob > 0.0 && basis_prob <= 1.0, "basis_prob must lie in (0, 1]");
  Require(p_ec >= 0.0 && p_ec < 0.5, "p_ec must lie in [0, 0.5)");
  Require(qber_i >= 0.0 && qber_i < 0.5, "qber_i must lie in [0, 0.5)");
  Require(p_ap >= 0.0 && p_ap < 1.0, "p_ap must lie in [0, 1)");
  if (protocol == Protocol::kDecoyBb84) {
    const auto& mu = intensities;
    Require(mu[0] > mu[1] && mu[1] > mu[2] && mu[2] >= 0.0,
            "intensities must satisfy mu1 > mu2 > mu3 >= 0");
    Require(mu[0] > mu[1] + mu[2], "intensities must satisfy mu1 > mu2 + mu3");
    const auto& p = intensity_probs;
    Require(InOpenUnit(p[0]) && InOpenUnit(p[1]) && InOpenUnit(p[2]),
            "intensity probabilities must lie in (0, 1)");
    Require(std::abs(p[0] + p[1] + p[2] - 1.0) < 1e-9,
            "intensity probabilities must sum to 1");
  } else {
    Require(basis_prob == 0.5, "BBM92 uses unbiased basis choice (basis_prob = 0.5)");
    Require(coincidence_window_ns > 0.0, "coincidence_window_ns must be positive");
    Require(detector_efficiency > 0.0 && detector_efficiency <= 1.0,
            "detector_efficiency must lie in (0, 1]");
    Require(local_efficiency > 0.0 && local_efficiency <= 1.0,
            "local_efficiency must lie in (0, 1]");
    Require(coincidence_efficiency > 0.0 && coincidence_efficiency <= 1.0,
            "coincidence_efficiency must lie in (0, 1]");
    Require(dark_cps >= 0.0 && background_cps >= 0.0 && dead_time_ns >= 0.0,
            "dark_cps, background_cps and dead_time_ns must be >= 0");
    Require(detectors_per_side >= 1, "detectors_per_side must be >= 1");
    Require(visibility_cutoff >= 0.0 && visibility_cutoff < 1.0,
            "visibility_cutoff must lie in [0, 1)");
  }
}

CountCell BlockStats::KeyTotal() const {
  CountCell total;
  for (const auto& c : key) {
    total.n += c.n;
    total.m += c.m;
  }
  return total;
}

CountCell BlockStats::TestTotal() const {
  CountCell total;
  for (const auto& c : test) {
    total.n += c.n;
    total.m += c.m;
  }
  return total;
}

BlockStats BlockStats::Scaled(double factor) const {
  BlockStats out = *this;
  for (auto* cells : {&out.key, &out.test}) {
    for (auto& c : *cells) {
      c.n *= factor;
      c.m *= factor;
    }
  }
  out.key_photons.vacuum *= factor;
  out.key_photons.single *= factor;
  out.test_photons.vacuum *= factor;
  out.test_photons.single *= factor;
  out.total_pulses *= factor;
  out.elapsed_s *= factor;
  return out;
}

BlockStats& BlockStats::operator+=(const BlockStats& other) {
  if (key.empty() && test.empty()) {
    const auto diagnostics_before = diagnostics;
    *this = other;
    diagnostics.insert(diagnostics.begin(), diagnostics_before.begin(),
                       diagnostics_before.end());
    return *this;
  }
  if (other.protocol != protocol || other.key.size() != key.size()) {
    throw ModelError("detstats", "cannot pool blocks of different protocols");
  }
  for (size_t i = 0; i < key.size(); ++i) {
    key[i].n += other.key[i].n;
    key[i].m += other.key[i].m;
    test[i].n += other.test[i].n;
    test[i].m += other.test[i].m;
  }
  key_photons.vacuum += other.key_photons.vacuum;
  key_photons.single += other.key_photons.single;
  test_photons.vacuum += other.test_photons.vacuum;
  test_photons.single += other.test_photons.single;
  total_pulses += other.total_pulses;
  elapsed_s += other.elapsed_s;
  samples_used += other.samples_used;
  samples_excluded += other.samples_excluded;
  for (const auto& d : other.diagnostics) {
    if (std::find(diagnostics.begin(), diagnostics.end(), d) == diagnostics.end()) {
      diagnostics.push_back(d);
    }
  }
  return *this;
}

double WcpClickProb(double mu, double transmittance, double p_ec) {
  return 1.0 - (1.0 - 2.0 * p_ec) * std::exp(-transmittance * mu);
}

ErrorProb WcpErrorProb(double mu, double transmittance, double p_ec, double qber_i) {
  ErrorProb out;
  out.per_pulse = p_ec - qber_i * std::expm1(-transmittance * mu);
  const double clicks = WcpClickProb(mu, transmittance, p_ec);
  const double rate = clicks > 0.0 ? out.per_pulse / clicks : 0.5;
  out.clamped = rate > 0.5;
  out.rate_in_clicks = std::min(rate, 0.5);
  return out;
}

BlockStats WcpBlockStats(const ProtocolParams& params,
                         const link::LossProfile& profile, CountMode mode,
                         std::uint64_t seed) {
  params.Validate();
  if (params.protocol != Protocol::kDecoyBb84) {
    throw ConfigError("detstats", "WcpBlockStats needs the decoy_bb84 protocol");
  }
  if (profile.empty()) throw ModelError("detstats", "empty loss profile");

  const auto weights = SampleWeights(profile);
  // Expected clicks and errors per intensity and photon-number class, before
  // sifting.
  long double clicks[3][kPhotonClasses] = {};
  long double errors[3][kPhotonClasses] = {};
  bool clamped = false;

  for (size_t i = 0; i < profile.samples.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    const double eta = link::DbToTransmittance(profile.samples[i].loss_db);
    const double pulses = params.source_rate_hz * weights[i];
    for (int k = 0; k < 3; ++k) {
      const double mu = params.intensities[k];
      const double p0 = std::exp(-mu);
      const double p1 = mu * p0;
      const double total_click = WcpClickProb(mu, eta, params.p_ec);
      const ErrorProb err = WcpErrorProb(mu, eta, params.p_ec, params.qber_i);
      clamped = clamped || err.clamped;
      const double class_click[kPhotonClasses] = {
          p0 * 2.0 * params.p_ec,
          p1 * (1.0 - (1.0 - 2.0 * params.p_ec) * (1.0 - eta)),
          0.0};
      const double class_err[kPhotonClasses] = {
          p0 * params.p_ec, p1 * (params.p_ec + params.qber_i * eta), 0.0};
      double multi_click = std::max(0.0, total_click - class_click[0] - class_click[1]);
      double multi_err = std::max(0.0, err.per_pulse - class_err[0] - class_err[1]);
      const double scale = pulses * params.intensity_probs[k];
      for (int j = 0; j < kPhotonClasses; ++j) {
        double c = j == 2 ? multi_click : class_click[j];
        double e = j == 2 ? multi_err : class_err[j];
        // After-pulses follow the triggering click and are random bits.
        e += 0.5 * params.p_ap * c;
        c *= 1.0 + params.p_ap;
        clicks[k][j] += scale * c;
        errors[k][j] += scale * e;
      }
    }
  }

  BlockStats stats;
  stats.protocol = Protocol::kDecoyBb84;
  stats.mode = mode;
  stats.key.assign(3, {});
  stats.test.assign(3, {});
  stats.elapsed_s = Span(profile);
  stats.total_pulses = params.source_rate_hz * stats.elapsed_s;
  stats.samples_used = static_cast<int>(profile.samples.size());
  if (clamped) stats.diagnostics.push_back("qber_clamped");

  const double px = params.basis_prob;
  const double sift[2] = {px * px, (1.0 - px) * (1.0 - px)};
  std::mt19937_64 rng(seed);
  for (int b = 0; b < 2; ++b) {
    auto& cells = b == 0 ? stats.key : stats.test;
    auto& tally = b == 0 ? stats.key_photons : stats.test_photons;
    for (int k = 0; k < 3; ++k) {
      for (int j = 0; j < kPhotonClasses; ++j) {
        const double mean_n = static_cast<double>(sift[b] * clicks[k][j]);
        const double mean_m = static_cast<double>(sift[b] * errors[k][j]);
        double n = mean_n;
        double m = mean_m;
        if (mode == CountMode::kSampled) {
          n = DrawPoisson(rng, mean_n);
          m = DrawBinomial(rng, n, mean_n > 0.0 ? mean_m / mean_n : 0.0);
        }
        cells[k].n += n;
        cells[k].m += m;
        if (j == 0) tally.vacuum += n;
        if (j == 1) tally.single += n;
      }
    }
  }
  return stats;
}

Bbm92Rates ComputeBbm92Rates(double pair_rate_cps, double eta_signal,
                             double eta_idler, double dark_cps,
                             double background_cps, double coincidence_window_ns) {
  if (pair_rate_cps < 0.0 || eta_signal < 0.0 || eta_idler < 0.0 || dark_cps < 0.0 ||
      background_cps < 0.0 || !(coincidence_window_ns > 0.0)) {
    throw DomainError("detstats", "BBM92 rates need non-negative inputs and a window > 0");
  }
  Bbm92Rates r;
  r.coincidences_cps = pair_rate_cps * eta_signal * eta_idler;
  r.singles_signal_cps = pair_rate_cps * eta_signal + dark_cps + background_cps;
  r.singles_idler_cps = pair_rate_cps * eta_idler + dark_cps + background_cps;
  r.accidentals_cps =
      r.singles_signal_cps * r.singles_idler_cps * coincidence_window_ns * 1e-9;
  return r;
}

double Bbm92Qber(double coincidences_cps, double accidentals_cps, double qber_i) {
  const double total = coincidences_cps + accidentals_cps;
  if (!(total > 0.0)) {
    throw ModelError("detstats", "QBER undefined without coincidences");
  }
  return (qber_i * coincidences_cps + 0.5 * accidentals_cps) / total;
}

BlockStats Bbm92BlockStats(const ProtocolParams& params,
                           const link::LossProfile& profile,
                           link::LinkDirection direction, CountMode mode,
                           std::uint64_t seed) {
  params.Validate();
  if (params.protocol != Protocol::kBbm92) {
    throw ConfigError("detstats", "Bbm92BlockStats needs the bbm92 protocol");
  }
  if (profile.empty()) throw ModelError("detstats", "empty loss profile");

  const auto weights = SampleWeights(profile);
  const double detectors = params.detectors_per_side;
  const double dark_total = params.dark_cps * detectors;
  const double dead_time_s = params.dead_time_ns * 1e-9;
  const double window_s = params.coincidence_window_ns * 1e-9;
  // Rate-dependent dead-time derating of one arm.
  auto derate = [&](double singles) {
    return 1.0 / (1.0 + singles / detectors * dead_time_s);
  };

  long double coincidences = 0.0L;
  long double errors = 0.0L;
  BlockStats stats;
  stats.protocol = Protocol::kBbm92;
  stats.direction = direction;
  stats.mode = mode;
  stats.key.assign(1, {});
  stats.test.assign(1, {});
  stats.elapsed_s = Span(profile);
  stats.total_pulses = params.source_rate_hz * stats.elapsed_s;

  for (size_t i = 0; i < profile.samples.size(); ++i) {
    const auto& sample = profile.samples[i];
    const double eta_remote =
        link::DbToTransmittance(sample.loss_db) * params.detector_efficiency;
    const double eta_local = params.local_efficiency;
    const double background = sample.background_cps.value_or(params.background_cps);

    const double local_raw =
        (params.source_rate_hz * eta_local + dark_total) * (1.0 + params.p_ap);
    const double remote_raw =
        (params.source_rate_hz * eta_remote + dark_total + background) *
        (1.0 + params.p_ap);
    const double d_local = derate(local_raw);
    const double d_remote = derate(remote_raw);
    const double c = params.source_rate_hz * eta_local * eta_remote * d_local *
                     d_remote * params.coincidence_efficiency;
    const double a = local_raw * d_local * remote_raw * d_remote * window_s;
    if (!(c + a > 0.0)) continue;
    const double qber = Bbm92Qber(c, a, params.qber_i);
    if (params.visibility_cutoff > 0.0 && 1.0 - 2.0 * qber < params.visibility_cutoff) {
      ++stats.samples_excluded;
      continue;
    }
    ++stats.samples_used;
    coincidences += static_cast<long double>((c + a) * weights[i]);
    errors += static_cast<long double>(qber * (c + a) * weights[i]);
  }

  const double px = params.basis_prob;
  const double sift[2] = {px * px, (1.0 - px) * (1.0 - px)};
  std::mt19937_64 rng(seed);
  for (int b = 0; b < 2; ++b) {
    auto& cell = b == 0 ? stats.key[0] : stats.test[0];
    const double mean_n = static_cast<double>(sift[b] * coincidences);
    const double mean_m = static_cast<double>(sift[b] * errors);
    cell.n = mean_n;
    cell.m = mean_m;
    if (mode == CountMode::kSampled) {
      cell.n = DrawPoisson(rng, mean_n);
      cell.m = DrawBinomial(rng, cell.n, mean_n > 0.0 ? mean_m / mean_n : 0.0);
    }
  }
  return stats;
}

}  // namespace satqkd::detect
