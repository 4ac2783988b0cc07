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

#include "satqkd/link_budget.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "satqkd/errors.h"

namespace satqkd::link {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double Airmass(const OpticalChain& chain, double elevation_deg) {
  if (!(elevation_deg > 0.0)) {
    throw DomainError("linkbudget",
                      fmt::format("elevation must be positive, got {}", elevation_deg));
  }
  const double capped = std::max(elevation_deg, chain.min_elevation_deg);
  return 1.0 / std::sin(capped * kDegToRad);
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    out.push_back(Trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double ParseNumber(std::string_view field, int line_no) {
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto result = std::from_chars(field.data(), end, value);
  if (result.ec != std::errc() || result.ptr != end) {
    throw ConfigError("linkbudget", fmt::format("curve line {}: bad number '{}'",
                                                line_no, field));
  }
  return value;
}

}  // namespace

std::string_view ToString(LinkDirection direction) {
  return direction == LinkDirection::kUplink ? "uplink" : "downlink";
}

LinkDirection LinkDirectionFromString(std::string_view name) {
  if (name == "uplink") return LinkDirection::kUplink;
  if (name == "downlink") return LinkDirection::kDownlink;
  throw ConfigError("linkbudget", fmt::format("unknown link direction '{}'", name));
}

void OpticalChain::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError("linkbudget", what);
  };
  require(tx_aperture_m > 0.0, "tx_aperture_m must be positive");
  require(rx_aperture_m > 0.0, "rx_aperture_m must be positive");
  require(wavelength_nm > 0.0, "wavelength_nm must be positive");
  require(pointing_jitter_urad >= 0.0, "pointing_jitter_urad must be >= 0");
  require(atm_zenith_db >= 0.0 && optics_db >= 0.0 && detector_db >= 0.0 &&
              calibration_db >= 0.0 && turbulence_penalty_db >= 0.0,
          "dB terms must be >= 0");
  require(min_elevation_deg > 0.0 && min_elevation_deg < 90.0,
          "min_elevation_deg must lie in (0, 90)");
  if (divergence_urad.has_value()) {
    require(*divergence_urad > 0.0, "divergence_urad must be positive");
    require(!waist_to_aperture_ratio.has_value(),
            "give either divergence_urad or waist_to_aperture_ratio, not both");
  } else {
    require(waist_to_aperture_ratio.has_value(),
            "beam spread needs divergence_urad or waist_to_aperture_ratio");
    require(*waist_to_aperture_ratio > 0.0, "waist_to_aperture_ratio must be positive");
    require(beam_quality_m2.value_or(1.0) >= 1.0, "beam_quality_m2 must be >= 1");
  }
}

LossProfile MakeLossProfile(std::vector<LossSample> samples) {
  LossProfile profile;
  profile.samples = std::move(samples);
  profile.zenith_loss_db = std::numeric_limits<double>::infinity();
  for (const auto& s : profile.samples) {
    profile.zenith_loss_db = std::min(profile.zenith_loss_db, s.loss_db);
  }
  if (profile.samples.empty()) profile.zenith_loss_db = 0.0;
  return profile;
}

EmpiricalCurve::EmpiricalCurve(std::vector<CurveKnot> knots)
    : knots_(std::move(knots)) {
  if (knots_.size() < 2) {
    throw ConfigError("linkbudget", "empirical curve needs at least two knots");
  }
  for (size_t i = 0; i < knots_.size(); ++i) {
    if (knots_[i].loss_db < 0.0) {
      throw ConfigError("linkbudget", "empirical curve loss must be >= 0");
    }
    if (i > 0 && !(knots_[i].elevation_deg > knots_[i - 1].elevation_deg)) {
      throw ConfigError("linkbudget",
                        "empirical curve elevations must be strictly increasing");
    }
  }
}

EmpiricalCurve EmpiricalCurve::FromCsv(std::string_view text) {
  std::vector<CurveKnot> knots;
  bool header_seen = false;
  bool has_background = false;
  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t nl = text.find('\n', pos);
    const std::string_view line =
        Trim(text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto fields = SplitCommas(line);
    if (!header_seen) {
      if (fields.size() < 2 || fields[0] != "elevation_deg" || fields[1] != "loss_db" ||
          (fields.size() == 3 && fields[2] != "background_cps") || fields.size() > 3) {
        throw ConfigError("linkbudget",
                          "curve header must be 'elevation_deg,loss_db[,background_cps]'");
      }
      has_background = fields.size() == 3;
      header_seen = true;
      continue;
    }
    if (fields.size() != (has_background ? 3u : 2u)) {
      throw ConfigError("linkbudget",
                        fmt::format("curve line {}: wrong column count", line_no));
    }
    CurveKnot knot;
    knot.elevation_deg = ParseNumber(fields[0], line_no);
    knot.loss_db = ParseNumber(fields[1], line_no);
    if (has_background) knot.background_cps = ParseNumber(fields[2], line_no);
    knots.push_back(knot);
  }
  if (!header_seen) throw ConfigError("linkbudget", "empty curve file");
  return EmpiricalCurve(std::move(knots));
}

EmpiricalCurve EmpiricalCurve::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("linkbudget", fmt::format("cannot open curve '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return FromCsv(buffer.str());
}

std::pair<size_t, double> EmpiricalCurve::Locate(double elevation_deg) const {
  if (knots_.empty()) throw ModelError("linkbudget", "empty empirical curve");
  if (elevation_deg < min_elevation_deg() || elevation_deg > max_elevation_deg()) {
    throw DomainError("linkbudget",
                      fmt::format("elevation {} outside curve range [{}, {}]",
                                  elevation_deg, min_elevation_deg(),
                                  max_elevation_deg()));
  }
  const auto upper = std::lower_bound(
      knots_.begin(), knots_.end(), elevation_deg,
      [](const CurveKnot& k, double el) { return k.elevation_deg < el; });
  if (upper == knots_.begin()) return {0, 0.0};
  const size_t hi = static_cast<size_t>(upper - knots_.begin());
  const auto& a = knots_[hi - 1];
  const auto& b = knots_[hi];
  return {hi - 1, (elevation_deg - a.elevation_deg) / (b.elevation_deg - a.elevation_deg)};
}

double EmpiricalCurve::LossDb(double elevation_deg) const {
  const auto [i, t] = Locate(elevation_deg);
  if (t == 0.0) return knots_[i].loss_db;
  return knots_[i].loss_db + t * (knots_[i + 1].loss_db - knots_[i].loss_db);
}

std::optional<double> EmpiricalCurve::BackgroundCps(double elevation_deg) const {
  const auto [i, t] = Locate(elevation_deg);
  if (!knots_[i].background_cps.has_value()) return std::nullopt;
  if (t == 0.0) return knots_[i].background_cps;
  return *knots_[i].background_cps +
         t * (*knots_[i + 1].background_cps - *knots_[i].background_cps);
}

double DivergenceUrad(const OpticalChain& chain) {
  if (chain.divergence_urad.has_value()) return *chain.divergence_urad;
  if (!chain.waist_to_aperture_ratio.has_value()) {
    throw ConfigError("linkbudget",
                      "beam spread needs divergence_urad or waist_to_aperture_ratio");
  }
  const double waist_m = *chain.waist_to_aperture_ratio * chain.tx_aperture_m / 2.0;
  const double theta_rad = chain.beam_quality_m2.value_or(1.0) *
                           chain.wavelength_nm * 1e-9 / (std::numbers::pi * waist_m);
  return theta_rad * 1e6;
}

double DiffractionLossDb(const OpticalChain& chain, double range_km) {
  if (!(range_km > 0.0)) {
    throw DomainError("linkbudget",
                      fmt::format("range must be positive, got {}", range_km));
  }
  const double beam_radius_m = DivergenceUrad(chain) * 1e-6 * range_km * 1e3;
  const double rx_radius_m = chain.rx_aperture_m / 2.0;
  const double x = 2.0 * rx_radius_m * rx_radius_m / (beam_radius_m * beam_radius_m);
  const double collected = std::min(1.0, -std::expm1(-x));
  return -10.0 * std::log10(collected);
}

double PointingLossDb(const OpticalChain& chain) {
  const double theta = DivergenceUrad(chain);
  const double sigma = chain.pointing_jitter_urad;
  if (sigma < 0.0 || !(theta > 0.0)) {
    throw DomainError("linkbudget", "pointing loss needs sigma >= 0 and theta > 0");
  }
  return 10.0 * std::log10((theta * theta + 4.0 * sigma * sigma) / (theta * theta));
}

double AtmosphericLossDb(const OpticalChain& chain, double elevation_deg) {
  return chain.atm_zenith_db * Airmass(chain, elevation_deg);
}

double TotalLossDb(const OpticalChain& chain, double elevation_deg,
                   double altitude_km) {
  const double range = orbit::SlantRangeKm(elevation_deg, altitude_km);
  double total = DiffractionLossDb(chain, range) + PointingLossDb(chain) +
                 AtmosphericLossDb(chain, elevation_deg) + chain.optics_db +
                 chain.detector_db + chain.calibration_db;
  if (chain.direction == LinkDirection::kUplink) {
    total += chain.turbulence_penalty_db * Airmass(chain, elevation_deg);
  }
  return total;
}

OpticalChain CalibrateToZenith(OpticalChain chain, double altitude_km,
                               double zenith_loss_db) {
  chain.calibration_db = 0.0;
  const double uncalibrated = TotalLossDb(chain, 90.0, altitude_km);
  const double offset = zenith_loss_db - uncalibrated;
  if (offset < -1e-9) {
    throw ConfigError("linkbudget",
                      fmt::format("chain already loses {:.3f} dB at zenith, above the "
                                  "{:.3f} dB set point",
                                  uncalibrated, zenith_loss_db));
  }
  chain.calibration_db = std::max(0.0, offset);
  return chain;
}

LossProfile LossProfileForPass(const OpticalChain& chain,
                               const orbit::PassGeometry& pass) {
  std::vector<LossSample> samples;
  samples.reserve(pass.samples.size());
  for (const auto& s : pass.samples) {
    samples.push_back({s.time_s, s.elevation_deg,
                       TotalLossDb(chain, s.elevation_deg, pass.altitude_km),
                       std::nullopt});
  }
  return MakeLossProfile(std::move(samples));
}

LossProfile ScaledEmpiricalProfile(const EmpiricalCurve& curve,
                                   double offset_db,
                                   const orbit::PassGeometry& pass) {
  std::vector<LossSample> samples;
  samples.reserve(pass.samples.size());
  for (const auto& s : pass.samples) {
    samples.push_back({s.time_s, s.elevation_deg,
                       curve.LossDb(s.elevation_deg) + offset_db,
                       curve.BackgroundCps(s.elevation_deg)});
  }
  return MakeLossProfile(std::move(samples));
}

LossProfile QuantizeProfile(const LossProfile& profile,
                            std::span<const double> attenuator_levels_db) {
  if (attenuator_levels_db.empty()) {
    throw DomainError("linkbudget", "attenuator level set is empty");
  }
  std::vector<double> levels(attenuator_levels_db.begin(), attenuator_levels_db.end());
  std::sort(levels.begin(), levels.end());
  std::vector<LossSample> samples = profile.samples;
  for (auto& s : samples) {
    const auto upper = std::lower_bound(levels.begin(), levels.end(), s.loss_db);
    if (upper == levels.begin()) {
      s.loss_db = levels.front();
    } else if (upper == levels.end()) {
      s.loss_db = levels.back();
    } else {
      const double below = *std::prev(upper);
      s.loss_db = (s.loss_db - below < *upper - s.loss_db) ? below : *upper;
    }
  }
  return MakeLossProfile(std::move(samples));
}

std::vector<std::pair<double, double>> ZenithLossVsAltitude(
    const OpticalChain& chain, std::span<const double> altitudes_km) {
  std::vector<std::pair<double, double>> out;
  out.reserve(altitudes_km.size());
  for (double h : altitudes_km) out.emplace_back(h, TotalLossDb(chain, 90.0, h));
  return out;
}

std::string LossProfileToCsv(const LossProfile& profile) {
  std::string out = "time_s,elevation_deg,loss_db\n";
  for (const auto& s : profile.samples) {
    out += fmt::format("{},{},{}\n", s.time_s, s.elevation_deg, s.loss_db);
  }
  return out;
}

}  // namespace satqkd::link
