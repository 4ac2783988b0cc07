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

#include "satqkd/missions.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "satqkd/errors.h"

namespace satqkd::missions {
namespace {

using detect::BlockStats;
using finitekey::KeyResult;
using nlohmann::json;

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kSecondsPerDay = 86400.0;
constexpr double kStationaryStepS = 60.0;

std::vector<double> SortedUnique(std::vector<double> values, const char* what) {
  if (values.empty()) throw DomainError("missions", fmt::format("{} list is empty", what));
  for (const double v : values) {
    if (!std::isfinite(v)) throw DomainError("missions", fmt::format("non-finite {}", what));
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

// Re-raises an error with the mission and pass in the message, keeping the
// error category.
template <typename Fn>
auto InMissionContext(const MissionConfig& config, double elevation, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError("missions", fmt::format("{} at {} deg: {}", config.name, elevation,
                                              e.what()));
  } catch (const DomainError& e) {
    throw DomainError("missions", fmt::format("{} at {} deg: {}", config.name, elevation,
                                              e.what()));
  } catch (const Error& e) {
    throw ModelError("missions", fmt::format("{} at {} deg: {}", config.name, elevation,
                                             e.what()));
  }
}

optimize::Objective MissionObjective(const MissionConfig& config) {
  const bool legacy = config.analysis == Analysis::kLegacy;
  return optimize::MakeObjective(config.chain.direction,
                                 legacy ? config.legacy_security : config.security, legacy);
}

BlockStats MissionStats(const MissionConfig& config, const detect::ProtocolParams& params,
                        const link::LossProfile& profile, std::uint64_t seed) {
  if (params.protocol == detect::Protocol::kDecoyBb84) {
    return detect::WcpBlockStats(params, profile, config.count_mode, seed);
  }
  return detect::Bbm92BlockStats(params, profile, config.chain.direction, config.count_mode,
                                 seed);
}

KeyResult MissionKey(const MissionConfig& config, const detect::ProtocolParams& params,
                     const BlockStats& stats) {
  if (params.protocol == detect::Protocol::kDecoyBb84) {
    return finitekey::SklDecoyBb84(stats, params, config.security);
  }
  KeyResult key = config.analysis == Analysis::kLegacy
                      ? finitekey::SklBbm92Legacy(stats, config.legacy_security)
                      : finitekey::SklBbm92(stats, config.security);
  key.params_used = params;
  return key;
}

orbit::PassGeometry ClipAroundPeak(const orbit::PassGeometry& pass, double duration_s) {
  if (pass.empty() || pass.duration_s() <= duration_s) return pass;
  const auto peak = std::max_element(
      pass.samples.begin(), pass.samples.end(),
      [](const auto& a, const auto& b) { return a.elevation_deg < b.elevation_deg; });
  const double centre = peak->time_s;
  orbit::PassGeometry out;
  out.altitude_km = pass.altitude_km;
  out.max_elevation_deg = pass.max_elevation_deg;
  for (const auto& s : pass.samples) {
    if (std::abs(s.time_s - centre) <= 0.5 * duration_s) out.samples.push_back(s);
  }
  return out;
}

std::vector<std::pair<std::string, double>> PassValues(const PassOutcome& o) {
  const auto& k = o.key;
  return {{"skl_bits", static_cast<double>(k.skl_bits)},
          {"skl_real", k.skl_real},
          {"raw_bits", k.raw_bits},
          {"qber", k.qber},
          {"test_qber", k.test_qber},
          {"phase_error_upper", k.phase_error_upper},
          {"lambda_ec_bits", k.lambda_ec_bits},
          {"s0_lower", k.s0_lower},
          {"s1_lower", k.s1_lower},
          {"window_threshold_deg", o.window.threshold_deg},
          {"window_fraction", o.window.fraction},
          {"elapsed_s", o.stats.elapsed_s}};
}

Provenance MakeProvenance(const MissionConfig& config, std::uint64_t seed) {
  return {config.name, ConfigHash(config), seed, kToolVersion, ""};
}

std::string FormatNumber(double value) { return fmt::format("{}", value); }

}  // namespace

bool IsGeostationary(double altitude_km) {
  return std::abs(altitude_km - orbit::kGeostationaryAltitudeKm) < 1.0;
}

std::string AltitudeBand(double altitude_km) {
  if (IsGeostationary(altitude_km)) return "GEO";
  if (altitude_km < 450.0) return "VLEO";
  if (altitude_km < 2000.0) return "LEO";
  if (altitude_km < 20000.0) return "MEO";
  return "HEO";
}

link::OpticalChain CalibratedChain(const MissionConfig& config) {
  if (!config.loss.zenith_loss_db.has_value()) return config.chain;
  return link::CalibrateToZenith(config.chain, config.altitude_km, *config.loss.zenith_loss_db);
}

orbit::PassGeometry MissionPass(const MissionConfig& config, double max_elevation_deg) {
  const double night_s = config.schedule.night_hours * 3600.0;
  if (max_elevation_deg < config.min_elevation_deg) {
    orbit::PassGeometry empty;
    empty.altitude_km = config.altitude_km;
    empty.max_elevation_deg = max_elevation_deg;
    return empty;
  }
  if (IsGeostationary(config.altitude_km)) {
    return orbit::StationaryPass(config.altitude_km, max_elevation_deg, night_s,
                                 std::max(config.time_step_s, kStationaryStepS));
  }
  const auto full = orbit::PassProfile(config.altitude_km, max_elevation_deg,
                                       config.time_step_s);
  return ClipAroundPeak(orbit::VisibleWindow(full, config.min_elevation_deg), night_s);
}

link::LossProfile MissionProfile(const MissionConfig& config, const orbit::PassGeometry& pass,
                                 double extra_offset_db) {
  link::LossProfile profile;
  if (config.loss.mode == LossMode::kEmpirical) {
    const auto curve = link::EmpiricalCurve::Load(config.CurvePath());
    profile = link::ScaledEmpiricalProfile(curve, config.loss.offset_db + extra_offset_db, pass);
  } else {
    profile = link::LossProfileForPass(CalibratedChain(config), pass);
    for (auto& s : profile.samples) s.loss_db += config.loss.offset_db + extra_offset_db;
    profile = link::MakeLossProfile(std::move(profile.samples));
  }
  if (!config.loss.attenuator_levels_db.empty()) {
    profile = link::QuantizeProfile(profile, config.loss.attenuator_levels_db);
  }
  return profile;
}

PassOutcome RunPassDetailed(const MissionConfig& config, double max_elevation_deg,
                            double extra_offset_db, std::uint64_t seed,
                            const FixedChoice* fixed) {
  return InMissionContext(config, max_elevation_deg, [&] {
    PassOutcome out;
    out.max_elevation_deg = max_elevation_deg;
    out.extra_offset_db = extra_offset_db;
    out.key.analysis = config.analysis == Analysis::kLegacy ? "bbm92_legacy"
                       : config.params.protocol == detect::Protocol::kBbm92 ? "bbm92"
                                                                            : "decoy_bb84";
    out.key.params_used = config.params;
    out.stats.protocol = config.params.protocol;
    out.stats.direction = config.chain.direction;
    out.stats.mode = config.count_mode;
    const size_t cells = config.params.protocol == detect::Protocol::kDecoyBb84 ? 3 : 1;
    out.stats.key.assign(cells, {});
    out.stats.test.assign(cells, {});

    const auto pass = MissionPass(config, max_elevation_deg);
    if (pass.samples.size() < 2) {
      out.key.diagnostics.push_back("below_horizon_mask");
      out.window.fraction = 0.0;
      return out;
    }
    auto profile = MissionProfile(config, pass, extra_offset_db);
    detect::ProtocolParams params = config.params;

    if (fixed != nullptr) {
      params = fixed->params;
      profile = optimize::CutByFraction(profile, fixed->window_fraction, &out.window);
    } else if (config.optimize.enabled) {
      optimize::OptimizationResult best;
      try {
        best = optimize::OptimizeSkl(profile, params, MissionObjective(config),
                                     config.optimize.spec);
      } catch (const optimize::NoPositiveKeyError& e) {
        // No window gives a key; report the whole pass at the template.
        best = e.partial();
        best.best_params = params;
        best.best_window.threshold_deg = profile.samples.front().elevation_deg;
        for (const auto& s : profile.samples) {
          best.best_window.threshold_deg = std::min(best.best_window.threshold_deg, s.elevation_deg);
        }
      }
      params = best.best_params;
      out.evaluations = best.evaluations;
      out.trace = std::move(best.trace);
      profile = optimize::CutByThreshold(profile, best.best_window.threshold_deg, &out.window);
    } else {
      profile = optimize::CutByFraction(profile, 1.0, &out.window);
    }

    out.stats = MissionStats(config, params, profile, seed);
    out.key = MissionKey(config, params, out.stats);
    return out;
  });
}

KeyResult RunPass(const MissionConfig& config, double max_elevation_deg,
                  double extra_offset_db, std::uint64_t seed) {
  return RunPassDetailed(config, max_elevation_deg, extra_offset_db, seed).key;
}

FixedChoice ReferenceChoice(const MissionConfig& config) {
  const double elevation = config.optimize.reference_elevation_deg;
  return InMissionContext(config, elevation, [&] {
    const auto pass = MissionPass(config, elevation);
    const auto profile = MissionProfile(config, pass);
    optimize::OptimizationResult best;
    try {
      best = optimize::OptimizeSkl(profile, config.params, MissionObjective(config),
                                   config.optimize.spec);
    } catch (const optimize::NoPositiveKeyError& e) {
      best = e.partial();
    }
    return FixedChoice{best.best_params, best.best_window.fraction};
  });
}

std::vector<double> StudyResult::Column(const std::string& name) const {
  std::vector<double> out;
  out.reserve(records.size());
  for (size_t i = 0; i < records.size(); ++i) out.push_back(Value(i, name));
  return out;
}

double StudyResult::Value(size_t record, const std::string& name) const {
  const auto& r = records.at(record);
  for (size_t a = 0; a < axis_names.size(); ++a) {
    if (axis_names[a] == name) return r.axis[a];
  }
  for (const auto& [key, value] : r.values) {
    if (key == name) return value;
  }
  throw DomainError("missions", fmt::format("study has no column '{}'", name));
}

std::uint64_t PointSeed(std::uint64_t master_seed, std::uint64_t index) {
  // SplitMix64 finalizer over the pair.
  std::uint64_t z = master_seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

StudyResult PassStudy(const MissionConfig& config, double max_elevation_deg,
                      std::uint64_t seed) {
  StudyResult study;
  study.kind = "pass";
  study.provenance = MakeProvenance(config, seed);
  study.axis_names = {"max_elevation_deg"};
  const auto outcome = RunPassDetailed(config, max_elevation_deg, 0.0, PointSeed(seed, 0));
  study.records.push_back({{max_elevation_deg}, "", PassValues(outcome), outcome.key});
  return study;
}

StudyResult ElevationSweep(const MissionConfig& config, std::vector<double> elevations_deg,
                           std::vector<double> extra_losses_db, std::uint64_t seed) {
  elevations_deg = SortedUnique(std::move(elevations_deg), "elevation");
  extra_losses_db = SortedUnique(std::move(extra_losses_db), "loss offset");
  std::optional<FixedChoice> fixed;
  if (config.optimize.enabled && !config.optimize.per_pass) fixed = ReferenceChoice(config);

  StudyResult study;
  study.kind = "sweep";
  study.provenance = MakeProvenance(config, seed);
  study.axis_names = {"offset_db", "max_elevation_deg"};
  std::uint64_t index = 0;
  for (const double offset : extra_losses_db) {
    for (const double elevation : elevations_deg) {
      const auto outcome = RunPassDetailed(config, elevation, offset, PointSeed(seed, index++),
                                           fixed ? &*fixed : nullptr);
      study.records.push_back({{offset, elevation}, "", PassValues(outcome), outcome.key});
    }
  }
  return study;
}

std::optional<double> ZeroKeyCutoff(const StudyResult& sweep, double offset_db) {
  std::optional<double> lowest;
  for (size_t i = 0; i < sweep.records.size(); ++i) {
    const auto& r = sweep.records[i];
    if (r.axis[0] != offset_db || sweep.Value(i, "skl_bits") <= 0.0) continue;
    if (!lowest || r.axis[1] < *lowest) lowest = r.axis[1];
  }
  return lowest;
}

std::optional<double> ZeroKeyThreshold(const MissionConfig& config, double offset_db,
                                       double tolerance_deg) {
  auto positive = [&](double elevation) {
    return RunPassDetailed(config, elevation, offset_db).key.skl_bits > 0;
  };
  if (!positive(90.0)) return std::nullopt;
  double lo = config.min_elevation_deg;
  double hi = 90.0;
  if (positive(lo)) return lo;
  while (hi - lo > tolerance_deg) {
    const double mid = 0.5 * (lo + hi);
    (positive(mid) ? hi : lo) = mid;
  }
  return hi;
}

StudyResult AltitudeStudy(const MissionConfig& config, std::vector<double> altitudes_km) {
  altitudes_km.push_back(kRepresentativeMeoAltitudeKm);
  altitudes_km.push_back(orbit::kGeostationaryAltitudeKm);
  altitudes_km = SortedUnique(std::move(altitudes_km), "altitude");
  if (altitudes_km.front() < 200.0) {
    throw DomainError("missions", "altitudes must be >= 200 km");
  }
  const auto chain = CalibratedChain(config);
  StudyResult study;
  study.kind = "altitude";
  study.provenance = MakeProvenance(config, 0);
  study.axis_names = {"altitude_km"};
  for (const double h : altitudes_km) {
    const double range = orbit::SlantRangeKm(90.0, h);
    study.records.push_back(
        {{h},
         AltitudeBand(h),
         {{"zenith_loss_db", link::TotalLossDb(chain, 90.0, h)},
          {"diffraction_db", link::DiffractionLossDb(chain, range)},
          {"slant_range_km", range},
          {"meo_marker", h == kRepresentativeMeoAltitudeKm ? 1.0 : 0.0}},
         std::nullopt});
  }
  return study;
}

StudyResult TradeoffMap(const MissionConfig& config, std::vector<double> apertures_m,
                        std::vector<double> pointing_errors_urad,
                        std::vector<double> altitudes_km) {
  apertures_m = SortedUnique(std::move(apertures_m), "aperture");
  pointing_errors_urad = SortedUnique(std::move(pointing_errors_urad), "pointing error");
  altitudes_km = SortedUnique(std::move(altitudes_km), "altitude");
  if (apertures_m.front() <= 0.0 || pointing_errors_urad.front() < 0.0) {
    throw DomainError("missions", "apertures must be > 0 and pointing errors >= 0");
  }
  const auto base = CalibratedChain(config);
  StudyResult study;
  study.kind = "tradeoff";
  study.provenance = MakeProvenance(config, 0);
  study.axis_names = {"altitude_km", "tx_aperture_m", "pointing_error_urad"};
  for (const double h : altitudes_km) {
    for (const double aperture : apertures_m) {
      for (const double pointing : pointing_errors_urad) {
        link::OpticalChain chain = base;
        chain.tx_aperture_m = aperture;
        chain.pointing_jitter_urad = pointing;
        if (base.divergence_urad.has_value()) {
          chain.divergence_urad = *base.divergence_urad * base.tx_aperture_m / aperture;
        }
        study.records.push_back({{h, aperture, pointing},
                                 AltitudeBand(h),
                                 {{"gain_db", -link::TotalLossDb(chain, 90.0, h)}},
                                 std::nullopt});
      }
    }
  }
  return study;
}

double MeanPassesPerDay(double altitude_km, LatitudeMode mode) {
  if (IsGeostationary(altitude_km)) return 1.0;
  const double period_s = 2.0 * std::numbers::pi / orbit::OrbitalRateRadPerS(altitude_km);
  const double revolutions = kSecondsPerDay / period_s;
  // Largest cross-track offset that still clears the horizon.
  const double reach = std::acos(orbit::kEarthRadiusKm / (orbit::kEarthRadiusKm + altitude_km));
  double latitude_factor = 1.0;
  if (mode == LatitudeMode::kMidLatitude) latitude_factor = 1.0 / std::cos(45.0 * kDegToRad);
  if (mode == LatitudeMode::kHighLatitude) latitude_factor = 2.0;
  return revolutions * 2.0 * (2.0 * reach) / (2.0 * std::numbers::pi) * latitude_factor;
}

std::vector<ScheduledPass> PassSchedule(double altitude_km, const ScheduleConfig& schedule,
                                        std::uint64_t seed) {
  if (!(altitude_km >= 100.0) || schedule.days < 1) {
    throw DomainError("missions", "pass schedule needs altitude >= 100 km and days >= 1");
  }
  std::vector<ScheduledPass> out;
  if (IsGeostationary(altitude_km)) {
    for (int day = 0; day < schedule.days; ++day) out.push_back({day, 90.0});
    return out;
  }
  const double nightly =
      MeanPassesPerDay(altitude_km, schedule.latitude_mode) * schedule.night_fraction;
  const double reach = std::acos(orbit::kEarthRadiusKm / (orbit::kEarthRadiusKm + altitude_km));
  std::mt19937_64 rng(seed);
  std::poisson_distribution<int> count(nightly);
  std::uniform_real_distribution<double> offset(0.0, reach);
  for (int day = 0; day < schedule.days; ++day) {
    const int passes = count(rng);
    std::vector<double> elevations;
    for (int i = 0; i < passes; ++i) {
      elevations.push_back(orbit::ElevationFromCentralAngleDeg(offset(rng), altitude_km));
    }
    for (const double el : elevations) out.push_back({day, std::clamp(el, 0.0, 90.0)});
  }
  return out;
}

AccumulationResult AccumulateYear(const MissionConfig& config,
                                  std::span<const ScheduledPass> schedule, double qber_cutoff,
                                  std::uint64_t seed) {
  if (schedule.empty()) throw DomainError("missions", "pass schedule is empty");
  if (!(qber_cutoff > 0.0 && qber_cutoff < 0.5)) {
    throw DomainError("missions", "QBER cutoff must lie in (0, 1/2)");
  }
  AccumulationResult out;
  out.altitude_km = config.altitude_km;
  out.passes = static_cast<int>(schedule.size());
  BlockStats pooled;
  bool any = false;
  std::vector<double> pass_raw;
  for (size_t i = 0; i < schedule.size(); ++i) {
    const auto outcome = RunPassDetailed(config, schedule[i].max_elevation_deg, 0.0,
                                         PointSeed(seed, i));
    const auto key = outcome.stats.KeyTotal();
    if (!(key.n > 0.0)) {
      ++out.passes_empty;
      continue;
    }
    pass_raw.push_back(key.n);
    if (key.qber() > qber_cutoff) {
      ++out.passes_over_cutoff;
      continue;
    }
    ++out.passes_used;
    out.skl_bits_per_pass += outcome.key.skl_bits;
    if (!any) {
      pooled = outcome.stats;
      any = true;
    } else {
      pooled += outcome.stats;
    }
  }
  if (!pass_raw.empty()) {
    std::sort(pass_raw.begin(), pass_raw.end());
    const size_t mid = pass_raw.size() / 2;
    out.median_pass_raw_bits = pass_raw.size() % 2 == 1
                                   ? pass_raw[mid]
                                   : 0.5 * (pass_raw[mid - 1] + pass_raw[mid]);
  }
  if (!any) return out;
  out.raw_bits = pooled.KeyTotal().n;
  out.mean_qber = pooled.KeyTotal().qber();
  out.pooled_key = InMissionContext(config, 0.0, [&] {
    return MissionKey(config, config.params, pooled);
  });
  out.skl_bits = out.pooled_key.skl_bits;
  return out;
}

StudyResult AccumulationStudy(const MissionConfig& config, std::vector<double> altitudes_km,
                              double qber_cutoff, std::uint64_t seed) {
  altitudes_km = SortedUnique(std::move(altitudes_km), "altitude");
  StudyResult study;
  study.kind = "accumulate";
  study.provenance = MakeProvenance(config, seed);
  study.axis_names = {"altitude_km"};
  for (size_t i = 0; i < altitudes_km.size(); ++i) {
    MissionConfig at = config;
    at.altitude_km = altitudes_km[i];
    const std::uint64_t point_seed = PointSeed(seed, i);
    const auto schedule = PassSchedule(at.altitude_km, at.schedule, point_seed);
    const auto r = AccumulateYear(at, schedule, qber_cutoff, PointSeed(point_seed, 1));
    study.records.push_back(
        {{at.altitude_km},
         AltitudeBand(at.altitude_km),
         {{"passes", static_cast<double>(r.passes)},
          {"passes_used", static_cast<double>(r.passes_used)},
          {"passes_over_cutoff", static_cast<double>(r.passes_over_cutoff)},
          {"passes_empty", static_cast<double>(r.passes_empty)},
          {"raw_bits", r.raw_bits},
          {"mean_qber", r.mean_qber},
          {"skl_bits", static_cast<double>(r.skl_bits)},
          {"skl_bits_per_pass_sum", static_cast<double>(r.skl_bits_per_pass)},
          {"median_pass_raw_bits", r.median_pass_raw_bits}},
         r.pooled_key});
  }
  return study;
}

std::string StudyToCsv(const StudyResult& study) {
  const auto& p = study.provenance;
  std::string out = fmt::format(
      "# satqkd study: {}\n# mission: {}\n# config_hash: {}\n# seed: {}\n# version: {}\n"
      "# command: {}\n",
      study.kind, p.mission, p.config_hash, p.seed, p.tool_version, p.command_line);
  std::vector<std::string> header = study.axis_names;
  const bool labelled = std::any_of(study.records.begin(), study.records.end(),
                                    [](const auto& r) { return !r.label.empty(); });
  if (labelled) header.emplace_back("label");
  if (!study.records.empty()) {
    for (const auto& [name, value] : study.records.front().values) header.push_back(name);
  }
  out += fmt::format("{}\n", fmt::join(header, ","));
  for (const auto& r : study.records) {
    std::vector<std::string> cells;
    for (const double a : r.axis) cells.push_back(FormatNumber(a));
    if (labelled) cells.push_back(r.label);
    for (const auto& [name, value] : r.values) cells.push_back(FormatNumber(value));
    out += fmt::format("{}\n", fmt::join(cells, ","));
  }
  return out;
}

nlohmann::json KeyResultToJson(const KeyResult& key) {
  json budget = json::object();
  for (const auto& term : key.epsilon_budget) budget[term.name] = term.value;
  return {{"analysis", key.analysis},
          {"skl_bits", key.skl_bits},
          {"skl_real", key.skl_real},
          {"raw_bits", key.raw_bits},
          {"qber", key.qber},
          {"test_qber", key.test_qber},
          {"phase_error_upper", key.phase_error_upper},
          {"lambda_ec_bits", key.lambda_ec_bits},
          {"s0_lower", key.s0_lower},
          {"s1_lower", key.s1_lower},
          {"params_used", key.params_used ? ParamsToJson(*key.params_used) : json(nullptr)},
          {"epsilon_budget", budget},
          {"diagnostics", key.diagnostics}};
}

nlohmann::json BlockStatsToJson(const BlockStats& stats) {
  auto cells = [](const std::vector<detect::CountCell>& v) {
    json arr = json::array();
    for (const auto& c : v) arr.push_back({{"n", c.n}, {"m", c.m}});
    return arr;
  };
  return {{"protocol", detect::ToString(stats.protocol)},
          {"direction", link::ToString(stats.direction)},
          {"mode", stats.mode == detect::CountMode::kSampled ? "sampled" : "expected"},
          {"key", cells(stats.key)},
          {"test", cells(stats.test)},
          {"key_photons", {{"vacuum", stats.key_photons.vacuum},
                           {"single", stats.key_photons.single}}},
          {"test_photons", {{"vacuum", stats.test_photons.vacuum},
                            {"single", stats.test_photons.single}}},
          {"total_pulses", stats.total_pulses},
          {"elapsed_s", stats.elapsed_s},
          {"samples_used", stats.samples_used},
          {"samples_excluded", stats.samples_excluded},
          {"diagnostics", stats.diagnostics}};
}

nlohmann::json StudyToJson(const StudyResult& study) {
  const auto& p = study.provenance;
  json records = json::array();
  for (const auto& r : study.records) {
    json axis = json::object();
    for (size_t a = 0; a < study.axis_names.size(); ++a) axis[study.axis_names[a]] = r.axis[a];
    json values = json::object();
    for (const auto& [name, value] : r.values) values[name] = value;
    json record = {{"axis", axis}, {"values", values}};
    if (!r.label.empty()) record["label"] = r.label;
    if (r.key) record["key"] = KeyResultToJson(*r.key);
    records.push_back(std::move(record));
  }
  return {{"metadata",
           {{"study", study.kind},
            {"mission", p.mission},
            {"config_hash", p.config_hash},
            {"seed", p.seed},
            {"version", p.tool_version},
            {"command", p.command_line}}},
          {"axes", study.axis_names},
          {"records", records}};
}

std::string ScheduleToCsv(const std::vector<ScheduledPass>& schedule) {
  std::string out = "day,max_elevation_deg\n";
  for (const auto& p : schedule) out += fmt::format("{},{}\n", p.day, p.max_elevation_deg);
  return out;
}

}  // namespace satqkd::missions
