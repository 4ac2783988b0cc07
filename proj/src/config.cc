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

#include "satqkd/config.h"

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "satqkd/errors.h"

#ifndef SATQKD_PRESET_DIR
#define SATQKD_PRESET_DIR "presets"
#endif

namespace satqkd::missions {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void Fail(const std::string& message) { throw ConfigError("config", message); }

// Wraps one JSON object and remembers which keys were read, so leftovers can
// be reported as unknown.
class Section {
 public:
  Section(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) Fail(fmt::format("'{}' must be an object", path_));
  }
  ~Section() = default;

  bool Has(const std::string& key) const { return doc_.contains(key); }

  template <typename T>
  void Read(const std::string& key, T& out) {
    seen_.insert(key);
    if (!doc_.contains(key)) return;
    try {
      out = doc_.at(key).get<T>();
    } catch (const json::exception&) {
      Fail(fmt::format("'{}.{}' has the wrong type", path_, key));
    }
  }

  template <typename T>
  void ReadOptional(const std::string& key, std::optional<T>& out) {
    seen_.insert(key);
    if (!doc_.contains(key) || doc_.at(key).is_null()) {
      if (doc_.contains(key)) out.reset();
      return;
    }
    T value{};
    Read(key, value);
    out = value;
  }

  std::string ReadString(const std::string& key, const std::string& fallback) {
    std::string value = fallback;
    Read(key, value);
    return value;
  }

  Section Child(const std::string& key) {
    seen_.insert(key);
    static const json kEmpty = json::object();
    return Section(doc_.contains(key) ? doc_.at(key) : kEmpty, path_ + "." + key);
  }

  void Require(const std::string& key) const {
    if (!doc_.contains(key)) Fail(fmt::format("missing '{}.{}'", path_, key));
  }

  void Finish() const {
    for (const auto& item : doc_.items()) {
      if (!seen_.count(item.key())) {
        Fail(fmt::format("unknown key '{}.{}'", path_, item.key()));
      }
    }
  }

 private:
  const json& doc_;
  std::string path_;
  std::set<std::string> seen_;
};

json Nullable(const std::optional<double>& value) {
  return value.has_value() ? json(*value) : json(nullptr);
}

template <typename E, size_t N>
E EnumFromString(std::string_view name, const std::array<std::string_view, N>& names,
                 std::string_view what) {
  for (size_t i = 0; i < N; ++i) {
    if (names[i] == name) return static_cast<E>(i);
  }
  Fail(fmt::format("unknown {} '{}'", what, name));
}

constexpr std::array<std::string_view, 2> kLossModes = {"physical", "empirical"};
constexpr std::array<std::string_view, 2> kAnalyses = {"new", "legacy"};
constexpr std::array<std::string_view, 3> kLatitudeModes = {"equatorial", "mid_latitude",
                                                            "high_latitude"};
constexpr std::array<std::string_view, 2> kCountModes = {"expected", "sampled"};

void ReadChain(Section s, link::OpticalChain& c) {
  c.direction = link::LinkDirectionFromString(
      s.ReadString("direction", std::string(link::ToString(c.direction))));
  s.Read("tx_aperture_m", c.tx_aperture_m);
  s.Read("rx_aperture_m", c.rx_aperture_m);
  s.Read("wavelength_nm", c.wavelength_nm);
  s.ReadOptional("beam_quality_m2", c.beam_quality_m2);
  s.ReadOptional("waist_to_aperture_ratio", c.waist_to_aperture_ratio);
  s.ReadOptional("divergence_urad", c.divergence_urad);
  s.Read("pointing_jitter_urad", c.pointing_jitter_urad);
  s.Read("atm_zenith_db", c.atm_zenith_db);
  s.Read("optics_db", c.optics_db);
  s.Read("detector_db", c.detector_db);
  s.Read("calibration_db", c.calibration_db);
  s.Read("turbulence_penalty_db", c.turbulence_penalty_db);
  s.Read("min_elevation_deg", c.min_elevation_deg);
  s.Finish();
}

json ChainToJson(const link::OpticalChain& c) {
  return {{"direction", link::ToString(c.direction)},
          {"tx_aperture_m", c.tx_aperture_m},
          {"rx_aperture_m", c.rx_aperture_m},
          {"wavelength_nm", c.wavelength_nm},
          {"beam_quality_m2", Nullable(c.beam_quality_m2)},
          {"waist_to_aperture_ratio", Nullable(c.waist_to_aperture_ratio)},
          {"divergence_urad", Nullable(c.divergence_urad)},
          {"pointing_jitter_urad", c.pointing_jitter_urad},
          {"atm_zenith_db", c.atm_zenith_db},
          {"optics_db", c.optics_db},
          {"detector_db", c.detector_db},
          {"calibration_db", c.calibration_db},
          {"turbulence_penalty_db", c.turbulence_penalty_db},
          {"min_elevation_deg", c.min_elevation_deg}};
}

void ReadParams(Section s, detect::ProtocolParams& p) {
  p.protocol = detect::ProtocolFromString(
      s.ReadString("protocol", std::string(detect::ToString(p.protocol))));
  s.Read("intensities", p.intensities);
  s.Read("intensity_probs", p.intensity_probs);
  s.Read("basis_prob", p.basis_prob);
  s.Read("source_rate_hz", p.source_rate_hz);
  s.Read("p_ec", p.p_ec);
  s.Read("qber_i", p.qber_i);
  s.Read("p_ap", p.p_ap);
  s.Read("coincidence_window_ns", p.coincidence_window_ns);
  s.Read("detector_efficiency", p.detector_efficiency);
  s.Read("local_efficiency", p.local_efficiency);
  s.Read("dark_cps", p.dark_cps);
  s.Read("detectors_per_side", p.detectors_per_side);
  s.Read("background_cps", p.background_cps);
  s.Read("dead_time_ns", p.dead_time_ns);
  s.Read("coincidence_efficiency", p.coincidence_efficiency);
  s.Read("visibility_cutoff", p.visibility_cutoff);
  s.Finish();
}

void ReadSecurity(Section s, finitekey::SecurityParams& sec) {
  s.Read("eps_sec", sec.eps_sec);
  s.Read("eps_cor", sec.eps_cor);
  s.Read("f_ec", sec.f_ec);
  sec.leakage_model = finitekey::LeakageModelFromString(
      s.ReadString("leakage_model", std::string(finitekey::ToString(sec.leakage_model))));
  s.ReadOptional("syndrome_failure_prob", sec.syndrome_failure_prob);
  s.Finish();
}

void ReadOptimize(Section s, OptimizeConfig& o) {
  s.Read("enabled", o.enabled);
  s.Read("per_pass", o.per_pass);
  s.Read("reference_elevation_deg", o.reference_elevation_deg);
  std::vector<std::string> names;
  for (const auto p : o.spec.free_parameters) names.emplace_back(optimize::ToString(p));
  s.Read("free_parameters", names);
  o.spec.free_parameters.clear();
  for (const auto& n : names) o.spec.free_parameters.push_back(optimize::FreeParameterFromString(n));
  {
    Section b = s.Child("bounds");
    for (size_t i = 0; i < o.spec.bounds.size(); ++i) {
      const std::string key(optimize::ToString(static_cast<optimize::FreeParameter>(i)));
      std::array<double, 2> pair = {o.spec.bounds[i].lower, o.spec.bounds[i].upper};
      b.Read(key, pair);
      o.spec.bounds[i] = {pair[0], pair[1]};
    }
    b.Finish();
  }
  s.Read("tolerance", o.spec.tolerance);
  s.Read("max_evaluations", o.spec.max_evaluations);
  s.Read("starts", o.spec.starts);
  s.Read("window_thresholds", o.spec.window_thresholds);
  s.Read("seed", o.spec.seed);
  s.Finish();
}

json OptimizeToJson(const OptimizeConfig& o) {
  json names = json::array();
  for (const auto p : o.spec.free_parameters) names.push_back(optimize::ToString(p));
  json bounds = json::object();
  for (size_t i = 0; i < o.spec.bounds.size(); ++i) {
    bounds[std::string(optimize::ToString(static_cast<optimize::FreeParameter>(i)))] = {
        o.spec.bounds[i].lower, o.spec.bounds[i].upper};
  }
  return {{"enabled", o.enabled},
          {"per_pass", o.per_pass},
          {"reference_elevation_deg", o.reference_elevation_deg},
          {"free_parameters", names},
          {"bounds", bounds},
          {"tolerance", o.spec.tolerance},
          {"max_evaluations", o.spec.max_evaluations},
          {"starts", o.spec.starts},
          {"window_thresholds", o.spec.window_thresholds},
          {"seed", o.spec.seed}};
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(fmt::format("cannot read '{}'", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

std::string_view ToString(LossMode mode) { return kLossModes[static_cast<size_t>(mode)]; }
std::string_view ToString(Analysis analysis) {
  return kAnalyses[static_cast<size_t>(analysis)];
}
std::string_view ToString(LatitudeMode mode) {
  return kLatitudeModes[static_cast<size_t>(mode)];
}
LatitudeMode LatitudeModeFromString(std::string_view name) {
  return EnumFromString<LatitudeMode>(name, kLatitudeModes, "latitude mode");
}

nlohmann::json ParamsToJson(const detect::ProtocolParams& p) {
  return {{"protocol", detect::ToString(p.protocol)},
          {"intensities", p.intensities},
          {"intensity_probs", p.intensity_probs},
          {"basis_prob", p.basis_prob},
          {"source_rate_hz", p.source_rate_hz},
          {"p_ec", p.p_ec},
          {"qber_i", p.qber_i},
          {"p_ap", p.p_ap},
          {"coincidence_window_ns", p.coincidence_window_ns},
          {"detector_efficiency", p.detector_efficiency},
          {"local_efficiency", p.local_efficiency},
          {"dark_cps", p.dark_cps},
          {"detectors_per_side", p.detectors_per_side},
          {"background_cps", p.background_cps},
          {"dead_time_ns", p.dead_time_ns},
          {"coincidence_efficiency", p.coincidence_efficiency},
          {"visibility_cutoff", p.visibility_cutoff}};
}

nlohmann::json SecurityToJson(const finitekey::SecurityParams& sec) {
  return {{"eps_sec", sec.eps_sec},
          {"eps_cor", sec.eps_cor},
          {"f_ec", sec.f_ec},
          {"leakage_model", finitekey::ToString(sec.leakage_model)},
          {"syndrome_failure_prob", Nullable(sec.syndrome_failure_prob)}};
}

MissionConfig ConfigFromJson(const nlohmann::json& doc, std::string base_dir) {
  MissionConfig c;
  c.base_dir = std::move(base_dir);
  c.legacy_security.eps_sec = 1e-9;
  Section top(doc, "config");
  for (const char* key : {"name", "orbit", "link", "loss", "source", "security"}) {
    top.Require(key);
  }
  top.Read("name", c.name);
  top.Read("description", c.description);
  c.analysis = EnumFromString<Analysis>(top.ReadString("analysis", "new"), kAnalyses,
                                        "analysis");
  c.count_mode = EnumFromString<detect::CountMode>(top.ReadString("count_mode", "expected"),
                                                   kCountModes, "count mode");
  {
    Section s = top.Child("orbit");
    s.Read("altitude_km", c.altitude_km);
    s.Read("min_elevation_deg", c.min_elevation_deg);
    s.Read("time_step_s", c.time_step_s);
    s.Finish();
  }
  ReadChain(top.Child("link"), c.chain);
  {
    Section s = top.Child("loss");
    c.loss.mode = EnumFromString<LossMode>(s.ReadString("mode", "physical"), kLossModes,
                                           "loss mode");
    s.Read("curve_file", c.loss.curve_file);
    s.Read("offset_db", c.loss.offset_db);
    s.ReadOptional("zenith_loss_db", c.loss.zenith_loss_db);
    s.Read("attenuator_levels_db", c.loss.attenuator_levels_db);
    s.Finish();
  }
  ReadParams(top.Child("source"), c.params);
  ReadSecurity(top.Child("security"), c.security);
  ReadSecurity(top.Child("legacy_security"), c.legacy_security);
  ReadOptimize(top.Child("optimize"), c.optimize);
  {
    Section s = top.Child("schedule");
    c.schedule.latitude_mode = LatitudeModeFromString(
        s.ReadString("latitude_mode", std::string(ToString(c.schedule.latitude_mode))));
    s.Read("days", c.schedule.days);
    s.Read("night_fraction", c.schedule.night_fraction);
    s.Read("night_hours", c.schedule.night_hours);
    s.Finish();
  }
  top.Finish();
  return c;
}

nlohmann::json ConfigToJson(const MissionConfig& c) {
  return {{"name", c.name},
          {"description", c.description},
          {"analysis", ToString(c.analysis)},
          {"count_mode", kCountModes[static_cast<size_t>(c.count_mode)]},
          {"orbit",
           {{"altitude_km", c.altitude_km},
            {"min_elevation_deg", c.min_elevation_deg},
            {"time_step_s", c.time_step_s}}},
          {"link", ChainToJson(c.chain)},
          {"loss",
           {{"mode", ToString(c.loss.mode)},
            {"curve_file", c.loss.curve_file},
            {"offset_db", c.loss.offset_db},
            {"zenith_loss_db", Nullable(c.loss.zenith_loss_db)},
            {"attenuator_levels_db", c.loss.attenuator_levels_db}}},
          {"source", ParamsToJson(c.params)},
          {"security", SecurityToJson(c.security)},
          {"legacy_security", SecurityToJson(c.legacy_security)},
          {"optimize", OptimizeToJson(c.optimize)},
          {"schedule",
           {{"latitude_mode", ToString(c.schedule.latitude_mode)},
            {"days", c.schedule.days},
            {"night_fraction", c.schedule.night_fraction},
            {"night_hours", c.schedule.night_hours}}}};
}

std::string MissionConfig::CurvePath() const {
  if (loss.curve_file.empty()) return {};
  const fs::path file(loss.curve_file);
  if (file.is_absolute()) return file.string();
  return (fs::path(base_dir.empty() ? "." : base_dir) / file).lexically_normal().string();
}

void MissionConfig::Validate() const {
  if (name.empty()) Fail("mission name is empty");
  if (!(altitude_km >= 100.0)) Fail("orbit.altitude_km must be >= 100");
  if (!(min_elevation_deg >= 0.0 && min_elevation_deg < 90.0)) {
    Fail("orbit.min_elevation_deg must lie in [0, 90)");
  }
  if (!(time_step_s > 0.0)) Fail("orbit.time_step_s must be > 0");
  chain.Validate();
  params.Validate();
  security.Validate();
  legacy_security.Validate();
  optimize.spec.Validate();
  if (!std::isfinite(loss.offset_db)) Fail("loss.offset_db must be finite");
  if (loss.zenith_loss_db.has_value() && !(*loss.zenith_loss_db >= 0.0)) {
    Fail("loss.zenith_loss_db must be >= 0");
  }
  if (loss.mode == LossMode::kEmpirical) {
    if (loss.curve_file.empty()) Fail("empirical loss mode needs loss.curve_file");
    link::EmpiricalCurve::Load(CurvePath());
  }
  if (analysis == Analysis::kLegacy && params.protocol != detect::Protocol::kBbm92) {
    Fail("the legacy analysis exists for BBM92 only");
  }
  if (!(optimize.reference_elevation_deg > 0.0 && optimize.reference_elevation_deg <= 90.0)) {
    Fail("optimize.reference_elevation_deg must lie in (0, 90]");
  }
  if (schedule.days < 1 || !(schedule.night_fraction > 0.0 && schedule.night_fraction <= 1.0) ||
      !(schedule.night_hours > 0.0 && schedule.night_hours <= 24.0)) {
    Fail("schedule needs days >= 1, night_fraction in (0, 1], night_hours in (0, 24]");
  }
}

std::string PresetDirectory() { return SATQKD_PRESET_DIR; }

std::string ResolveConfigPath(const std::string& path) {
  if (fs::exists(path)) return path;
  const fs::path given(path);
  if (!given.has_parent_path()) {
    for (const auto& candidate : {fs::path(PresetDirectory()) / given,
                                  fs::path(PresetDirectory()) / (path + ".json")}) {
      if (fs::exists(candidate)) return candidate.string();
    }
  }
  Fail(fmt::format("config file '{}' not found", path));
}

MissionConfig LoadConfig(const std::string& path) {
  const std::string resolved = ResolveConfigPath(path);
  json doc;
  try {
    doc = json::parse(ReadFile(resolved));
  } catch (const json::parse_error& e) {
    Fail(fmt::format("'{}' is not valid JSON: {}", resolved, e.what()));
  }
  const auto parent = fs::path(resolved).parent_path();
  return ConfigFromJson(doc, parent.empty() ? "." : parent.string());
}

void ApplyOverride(nlohmann::json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    Fail(fmt::format("override '{}' is not key=value", assignment));
  }
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json* node = &doc;
  std::stringstream path(key);
  std::string part;
  while (std::getline(path, part, '.')) {
    if (node->is_object() && node->contains(part)) {
      node = &(*node)[part];
    } else if (node->is_array() && !part.empty() &&
               part.find_first_not_of("0123456789") == std::string::npos &&
               std::stoul(part) < node->size()) {
      node = &(*node)[std::stoul(part)];
    } else {
      Fail(fmt::format("override key '{}' does not exist", key));
    }
  }
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  *node = value;
}

std::string CanonicalText(const MissionConfig& config) { return ConfigToJson(config).dump(); }

std::string ConfigHash(const MissionConfig& config) {
  std::string text = CanonicalText(config);
  if (config.loss.mode == LossMode::kEmpirical && !config.loss.curve_file.empty()) {
    text += ReadFile(config.CurvePath());
  }
  std::uint64_t hash = 14695981039346656037ULL;
  for (const unsigned char ch : text) {
    hash ^= ch;
    hash *= 1099511628211ULL;
  }
  return fmt::format("{:016x}", hash);
}

}  // namespace satqkd::missions
