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

// Mission configuration: the JSON document that binds an orbit, an optical
// chain, a source/detector model, security settings and optimizer options.
//
// Parsing is strict: unknown keys and out-of-range values raise ConfigError.
// Emission is canonical (every key present, absent optionals as null), so
// parse -> emit -> parse is a fixpoint and the emitted text hashes stably.

#ifndef SATQKD_CONFIG_H_
#define SATQKD_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "satqkd/detection.h"
#include "satqkd/finite_key.h"
#include "satqkd/link_budget.h"
#include "satqkd/optimize.h"

namespace satqkd::missions {

enum class LossMode { kPhysical, kEmpirical };
enum class Analysis { kNew, kLegacy };
enum class LatitudeMode { kEquatorial, kMidLatitude, kHighLatitude };

std::string_view ToString(LossMode mode);
std::string_view ToString(Analysis analysis);
std::string_view ToString(LatitudeMode mode);
LatitudeMode LatitudeModeFromString(std::string_view name);

struct LossConfig {
  LossMode mode = LossMode::kPhysical;
  // Empirical mode: CSV curve, resolved against the config file's directory.
  std::string curve_file;
  double offset_db = 0.0;  // added to every sample in either mode
  // Physical mode: pin the zenith loss (before offset) to this value.
  std::optional<double> zenith_loss_db;
  // Optional attenuator ladder the profile is snapped to.
  std::vector<double> attenuator_levels_db;
};

struct OptimizeConfig {
  bool enabled = false;
  // When false, parameters optimized once at `reference_elevation_deg` are
  // reused for every pass.
  bool per_pass = true;
  double reference_elevation_deg = 90.0;
  optimize::OptimizationSpec spec;
};

struct ScheduleConfig {
  LatitudeMode latitude_mode = LatitudeMode::kMidLatitude;
  int days = 365;
  double night_fraction = 0.5;  // share of passes that happen at night
  double night_hours = 8.0;     // longest usable stretch of one night
};

struct MissionConfig {
  std::string name;
  std::string description;
  Analysis analysis = Analysis::kNew;
  detect::CountMode count_mode = detect::CountMode::kExpected;
  double altitude_km = 500.0;
  double min_elevation_deg = 10.0;
  double time_step_s = 1.0;
  link::OpticalChain chain;
  LossConfig loss;
  detect::ProtocolParams params;
  finitekey::SecurityParams security;
  finitekey::SecurityParams legacy_security;
  OptimizeConfig optimize;
  ScheduleConfig schedule;

  // Directory used to resolve relative curve paths; not serialized.
  std::string base_dir;

  // Checks every section and that the curve file exists and parses.
  void Validate() const;
  std::string CurvePath() const;
};

MissionConfig ConfigFromJson(const nlohmann::json& doc, std::string base_dir = ".");
nlohmann::json ConfigToJson(const MissionConfig& config);

// Reads a config file; a bare file name that does not exist is looked up in
// the preset directory.
MissionConfig LoadConfig(const std::string& path);
std::string ResolveConfigPath(const std::string& path);
std::string PresetDirectory();

// Applies "dotted.key=value" overrides to a canonical document. The key must
// already exist; the value is read as JSON, falling back to a plain string.
void ApplyOverride(nlohmann::json& doc, std::string_view assignment);

// Canonical text and its 64-bit FNV-1a hash, as 16 hex digits.
std::string CanonicalText(const MissionConfig& config);
std::string ConfigHash(const MissionConfig& config);

nlohmann::json ParamsToJson(const detect::ProtocolParams& params);
nlohmann::json SecurityToJson(const finitekey::SecurityParams& sec);

}  // namespace satqkd::missions

#endif  // SATQKD_CONFIG_H_
