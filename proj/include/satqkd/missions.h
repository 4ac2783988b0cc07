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

// Mission pipeline and studies.
//
// A pass runs: pass geometry -> loss profile -> (optional optimization of
// parameters and window) -> block statistics -> secret key length. Studies
// repeat that over an axis and gather records in axis order, with per-point
// seeds derived from one master seed.

#ifndef SATQKD_MISSIONS_H_
#define SATQKD_MISSIONS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "satqkd/config.h"
#include "satqkd/detection.h"
#include "satqkd/finite_key.h"
#include "satqkd/link_budget.h"
#include "satqkd/optimize.h"
#include "satqkd/orbit.h"

namespace satqkd::missions {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr double kRepresentativeMeoAltitudeKm = 7000.0;

// True when the altitude is geostationary to within 1 km.
bool IsGeostationary(double altitude_km);

// Altitude band label: VLEO (< 450 km), LEO (< 2000 km), MEO (< 20000 km),
// GEO (geostationary) or HEO (anything else above).
std::string AltitudeBand(double altitude_km);

// Chain with the zenith calibration of the config applied.
link::OpticalChain CalibratedChain(const MissionConfig& config);

// Samples above the horizon mask, clipped to one night around the peak.
// Geostationary altitudes give a stationary pass lasting one night.
orbit::PassGeometry MissionPass(const MissionConfig& config, double max_elevation_deg);

link::LossProfile MissionProfile(const MissionConfig& config,
                                 const orbit::PassGeometry& pass,
                                 double extra_offset_db = 0.0);

// Parameters and window fraction fixed ahead of time (no per-pass search).
struct FixedChoice {
  detect::ProtocolParams params;
  double window_fraction = 1.0;
};

struct PassOutcome {
  double max_elevation_deg = 0.0;
  double extra_offset_db = 0.0;
  finitekey::KeyResult key;
  detect::BlockStats stats;
  optimize::WindowCut window;
  int evaluations = 0;
  std::vector<optimize::TraceRow> trace;  // filled when the optimizer ran
};

PassOutcome RunPassDetailed(const MissionConfig& config, double max_elevation_deg,
                            double extra_offset_db = 0.0, std::uint64_t seed = 0,
                            const FixedChoice* fixed = nullptr);

finitekey::KeyResult RunPass(const MissionConfig& config, double max_elevation_deg,
                             double extra_offset_db = 0.0, std::uint64_t seed = 0);

// Parameters optimized once at the reference elevation; used when
// optimize.per_pass is false.
FixedChoice ReferenceChoice(const MissionConfig& config);

// Filled in by every study; callers add the command line.
struct Provenance {
  std::string mission;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string command_line;
};

struct StudyRecord {
  std::vector<double> axis;
  std::string label;
  std::vector<std::pair<std::string, double>> values;
  std::optional<finitekey::KeyResult> key;
};

struct StudyResult {
  std::string kind;
  std::vector<std::string> axis_names;
  std::vector<StudyRecord> records;
  Provenance provenance;

  // Values of one named column, in record order.
  std::vector<double> Column(const std::string& name) const;
  double Value(size_t record, const std::string& name) const;
};

// Seed for axis point `index`, derived from the master seed.
std::uint64_t PointSeed(std::uint64_t master_seed, std::uint64_t index);

StudyResult PassStudy(const MissionConfig& config, double max_elevation_deg,
                      std::uint64_t seed = 0);

// Records are ordered by offset, then elevation; both axes are sorted and
// deduplicated.
StudyResult ElevationSweep(const MissionConfig& config, std::vector<double> elevations_deg,
                           std::vector<double> extra_losses_db, std::uint64_t seed = 0);

// Lowest swept elevation with a positive key at the given offset.
std::optional<double> ZeroKeyCutoff(const StudyResult& sweep, double offset_db);

// Lowest max elevation with a positive key, located by bisection to within
// `tolerance_deg`; nullopt when even a zenith pass gives no key.
std::optional<double> ZeroKeyThreshold(const MissionConfig& config, double offset_db,
                                       double tolerance_deg = 0.1);

// Zenith loss per altitude. The representative MEO and the geostationary
// altitudes are always included.
StudyResult AltitudeStudy(const MissionConfig& config, std::vector<double> altitudes_km);

// Zenith link gain (negative loss) over transmitter aperture and pointing
// error. A directly specified divergence is scaled inversely with aperture.
StudyResult TradeoffMap(const MissionConfig& config, std::vector<double> apertures_m,
                        std::vector<double> pointing_errors_urad,
                        std::vector<double> altitudes_km);

struct ScheduledPass {
  int day = 0;
  double max_elevation_deg = 0.0;
};

// Expected passes per day over the horizon, day and night.
double MeanPassesPerDay(double altitude_km, LatitudeMode mode);

std::vector<ScheduledPass> PassSchedule(double altitude_km, const ScheduleConfig& schedule,
                                        std::uint64_t seed);

struct AccumulationResult {
  double altitude_km = 0.0;
  int passes = 0;
  int passes_used = 0;
  int passes_over_cutoff = 0;
  int passes_empty = 0;
  double raw_bits = 0.0;
  double mean_qber = 0.0;
  std::int64_t skl_bits = 0;            // pooled block
  std::int64_t skl_bits_per_pass = 0;   // sum of single-pass keys
  double median_pass_raw_bits = 0.0;    // sample size behind each QBER check
  finitekey::KeyResult pooled_key;
};

AccumulationResult AccumulateYear(const MissionConfig& config,
                                  std::span<const ScheduledPass> schedule,
                                  double qber_cutoff, std::uint64_t seed = 0);

StudyResult AccumulationStudy(const MissionConfig& config, std::vector<double> altitudes_km,
                              double qber_cutoff, std::uint64_t seed = 0);

// Output formats. CSV starts with '#'-prefixed metadata lines; JSON carries a
// "metadata" object.
std::string StudyToCsv(const StudyResult& study);
nlohmann::json StudyToJson(const StudyResult& study);
nlohmann::json KeyResultToJson(const finitekey::KeyResult& key);
nlohmann::json BlockStatsToJson(const detect::BlockStats& stats);
std::string ScheduleToCsv(const std::vector<ScheduledPass>& schedule);

}  // namespace satqkd::missions

#endif  // SATQKD_MISSIONS_H_
