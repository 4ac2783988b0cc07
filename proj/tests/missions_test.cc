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
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include "satqkd/config.h"
#include "satqkd/errors.h"
#include "satqkd/link_budget.h"
#include "satqkd/orbit.h"

namespace satqkd::missions {
namespace {

bool HasDiagnostic(const finitekey::KeyResult& key, const std::string& flag) {
  return std::find(key.diagnostics.begin(), key.diagnostics.end(), flag) !=
         key.diagnostics.end();
}

TEST(AltitudeBandTest, Labels) {
  EXPECT_EQ(AltitudeBand(300.0), "VLEO");
  EXPECT_EQ(AltitudeBand(500.0), "LEO");
  EXPECT_EQ(AltitudeBand(7000.0), "MEO");
  EXPECT_EQ(AltitudeBand(35786.0), "GEO");
  EXPECT_EQ(AltitudeBand(30000.0), "HEO");
  EXPECT_EQ(AltitudeBand(40000.0), "HEO");
  EXPECT_TRUE(IsGeostationary(35786.4));
  EXPECT_FALSE(IsGeostationary(35790.0));
}

TEST(MissionPassTest, LeoPassRespectsMaskAndNight) {
  const MissionConfig config = LoadConfig("cqt-sat");
  const auto pass = MissionPass(config, 70.0);
  ASSERT_FALSE(pass.empty());
  for (const auto& s : pass.samples) EXPECT_GE(s.elevation_deg, config.min_elevation_deg);
  EXPECT_LE(pass.duration_s(), config.schedule.night_hours * 3600.0);
  EXPECT_TRUE(MissionPass(config, 5.0).empty());
}

TEST(MissionPassTest, GeostationaryPassLastsOneNight) {
  MissionConfig config = LoadConfig("highalt-accumulate");
  config.altitude_km = orbit::kGeostationaryAltitudeKm;
  const auto pass = MissionPass(config, 90.0);
  EXPECT_NEAR(pass.duration_s(), config.schedule.night_hours * 3600.0, 1e-9);
  for (const auto& s : pass.samples) EXPECT_EQ(s.elevation_deg, 90.0);
}

TEST(MissionProfileTest, CalibratedZenithAndOffset) {
  const MissionConfig config = LoadConfig("cqt-sat");
  EXPECT_NEAR(link::TotalLossDb(CalibratedChain(config), 90.0, config.altitude_km),
              *config.loss.zenith_loss_db, 1e-9);
  const auto pass = MissionPass(config, 90.0);
  const auto base = MissionProfile(config, pass);
  const auto shifted = MissionProfile(config, pass, 3.0);
  ASSERT_EQ(base.samples.size(), shifted.samples.size());
  for (size_t i = 0; i < base.samples.size(); ++i) {
    EXPECT_NEAR(shifted.samples[i].loss_db - base.samples[i].loss_db, 3.0, 1e-12);
  }
  EXPECT_NEAR(base.zenith_loss_db, *config.loss.zenith_loss_db, 0.01);
}

TEST(MissionProfileTest, AttenuatorLadder) {
  MissionConfig config = LoadConfig("cqt-sat");
  config.loss.attenuator_levels_db = {30.0, 35.0, 40.0, 45.0};
  const auto profile = MissionProfile(config, MissionPass(config, 60.0));
  for (const auto& s : profile.samples) {
    EXPECT_TRUE(s.loss_db == 30.0 || s.loss_db == 35.0 || s.loss_db == 40.0 ||
                s.loss_db == 45.0)
        << s.loss_db;
  }
}

TEST(RunPassTest, CqtHighAndLowPasses) {
  const MissionConfig config = LoadConfig("cqt-sat");
  const auto high = RunPassDetailed(config, 88.0);
  EXPECT_GT(high.key.skl_bits, 0);
  EXPECT_LE(high.key.skl_bits, high.key.raw_bits);
  EXPECT_EQ(high.evaluations, 64);
  EXPECT_EQ(RunPass(config, 25.0).skl_bits, 0);
  const auto masked = RunPass(config, 8.0);
  EXPECT_EQ(masked.skl_bits, 0);
  EXPECT_TRUE(HasDiagnostic(masked, "below_horizon_mask"));
}

TEST(RunPassTest, ExtraLossNeverHelps) {
  const MissionConfig config = LoadConfig("cqt-sat");
  std::int64_t prev = RunPass(config, 80.0, 0.0).skl_bits;
  for (double offset : {1.0, 2.0, 4.0}) {
    const std::int64_t bits = RunPass(config, 80.0, offset).skl_bits;
    EXPECT_LE(bits, prev) << offset;
    prev = bits;
  }
}

TEST(RunPassTest, LegacyAnalysisIsMorePessimistic) {
  MissionConfig config = LoadConfig("qeyssat-uplink");
  const auto fresh = RunPass(config, 80.0);
  config.analysis = Analysis::kLegacy;
  const auto legacy = RunPass(config, 80.0);
  EXPECT_EQ(legacy.analysis, "bbm92_legacy");
  EXPECT_LT(legacy.skl_bits, fresh.skl_bits);
}

TEST(RunPassTest, SampledModeIsSeeded) {
  MissionConfig config = LoadConfig("cqt-sat");
  config.count_mode = detect::CountMode::kSampled;
  const auto a = RunPassDetailed(config, 70.0, 0.0, 42);
  const auto b = RunPassDetailed(config, 70.0, 0.0, 42);
  const auto c = RunPassDetailed(config, 70.0, 0.0, 43);
  EXPECT_EQ(a.stats.KeyTotal().n, b.stats.KeyTotal().n);
  EXPECT_EQ(a.key.skl_bits, b.key.skl_bits);
  EXPECT_NE(a.stats.KeyTotal().n, c.stats.KeyTotal().n);
}

TEST(ElevationSweepTest, OrderingAndMonotonicity) {
  const MissionConfig config = LoadConfig("cqt-sat");
  const StudyResult sweep = ElevationSweep(config, {80, 30, 50, 30, 65, 40}, {2.0, 0.0});
  ASSERT_EQ(sweep.records.size(), 10u);
  EXPECT_EQ(sweep.axis_names, (std::vector<std::string>{"offset_db", "max_elevation_deg"}));
  for (size_t i = 0; i < sweep.records.size(); ++i) {
    EXPECT_EQ(sweep.records[i].axis[0], i < 5 ? 0.0 : 2.0);
    if (i % 5 != 0) {
      EXPECT_GT(sweep.records[i].axis[1], sweep.records[i - 1].axis[1]);
      EXPECT_GE(sweep.Value(i, "skl_bits"), sweep.Value(i - 1, "skl_bits"));
    }
  }
  for (size_t i = 0; i < 5; ++i) {
    EXPECT_LE(sweep.Value(i + 5, "skl_bits"), sweep.Value(i, "skl_bits"));
  }
  const auto cut0 = ZeroKeyCutoff(sweep, 0.0);
  const auto cut2 = ZeroKeyCutoff(sweep, 2.0);
  ASSERT_TRUE(cut0.has_value());
  ASSERT_TRUE(cut2.has_value());
  EXPECT_LE(*cut0, *cut2);
  EXPECT_FALSE(ZeroKeyCutoff(sweep, 7.0).has_value());
}

TEST(ElevationSweepTest, SinglePointMatchesRunPass) {
  const MissionConfig config = LoadConfig("cqt-sat");
  const StudyResult sweep = ElevationSweep(config, {60.0}, {0.0});
  ASSERT_EQ(sweep.records.size(), 1u);
  EXPECT_EQ(sweep.Value(0, "skl_bits"),
            static_cast<double>(RunPass(config, 60.0).skl_bits));
  EXPECT_EQ(sweep.provenance.config_hash, ConfigHash(config));
}

TEST(ElevationSweepTest, FixedReferenceChoice) {
  MissionConfig config = LoadConfig("cqt-sat");
  config.optimize.per_pass = false;
  const FixedChoice choice = ReferenceChoice(config);
  EXPECT_GT(choice.window_fraction, 0.0);
  EXPECT_LE(choice.window_fraction, 1.0);
  const StudyResult sweep = ElevationSweep(config, {50.0, 85.0}, {0.0});
  EXPECT_GT(sweep.Value(1, "skl_bits"), 0.0);
  EXPECT_NEAR(sweep.Value(0, "window_fraction"), choice.window_fraction, 0.05);
}

TEST(ZeroKeyThresholdTest, RisesWithExtraLoss) {
  const MissionConfig config = LoadConfig("cqt-sat");
  const auto t0 = ZeroKeyThreshold(config, 0.0);
  const auto t2 = ZeroKeyThreshold(config, 2.0);
  ASSERT_TRUE(t0.has_value());
  ASSERT_TRUE(t2.has_value());
  EXPECT_LT(*t0, *t2);
  EXPECT_EQ(RunPass(config, *t0 - 0.5).skl_bits, 0);
  EXPECT_GT(RunPass(config, *t0 + 0.5).skl_bits, 0);
  EXPECT_FALSE(ZeroKeyThreshold(config, 30.0).has_value());
}

TEST(AltitudeStudyTest, AlwaysIncludesMeoAndGeo) {
  const MissionConfig config = LoadConfig("highalt-tablev");
  const StudyResult study = AltitudeStudy(config, {1000.0, 500.0});
  const auto altitudes = [&] {
    std::vector<double> a;
    for (const auto& r : study.records) a.push_back(r.axis[0]);
    return a;
  }();
  EXPECT_EQ(altitudes, (std::vector<double>{500.0, 1000.0, 7000.0, 35786.0}));
  const auto zenith = study.Column("zenith_loss_db");
  for (size_t i = 1; i < zenith.size(); ++i) EXPECT_GT(zenith[i], zenith[i - 1]);
  EXPECT_NEAR(zenith[0], 25.95, 0.01);
  EXPECT_EQ(study.Value(2, "meo_marker"), 1.0);
  EXPECT_EQ(study.Value(0, "meo_marker"), 0.0);
  EXPECT_EQ(study.records[3].label, "GEO");
  EXPECT_THROW(AltitudeStudy(config, {150.0}), DomainError);
}

TEST(TradeoffMapTest, BaselineAndOrdering) {
  const MissionConfig config = LoadConfig("highalt-tablev");
  const std::vector<double> apertures = {0.05, 0.1, 0.3, 1.0};
  const std::vector<double> pointing = {0.5, 2.5, 10.0};
  const StudyResult map = TradeoffMap(config, apertures, pointing, {500.0, 35786.0});
  ASSERT_EQ(map.records.size(), 24u);
  auto gain = [&](double h, double ap, double pe) {
    for (size_t i = 0; i < map.records.size(); ++i) {
      const auto& a = map.records[i].axis;
      if (a[0] == h && a[1] == ap && a[2] == pe) return map.Value(i, "gain_db");
    }
    ADD_FAILURE() << "missing point";
    return 0.0;
  };
  // The configured chain sits on the grid.
  EXPECT_NEAR(gain(500.0, 0.1, 2.5), -link::TotalLossDb(config.chain, 90.0, 500.0), 1e-9);
  for (double ap : apertures) {
    for (size_t j = 0; j < pointing.size(); ++j) {
      EXPECT_LT(gain(35786.0, ap, pointing[j]), gain(500.0, ap, pointing[j]));
      if (j > 0) EXPECT_LT(gain(500.0, ap, pointing[j]), gain(500.0, ap, pointing[j - 1]));
    }
  }
  // With little jitter a larger transmitter always helps.
  for (size_t i = 1; i < apertures.size(); ++i) {
    EXPECT_GT(gain(500.0, apertures[i], 0.5), gain(500.0, apertures[i - 1], 0.5));
  }
}

TEST(ScheduleTest, MeanPassesPerDayFromGeometry) {
  for (double h : {400.0, 500.0, 600.0}) {
    const double a = orbit::kEarthRadiusKm + h;
    const double period = 2.0 * std::numbers::pi * std::sqrt(a * a * a / orbit::kEarthGmKm3PerS2);
    const double swath = 2.0 * std::acos(orbit::kEarthRadiusKm / a) / std::numbers::pi;
    const double equatorial = 86400.0 / period * swath;
    EXPECT_NEAR(MeanPassesPerDay(h, LatitudeMode::kEquatorial), equatorial, 1e-9);
    EXPECT_NEAR(MeanPassesPerDay(h, LatitudeMode::kMidLatitude), equatorial * std::sqrt(2.0),
                1e-9);
    for (auto mode : {LatitudeMode::kEquatorial, LatitudeMode::kMidLatitude}) {
      EXPECT_GE(MeanPassesPerDay(h, mode), 2.0);
      EXPECT_LE(MeanPassesPerDay(h, mode), 6.0);
    }
  }
  EXPECT_EQ(MeanPassesPerDay(35786.0, LatitudeMode::kHighLatitude), 1.0);
}

TEST(ScheduleTest, SeededAndPlausible) {
  ScheduleConfig schedule;
  schedule.latitude_mode = LatitudeMode::kEquatorial;
  const auto a = PassSchedule(500.0, schedule, 3);
  const auto b = PassSchedule(500.0, schedule, 3);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].day, b[i].day);
    EXPECT_EQ(a[i].max_elevation_deg, b[i].max_elevation_deg);
    EXPECT_GE(a[i].max_elevation_deg, 0.0);
    EXPECT_LE(a[i].max_elevation_deg, 90.0);
  }
  const double expected =
      365 * MeanPassesPerDay(500.0, LatitudeMode::kEquatorial) * schedule.night_fraction;
  EXPECT_NEAR(static_cast<double>(a.size()), expected, 5.0 * std::sqrt(expected));

  const auto geo = PassSchedule(35786.0, schedule, 3);
  ASSERT_EQ(geo.size(), 365u);
  for (int d = 0; d < 365; ++d) {
    EXPECT_EQ(geo[d].day, d);
    EXPECT_EQ(geo[d].max_elevation_deg, 90.0);
  }
}

TEST(AccumulateTest, EverythingOverCutoffGivesNothing) {
  const MissionConfig config = LoadConfig("highalt-accumulate");
  const std::vector<ScheduledPass> schedule = {{0, 80.0}, {1, 60.0}, {2, 5.0}};
  const AccumulationResult r = AccumulateYear(config, schedule, 1e-4);
  EXPECT_EQ(r.passes, 3);
  EXPECT_EQ(r.passes_used, 0);
  EXPECT_EQ(r.passes_over_cutoff, 2);
  EXPECT_EQ(r.passes_empty, 1);
  EXPECT_EQ(r.skl_bits, 0);
  EXPECT_EQ(r.raw_bits, 0.0);
}

TEST(AccumulateTest, PoolingBeatsSumOfPasses) {
  const MissionConfig config = LoadConfig("highalt-accumulate");
  const std::vector<ScheduledPass> schedule = {{0, 40.0}, {0, 60.0}, {1, 80.0}, {2, 30.0}};
  const AccumulationResult r = AccumulateYear(config, schedule, 0.11);
  EXPECT_EQ(r.passes_used, 4);
  EXPECT_GT(r.skl_bits, 0);
  EXPECT_GE(r.skl_bits, r.skl_bits_per_pass);
  EXPECT_GT(r.mean_qber, 0.0);
  EXPECT_LT(r.mean_qber, 0.11);
}

TEST(AccumulateTest, StudyStructure) {
  const MissionConfig config = LoadConfig("highalt-accumulate");
  const StudyResult a = AccumulationStudy(config, {500.0, 20000.0, 35786.0}, 0.11, 9);
  const StudyResult b = AccumulationStudy(config, {500.0, 20000.0, 35786.0}, 0.11, 9);
  EXPECT_EQ(StudyToCsv(a), StudyToCsv(b));
  const auto raw = a.Column("raw_bits");
  const auto qber = a.Column("mean_qber");
  ASSERT_EQ(raw.size(), 3u);
  EXPECT_GT(raw[0], raw[1]);
  EXPECT_LT(qber[0], qber[1]);
  EXPECT_EQ(a.Value(2, "passes"), 365.0);
}

TEST(OutputTest, CsvAndJsonCarryProvenance) {
  const MissionConfig config = LoadConfig("cqt-sat");
  StudyResult study = ElevationSweep(config, {60.0, 80.0}, {0.0}, 17);
  study.provenance.command_line = "satqkd sweep --config cqt-sat";
  const std::string csv = StudyToCsv(study);
  EXPECT_EQ(csv.rfind("# satqkd study: sweep\n", 0), 0u);
  EXPECT_NE(csv.find("# config_hash: " + ConfigHash(config)), std::string::npos);
  EXPECT_NE(csv.find("# seed: 17"), std::string::npos);
  EXPECT_NE(csv.find("\noffset_db,max_elevation_deg,"), std::string::npos);
  const auto json = StudyToJson(study);
  EXPECT_EQ(json["metadata"]["config_hash"], ConfigHash(config));
  EXPECT_EQ(json["records"].size(), 2u);
}

TEST(PointSeedTest, DistinctAndStable) {
  EXPECT_EQ(PointSeed(1, 2), PointSeed(1, 2));
  EXPECT_NE(PointSeed(1, 2), PointSeed(1, 3));
  EXPECT_NE(PointSeed(1, 2), PointSeed(2, 2));
}

}  // namespace
}  // namespace satqkd::missions
