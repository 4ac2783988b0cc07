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

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>
#include "satqkd/errors.h"
#include "satqkd/orbit.h"

namespace satqkd::link {
namespace {

OpticalChain TableChain() {
  OpticalChain chain;
  chain.tx_aperture_m = 0.1;
  chain.rx_aperture_m = 0.6;
  chain.divergence_urad = 10.8;
  chain.pointing_jitter_urad = 2.5;
  chain.atm_zenith_db = 3.0;
  return chain;
}

// Power fraction of a Gaussian beam (1/e^2 radius w) inside a centred disc of
// radius a, by midpoint-rule integration of the radial intensity profile.
double CollectedFractionByQuadrature(double w, double a) {
  const int n = 200000;
  const double dr = a / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) * dr;
    sum += std::exp(-2.0 * r * r / (w * w)) * 2.0 * std::numbers::pi * r * dr;
  }
  return sum * 2.0 / (std::numbers::pi * w * w);
}

TEST(DivergenceTest, GaussianWaist) {
  OpticalChain chain;
  chain.tx_aperture_m = 0.1;
  chain.waist_to_aperture_ratio = 1.0;
  chain.beam_quality_m2 = 1.0;
  // theta = lambda / (pi w0) with w0 = 5 cm.
  EXPECT_NEAR(DivergenceUrad(chain), 785e-9 / (std::numbers::pi * 0.05) * 1e6, 1e-9);
  EXPECT_NEAR(DivergenceUrad(chain), 4.9975, 1e-4);
  chain.beam_quality_m2 = 1.6;
  EXPECT_NEAR(DivergenceUrad(chain), 1.6 * 4.9975, 1e-3);
}

TEST(DivergenceTest, DirectValueWins) {
  EXPECT_DOUBLE_EQ(DivergenceUrad(TableChain()), 10.8);
}

TEST(DiffractionTest, MatchesQuadrature) {
  const OpticalChain chain = TableChain();
  for (double range_km : {300.0, 500.0, 1694.567, 7000.0, 35786.0}) {
    const double w = 10.8e-6 * range_km * 1e3;
    const double expected = -10.0 * std::log10(CollectedFractionByQuadrature(w, 0.3));
    EXPECT_NEAR(DiffractionLossDb(chain, range_km), expected, 1e-6) << range_km;
  }
}

TEST(DiffractionTest, TwentyDbPerDecadeInFarField) {
  const OpticalChain chain = TableChain();
  for (double r : {1000.0, 3000.0, 10000.0}) {
    EXPECT_NEAR(DiffractionLossDb(chain, 10.0 * r) - DiffractionLossDb(chain, r), 20.0,
                0.05);
  }
}

TEST(DiffractionTest, LargeApertureCollectsEverything) {
  OpticalChain chain = TableChain();
  chain.rx_aperture_m = 100.0;
  EXPECT_NEAR(DiffractionLossDb(chain, 1.0), 0.0, 1e-12);
}

TEST(PointingTest, MatchesMonteCarloJitter) {
  // Per-axis Gaussian jitter against the far-field Gaussian profile.
  const OpticalChain chain = TableChain();
  std::mt19937_64 rng(7);
  std::normal_distribution<double> axis(0.0, 2.5);
  const double theta = 10.8;
  double mean = 0.0;
  const int trials = 1000000;
  for (int i = 0; i < trials; ++i) {
    const double ex = axis(rng), ey = axis(rng);
    mean += std::exp(-2.0 * (ex * ex + ey * ey) / (theta * theta));
  }
  mean /= trials;
  EXPECT_NEAR(PointingLossDb(chain), -10.0 * std::log10(mean), 0.005);
  EXPECT_NEAR(PointingLossDb(chain), 0.8433, 1e-3);
}

TEST(PointingTest, NoJitterNoLoss) {
  OpticalChain chain = TableChain();
  chain.pointing_jitter_urad = 0.0;
  EXPECT_EQ(PointingLossDb(chain), 0.0);
}

TEST(AtmosphereTest, AirmassScaling) {
  const OpticalChain chain = TableChain();
  EXPECT_DOUBLE_EQ(AtmosphericLossDb(chain, 90.0), 3.0);
  EXPECT_NEAR(AtmosphericLossDb(chain, 30.0), 2.0 * AtmosphericLossDb(chain, 90.0), 1e-12);
  // Capped below the chain's minimum elevation.
  EXPECT_DOUBLE_EQ(AtmosphericLossDb(chain, 5.0), AtmosphericLossDb(chain, 10.0));
  EXPECT_THROW(AtmosphericLossDb(chain, 0.0), DomainError);
}

TEST(TotalLossTest, SumOfTerms) {
  OpticalChain chain = TableChain();
  chain.optics_db = 1.5;
  chain.detector_db = 0.5;
  const double range = orbit::SlantRangeKm(45.0, 500.0);
  EXPECT_NEAR(TotalLossDb(chain, 45.0, 500.0),
              DiffractionLossDb(chain, range) + PointingLossDb(chain) +
                  3.0 / std::sin(std::numbers::pi / 4.0) + 2.0,
              1e-9);
}

TEST(TotalLossTest, TableBaselineAtZenith) {
  // 5.4 m beam on a 0.3 m radius: 22.108 dB, plus 0.843 dB pointing and 3 dB
  // atmosphere.
  EXPECT_NEAR(TotalLossDb(TableChain(), 90.0, 500.0), 25.95, 0.01);
}

TEST(TotalLossTest, UplinkTurbulenceScalesWithAirmass) {
  OpticalChain chain = TableChain();
  chain.turbulence_penalty_db = 5.0;
  const double down = TotalLossDb(chain, 30.0, 600.0);
  chain.direction = LinkDirection::kUplink;
  EXPECT_NEAR(TotalLossDb(chain, 30.0, 600.0) - down, 10.0, 1e-9);
}

TEST(TotalLossTest, GrowsWithAltitude) {
  const std::vector<double> altitudes = {400, 500, 1000, 7000, 20000, 35786};
  const auto curve = ZenithLossVsAltitude(TableChain(), altitudes);
  for (size_t i = 1; i < curve.size(); ++i) EXPECT_GT(curve[i].second, curve[i - 1].second);
}

TEST(CalibrationTest, PinsZenithLoss) {
  const OpticalChain chain = CalibrateToZenith(TableChain(), 500.0, 30.0);
  EXPECT_NEAR(TotalLossDb(chain, 90.0, 500.0), 30.0, 1e-9);
  EXPECT_NEAR(chain.calibration_db, 30.0 - 25.95, 0.01);
  EXPECT_THROW(CalibrateToZenith(TableChain(), 500.0, 20.0), ConfigError);
}

TEST(ChainValidateTest, ExactlyOneBeamSpec) {
  OpticalChain chain = TableChain();
  EXPECT_NO_THROW(chain.Validate());
  chain.waist_to_aperture_ratio = 0.9;
  EXPECT_THROW(chain.Validate(), ConfigError);
  chain.divergence_urad.reset();
  EXPECT_NO_THROW(chain.Validate());
  chain.waist_to_aperture_ratio.reset();
  EXPECT_THROW(chain.Validate(), ConfigError);
}

TEST(EmpiricalCurveTest, InterpolatesLinearly) {
  const EmpiricalCurve curve = EmpiricalCurve::FromCsv(
      "# measured\n"
      "elevation_deg,loss_db,background_cps\n"
      "10,50,2000\n"
      "30,40,1000\n"
      "90,30,500\n");
  EXPECT_DOUBLE_EQ(curve.LossDb(10.0), 50.0);
  EXPECT_DOUBLE_EQ(curve.LossDb(20.0), 45.0);
  EXPECT_DOUBLE_EQ(curve.LossDb(60.0), 35.0);
  EXPECT_DOUBLE_EQ(*curve.BackgroundCps(20.0), 1500.0);
  EXPECT_THROW(curve.LossDb(5.0), DomainError);
  EXPECT_THROW(curve.LossDb(90.5), DomainError);
}

TEST(EmpiricalCurveTest, RejectsMalformedInput) {
  EXPECT_THROW(EmpiricalCurve::FromCsv("el,loss\n10,1\n20,2\n"), ConfigError);
  EXPECT_THROW(EmpiricalCurve::FromCsv("elevation_deg,loss_db\n10,1\n"), ConfigError);
  EXPECT_THROW(EmpiricalCurve::FromCsv("elevation_deg,loss_db\n20,1\n10,2\n"),
               ConfigError);
  EXPECT_THROW(EmpiricalCurve::FromCsv("elevation_deg,loss_db\n10,x\n20,2\n"),
               ConfigError);
  EXPECT_THROW(EmpiricalCurve::Load("/nonexistent/curve.csv"), ConfigError);
}

TEST(EmpiricalCurveTest, ProfileCarriesOffsetAndBackground) {
  const EmpiricalCurve curve =
      EmpiricalCurve::FromCsv("elevation_deg,loss_db,background_cps\n0,60,900\n90,30,300\n");
  const orbit::PassGeometry pass = orbit::PassProfile(500.0, 60.0, 5.0);
  const LossProfile profile = ScaledEmpiricalProfile(curve, 2.0, pass);
  ASSERT_EQ(profile.samples.size(), pass.samples.size());
  for (size_t i = 0; i < pass.samples.size(); ++i) {
    const double el = pass.samples[i].elevation_deg;
    EXPECT_NEAR(profile.samples[i].loss_db, 60.0 - el / 3.0 + 2.0, 1e-9);
    EXPECT_NEAR(*profile.samples[i].background_cps, 900.0 - el * 600.0 / 90.0, 1e-9);
  }
  EXPECT_NEAR(profile.zenith_loss_db, 60.0 - 60.0 / 3.0 + 2.0, 0.05);
}

TEST(QuantizeTest, NearestLevelTiesGoUp) {
  const LossProfile profile = MakeLossProfile(
      {{0, 10, 29.0, {}}, {1, 20, 30.5, {}}, {2, 30, 31.9, {}}, {3, 40, 45.0, {}},
       {4, 50, 10.0, {}}});
  const std::vector<double> levels = {32.0, 30.0, 31.0};
  const LossProfile q = QuantizeProfile(profile, levels);
  EXPECT_EQ(q.samples[0].loss_db, 30.0);
  EXPECT_EQ(q.samples[1].loss_db, 31.0);
  EXPECT_EQ(q.samples[2].loss_db, 32.0);
  EXPECT_EQ(q.samples[3].loss_db, 32.0);
  EXPECT_EQ(q.samples[4].loss_db, 30.0);
  EXPECT_EQ(q.zenith_loss_db, 30.0);
  EXPECT_THROW(QuantizeProfile(profile, {}), DomainError);
}

TEST(DirectionTest, RoundTrip) {
  EXPECT_EQ(LinkDirectionFromString(ToString(LinkDirection::kUplink)),
            LinkDirection::kUplink);
  EXPECT_THROW(LinkDirectionFromString("sideways"), ConfigError);
}

}  // namespace
}  // namespace satqkd::link
