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

#include "satqkd/orbit.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>
#include "satqkd/errors.h"

namespace satqkd::orbit {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Brute-force geometry: walk along the line of sight from a ground point on a
// spherical Earth until the distance from the Earth centre reaches the orbit
// radius.
double RangeByRayMarch(double elevation_deg, double altitude_km) {
  const double gx = 0.0, gy = kEarthRadiusKm;
  const double ux = std::cos(elevation_deg * kDeg);
  const double uy = std::sin(elevation_deg * kDeg);
  const double r = kEarthRadiusKm + altitude_km;
  double lo = 0.0, hi = 4.0 * r;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double x = gx + mid * ux, y = gy + mid * uy;
    if (std::hypot(x, y) < r) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

TEST(SlantRangeTest, MatchesRayMarch) {
  for (double h : {300.0, 500.0, 600.0, 2000.0, 7000.0, kGeostationaryAltitudeKm}) {
    for (double el = 5.0; el <= 90.0; el += 5.0) {
      EXPECT_NEAR(SlantRangeKm(el, h), RangeByRayMarch(el, h), 1e-6 * h)
          << "el=" << el << " h=" << h;
    }
  }
}

TEST(SlantRangeTest, LowElevationLeo) {
  // Frozen from the ray-march oracle above.
  EXPECT_NEAR(SlantRangeKm(10.0, 500.0), 1694.567, 1e-3);
  EXPECT_NEAR(RangeByRayMarch(10.0, 500.0), 1694.567, 1e-3);
}

TEST(SlantRangeTest, ZenithIsAltitude) {
  for (double h : {100.0, 500.0, 7000.0, kGeostationaryAltitudeKm}) {
    EXPECT_DOUBLE_EQ(SlantRangeKm(90.0, h), h);
  }
}

TEST(SlantRangeTest, DecreasesWithElevation) {
  double prev = SlantRangeKm(0.0, 500.0);
  for (double el = 1.0; el <= 90.0; el += 1.0) {
    const double r = SlantRangeKm(el, 500.0);
    EXPECT_LT(r, prev);
    prev = r;
  }
}

TEST(SlantRangeTest, RejectsBadInput) {
  EXPECT_THROW(SlantRangeKm(-1.0, 500.0), DomainError);
  EXPECT_THROW(SlantRangeKm(91.0, 500.0), DomainError);
  EXPECT_THROW(SlantRangeKm(45.0, -10.0), DomainError);
}

TEST(OrbitalRateTest, KeplerPeriod) {
  // 500 km over a 6371 km sphere: 94.47 minutes.
  const double period_s = 2.0 * std::numbers::pi / OrbitalRateRadPerS(500.0);
  EXPECT_NEAR(period_s / 60.0, 94.47, 0.01);
  // Geostationary altitude is quoted above the equatorial radius, so the mean
  // sphere comes out some 20 s short of a sidereal day.
  const double geo_s = 2.0 * std::numbers::pi / OrbitalRateRadPerS(kGeostationaryAltitudeKm);
  EXPECT_NEAR(geo_s, 86164.0, 30.0);
}

TEST(CentralAngleTest, InvertsSlantRange) {
  // Law of cosines closes the triangle centre-station-satellite.
  for (double psi = 0.0; psi < 0.3; psi += 0.01) {
    const double el = ElevationFromCentralAngleDeg(psi, 500.0);
    if (el < 0.0) break;
    const double r = SlantRangeKm(el, 500.0);
    const double a = kEarthRadiusKm, b = kEarthRadiusKm + 500.0;
    EXPECT_NEAR(r * r, a * a + b * b - 2 * a * b * std::cos(psi), 1e-6 * r * r);
  }
}

TEST(PassProfileTest, Invariants) {
  for (double h : {400.0, 500.0, 1000.0}) {
    for (double max_el : {15.0, 30.0, 60.0, 88.0, 90.0}) {
      const PassGeometry pass = PassProfile(h, max_el, 1.0);
      ASSERT_GT(pass.samples.size(), 10u);
      size_t peak = 0;
      for (size_t i = 0; i < pass.samples.size(); ++i) {
        const PassSample& s = pass.samples[i];
        EXPECT_GE(s.elevation_deg, -1e-9);
        EXPECT_LE(s.elevation_deg, max_el + 1e-9);
        EXPECT_GE(s.slant_range_km, h - 1e-9);
        EXPECT_NEAR(s.slant_range_km, SlantRangeKm(s.elevation_deg, h), 1e-6 * h);
        if (i > 0) EXPECT_GT(s.time_s, pass.samples[i - 1].time_s);
        if (s.elevation_deg > pass.samples[peak].elevation_deg) peak = i;
      }
      EXPECT_NEAR(pass.samples[peak].elevation_deg, max_el, 0.05);
      // Unimodal: rising to the peak, falling after it.
      for (size_t i = 1; i <= peak; ++i) {
        EXPECT_GE(pass.samples[i].elevation_deg, pass.samples[i - 1].elevation_deg);
      }
      for (size_t i = peak + 1; i < pass.samples.size(); ++i) {
        EXPECT_LE(pass.samples[i].elevation_deg, pass.samples[i - 1].elevation_deg);
      }
    }
  }
}

TEST(PassProfileTest, ZenithPassDuration) {
  // Overhead pass from horizon to horizon sweeps a central angle of
  // 2 acos(Re / (Re + h)); the rotation of the Earth is neglected.
  const double h = 500.0;
  const double a = kEarthRadiusKm + h;
  const double omega = std::sqrt(kEarthGmKm3PerS2 / (a * a * a));
  const double expected = 2.0 * std::acos(kEarthRadiusKm / a) / omega;
  const PassGeometry pass = PassProfile(h, 90.0, 1.0);
  EXPECT_NEAR(pass.duration_s(), expected, 2.0);
}

TEST(PassProfileTest, LowerPeakIsShorter) {
  EXPECT_LT(PassProfile(500.0, 30.0, 1.0).duration_s(),
            PassProfile(500.0, 80.0, 1.0).duration_s());
}

TEST(PassProfileTest, PeakBelowHorizonThrows) {
  EXPECT_THROW(PassProfile(500.0, 5.0, 1.0, 10.0), DomainError);
  EXPECT_THROW(PassProfile(500.0, 60.0, 0.0), DomainError);
}

TEST(StationaryPassTest, ConstantGeometry) {
  const PassGeometry pass = StationaryPass(kGeostationaryAltitudeKm, 90.0, 3600.0, 60.0);
  ASSERT_EQ(pass.samples.size(), 61u);
  for (const PassSample& s : pass.samples) {
    EXPECT_EQ(s.elevation_deg, 90.0);
    EXPECT_DOUBLE_EQ(s.slant_range_km, kGeostationaryAltitudeKm);
  }
  EXPECT_DOUBLE_EQ(pass.duration_s(), 3600.0);
}

TEST(VisibleWindowTest, DropsSamplesBelowMask) {
  const PassGeometry pass = PassProfile(500.0, 60.0, 1.0);
  const PassGeometry visible = VisibleWindow(pass, 20.0);
  ASSERT_FALSE(visible.empty());
  EXPECT_LT(visible.samples.size(), pass.samples.size());
  for (const PassSample& s : visible.samples) EXPECT_GE(s.elevation_deg, 20.0);
  EXPECT_TRUE(VisibleWindow(pass, 61.0).empty());
}

TEST(PassToCsvTest, HeaderAndRows) {
  const PassGeometry pass = StationaryPass(kGeostationaryAltitudeKm, 45.0, 60.0, 30.0);
  const std::string csv = PassToCsv(pass);
  EXPECT_EQ(csv.rfind("time_s,elevation_deg,slant_range_km\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

}  // namespace
}  // namespace satqkd::orbit
