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

#include <fmt/format.h>

#include "satqkd/errors.h"

namespace satqkd::orbit {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kElevationToleranceDeg = 1e-6;

void RequireAltitude(double altitude_km) {
  if (!(altitude_km > 0.0) || !std::isfinite(altitude_km)) {
    throw DomainError("orbit",
                      fmt::format("altitude must be positive, got {}", altitude_km));
  }
}

}  // namespace

void GroundStation::Validate() const {
  if (!(min_elevation_deg >= 0.0 && min_elevation_deg < 90.0)) {
    throw ConfigError("orbit", fmt::format("horizon mask must lie in [0, 90), got {}",
                                           min_elevation_deg));
  }
}

double PassGeometry::duration_s() const {
  if (samples.size() < 2) return 0.0;
  return samples.back().time_s - samples.front().time_s;
}

double SlantRangeKm(double elevation_deg, double altitude_km) {
  RequireAltitude(altitude_km);
  if (!(elevation_deg >= 0.0 && elevation_deg <= 90.0)) {
    throw DomainError("orbit", fmt::format("elevation must lie in [0, 90], got {}",
                                           elevation_deg));
  }
  if (elevation_deg == 90.0) return altitude_km;
  const double orbit_radius = kEarthRadiusKm + altitude_km;
  const double el = elevation_deg * kDegToRad;
  const double cos_el = std::cos(el);
  return std::sqrt(orbit_radius * orbit_radius -
                   kEarthRadiusKm * kEarthRadiusKm * cos_el * cos_el) -
         kEarthRadiusKm * std::sin(el);
}

double ElevationFromCentralAngleDeg(double central_angle_rad,
                                    double altitude_km) {
  const double ratio = kEarthRadiusKm / (kEarthRadiusKm + altitude_km);
  return std::atan2(std::cos(central_angle_rad) - ratio,
                    std::sin(central_angle_rad)) /
         kDegToRad;
}

double OrbitalRateRadPerS(double altitude_km) {
  RequireAltitude(altitude_km);
  const double r = kEarthRadiusKm + altitude_km;
  return std::sqrt(kEarthGmKm3PerS2 / (r * r * r));
}

double CrossTrackOffsetRad(double altitude_km, double max_elevation_deg) {
  RequireAltitude(altitude_km);
  if (!(max_elevation_deg >= 0.0 && max_elevation_deg <= 90.0)) {
    throw DomainError("orbit", fmt::format("max elevation must lie in [0, 90], got {}",
                                           max_elevation_deg));
  }
  // Elevation at closest approach falls monotonically with the offset.
  double lo = 0.0;
  double hi = std::acos(kEarthRadiusKm / (kEarthRadiusKm + altitude_km));
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double el = ElevationFromCentralAngleDeg(mid, altitude_km);
    if (el > max_elevation_deg) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (std::abs(el - max_elevation_deg) < kElevationToleranceDeg * 1e-3) break;
  }
  return 0.5 * (lo + hi);
}

PassGeometry PassProfile(double altitude_km, double max_elevation_deg,
                         double time_step_s, double horizon_deg) {
  RequireAltitude(altitude_km);
  if (!(time_step_s > 0.0)) {
    throw DomainError("orbit", fmt::format("time step must be positive, got {}",
                                           time_step_s));
  }
  if (!(max_elevation_deg >= 0.0 && max_elevation_deg <= 90.0)) {
    throw DomainError("orbit", fmt::format("max elevation must lie in [0, 90], got {}",
                                           max_elevation_deg));
  }
  if (max_elevation_deg < horizon_deg) {
    throw DomainError("orbit", fmt::format("no pass: max elevation {} is below the "
                                           "horizon mask {}",
                                           max_elevation_deg, horizon_deg));
  }

  const double offset = CrossTrackOffsetRad(altitude_km, max_elevation_deg);
  const double rate = OrbitalRateRadPerS(altitude_km);
  const double orbit_radius = kEarthRadiusKm + altitude_km;
  const double ratio = kEarthRadiusKm / orbit_radius;

  // Elevation >= 0 while cos(offset) * cos(rate * t) >= Re / (Re + h).
  const double cos_limit = std::min(1.0, ratio / std::cos(offset));
  const double half_duration = std::acos(cos_limit) / rate;
  const long half_steps = static_cast<long>(std::floor(half_duration / time_step_s));

  PassGeometry pass;
  pass.altitude_km = altitude_km;
  pass.max_elevation_deg = max_elevation_deg;
  pass.samples.reserve(static_cast<size_t>(2 * half_steps + 1));
  for (long j = -half_steps; j <= half_steps; ++j) {
    const double t = static_cast<double>(j) * time_step_s;
    const double cos_central = std::cos(offset) * std::cos(rate * t);
    const double central = std::acos(std::clamp(cos_central, -1.0, 1.0));
    double elevation = j == 0 ? max_elevation_deg
                              : ElevationFromCentralAngleDeg(central, altitude_km);
    if (elevation < 0.0) continue;
    double range = std::sqrt(orbit_radius * orbit_radius +
                             kEarthRadiusKm * kEarthRadiusKm -
                             2.0 * orbit_radius * kEarthRadiusKm * cos_central);
    if (j == 0) range = SlantRangeKm(max_elevation_deg, altitude_km);
    range = std::max(range, altitude_km);
    pass.samples.push_back(
        {static_cast<double>(j + half_steps) * time_step_s, elevation, range});
  }
  return pass;
}

PassGeometry StationaryPass(double altitude_km, double elevation_deg,
                            double duration_s, double time_step_s) {
  if (!(time_step_s > 0.0) || !(duration_s >= 0.0)) {
    throw DomainError("orbit", "stationary pass needs positive step and duration");
  }
  const double range = SlantRangeKm(elevation_deg, altitude_km);
  PassGeometry pass;
  pass.altitude_km = altitude_km;
  pass.max_elevation_deg = elevation_deg;
  const long steps = static_cast<long>(std::floor(duration_s / time_step_s));
  for (long j = 0; j <= steps; ++j) {
    pass.samples.push_back({static_cast<double>(j) * time_step_s, elevation_deg, range});
  }
  return pass;
}

PassGeometry VisibleWindow(const PassGeometry& pass, double min_elevation_deg) {
  PassGeometry out;
  out.altitude_km = pass.altitude_km;
  out.max_elevation_deg = pass.max_elevation_deg;
  if (pass.samples.empty()) return out;
  const auto peak = std::max_element(
      pass.samples.begin(), pass.samples.end(),
      [](const PassSample& a, const PassSample& b) {
        return a.elevation_deg < b.elevation_deg;
      });
  if (peak->elevation_deg < min_elevation_deg) return out;
  auto first = peak;
  while (first != pass.samples.begin() &&
         std::prev(first)->elevation_deg >= min_elevation_deg) {
    --first;
  }
  auto last = std::next(peak);
  while (last != pass.samples.end() && last->elevation_deg >= min_elevation_deg) {
    ++last;
  }
  out.samples.assign(first, last);
  return out;
}

std::string PassToCsv(const PassGeometry& pass) {
  std::string out = "time_s,elevation_deg,slant_range_km\n";
  for (const auto& s : pass.samples) {
    out += fmt::format("{},{},{}\n", s.time_s, s.elevation_deg, s.slant_range_km);
  }
  return out;
}

}  // namespace satqkd::orbit
