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

// Pass geometry for a circular orbit over a non-rotating spherical Earth.
//
// A pass is described by the orbital altitude and the peak elevation seen from
// the ground station. The ground track is offset from the station by a
// central angle chosen so that the peak elevation matches the request.

#ifndef SATQKD_ORBIT_H_
#define SATQKD_ORBIT_H_

#include <string>
#include <vector>

namespace satqkd::orbit {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kEarthGmKm3PerS2 = 398600.4418;
inline constexpr double kGeostationaryAltitudeKm = 35786.0;

struct GroundStation {
  double min_elevation_deg = 10.0;  // horizon mask

  void Validate() const;
};

struct PassSample {
  double time_s = 0.0;
  double elevation_deg = 0.0;
  double slant_range_km = 0.0;
};

struct PassGeometry {
  double altitude_km = 0.0;
  double max_elevation_deg = 0.0;
  std::vector<PassSample> samples;

  bool empty() const { return samples.empty(); }
  double duration_s() const;
};

// Line-of-sight distance from a ground station to a satellite at
// `altitude_km`, seen at `elevation_deg` above the horizon.
double SlantRangeKm(double elevation_deg, double altitude_km);

// Elevation at which a satellite at `altitude_km` appears when its
// sub-satellite point is `central_angle_rad` away from the station. Negative
// below the horizon.
double ElevationFromCentralAngleDeg(double central_angle_rad,
                                    double altitude_km);

// Orbital angular rate of a circular orbit (rad/s).
double OrbitalRateRadPerS(double altitude_km);

// Central angle between station and ground track that produces a pass peaking
// at `max_elevation_deg`. Solved by bisection to 1e-6 degrees of elevation.
double CrossTrackOffsetRad(double altitude_km, double max_elevation_deg);

// Samples a pass at `time_step_s` intervals. Samples are symmetric about the
// peak (which is sampled exactly) and truncated where elevation drops below
// zero. Throws DomainError("orbit") if the pass never clears `horizon_deg`.
PassGeometry PassProfile(double altitude_km, double max_elevation_deg,
                         double time_step_s, double horizon_deg = 0.0);

// A satellite fixed at `elevation_deg` for `duration_s` (geostationary case).
PassGeometry StationaryPass(double altitude_km, double elevation_deg,
                            double duration_s, double time_step_s);

// The contiguous run of samples with elevation >= `min_elevation_deg`. Empty
// if the peak is below the threshold.
PassGeometry VisibleWindow(const PassGeometry& pass, double min_elevation_deg);

// CSV with header "time_s,elevation_deg,slant_range_km".
std::string PassToCsv(const PassGeometry& pass);

}  // namespace satqkd::orbit

#endif  // SATQKD_ORBIT_H_
