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

// Optical link budget: loss in dB of a free-space quantum channel as a
// function of elevation, either from physical parameters or from an ingested
// empirical loss-vs-elevation curve.

#ifndef SATQKD_LINK_BUDGET_H_
#define SATQKD_LINK_BUDGET_H_

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "satqkd/orbit.h"

namespace satqkd::link {

enum class LinkDirection { kDownlink, kUplink };

std::string_view ToString(LinkDirection direction);
LinkDirection LinkDirectionFromString(std::string_view name);

struct OpticalChain {
  double tx_aperture_m = 0.1;
  double rx_aperture_m = 0.6;
  double wavelength_nm = 785.0;
  // Beam spread comes either from a direct divergence or from
  // (beam quality, waist-to-aperture ratio); never both.
  std::optional<double> beam_quality_m2;
  std::optional<double> waist_to_aperture_ratio;
  std::optional<double> divergence_urad;  // 1/e^2 half angle
  double pointing_jitter_urad = 0.0;      // RMS
  double atm_zenith_db = 0.0;
  double optics_db = 0.0;
  double detector_db = 0.0;
  // Constant that pins the computed zenith loss to a published set point.
  double calibration_db = 0.0;
  // Uplink only: extra turbulence (beam wander) loss at zenith, scaled by
  // airmass like the atmospheric term.
  double turbulence_penalty_db = 0.0;
  // Airmass is capped at its value at this elevation.
  double min_elevation_deg = 10.0;
  LinkDirection direction = LinkDirection::kDownlink;

  void Validate() const;
};

struct LossSample {
  double time_s = 0.0;
  double elevation_deg = 0.0;
  double loss_db = 0.0;
  // Per-elevation background override carried over from an empirical curve.
  std::optional<double> background_cps;
};

struct LossProfile {
  std::vector<LossSample> samples;
  double zenith_loss_db = 0.0;  // smallest loss in the profile

  bool empty() const { return samples.empty(); }
};

// Builds a profile and fills in its minimum loss.
LossProfile MakeLossProfile(std::vector<LossSample> samples);

struct CurveKnot {
  double elevation_deg = 0.0;
  double loss_db = 0.0;
  std::optional<double> background_cps;
};

// Empirical loss-vs-elevation curve, linearly interpolated between knots.
class EmpiricalCurve {
 public:
  EmpiricalCurve() = default;
  explicit EmpiricalCurve(std::vector<CurveKnot> knots);

  // CSV with header "elevation_deg,loss_db" and an optional third column
  // "background_cps". Lines starting with '#' are comments.
  static EmpiricalCurve FromCsv(std::string_view text);
  static EmpiricalCurve Load(const std::string& path);

  double LossDb(double elevation_deg) const;
  std::optional<double> BackgroundCps(double elevation_deg) const;

  double min_elevation_deg() const { return knots_.front().elevation_deg; }
  double max_elevation_deg() const { return knots_.back().elevation_deg; }
  const std::vector<CurveKnot>& knots() const { return knots_; }

 private:
  std::pair<size_t, double> Locate(double elevation_deg) const;

  std::vector<CurveKnot> knots_;
};

inline double DbToTransmittance(double loss_db) {
  return std::pow(10.0, -loss_db / 10.0);
}
inline double TransmittanceToDb(double transmittance) {
  return -10.0 * std::log10(transmittance);
}

// Beam half-angle divergence in microradians.
double DivergenceUrad(const OpticalChain& chain);

// Far-field Gaussian beam clipped by the receiver aperture.
double DiffractionLossDb(const OpticalChain& chain, double range_km);

// Jitter-averaged loss of a Gaussian beam with RMS pointing error.
double PointingLossDb(const OpticalChain& chain);

// Plane-parallel airmass scaling of the zenith attenuation.
double AtmosphericLossDb(const OpticalChain& chain, double elevation_deg);

double TotalLossDb(const OpticalChain& chain, double elevation_deg,
                   double altitude_km);

// Returns `chain` with calibration_db chosen so that the zenith loss at
// `altitude_km` equals `zenith_loss_db`. Throws ConfigError if that would
// need a negative calibration.
OpticalChain CalibrateToZenith(OpticalChain chain, double altitude_km,
                               double zenith_loss_db);

LossProfile LossProfileForPass(const OpticalChain& chain,
                               const orbit::PassGeometry& pass);

LossProfile ScaledEmpiricalProfile(const EmpiricalCurve& curve,
                                   double offset_db,
                                   const orbit::PassGeometry& pass);

// Replaces each loss with the nearest attenuator level (ties go to the
// larger loss).
LossProfile QuantizeProfile(const LossProfile& profile,
                            std::span<const double> attenuator_levels_db);

std::vector<std::pair<double, double>> ZenithLossVsAltitude(
    const OpticalChain& chain, std::span<const double> altitudes_km);

// CSV with header "time_s,elevation_deg,loss_db".
std::string LossProfileToCsv(const LossProfile& profile);

}  // namespace satqkd::link

#endif  // SATQKD_LINK_BUDGET_H_
