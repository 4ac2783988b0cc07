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

// Protocol-parameter and transmission-window optimization.
//
// The window is an elevation threshold around the pass peak, scanned over a
// fixed grid outside a Nelder-Mead search on the continuous parameters. The
// simplex starts from the template and from a few seeded random feasible
// points at the first threshold; later thresholds warm-start from the best
// point found so far. Infeasible candidates are rejected, never projected.

#ifndef SATQKD_OPTIMIZE_H_
#define SATQKD_OPTIMIZE_H_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "satqkd/detection.h"
#include "satqkd/errors.h"
#include "satqkd/finite_key.h"
#include "satqkd/link_budget.h"
#include "satqkd/orbit.h"

namespace satqkd::optimize {

enum class FreeParameter { kMu1, kMu2, kP1, kP2, kBasisProb, kWindowFraction };

std::string_view ToString(FreeParameter parameter);
FreeParameter FreeParameterFromString(std::string_view name);

struct ParameterBounds {
  double lower = 0.0;
  double upper = 1.0;
};

struct OptimizationSpec {
  std::vector<FreeParameter> free_parameters;
  // Indexed by FreeParameter; only entries of free parameters matter.
  std::array<ParameterBounds, 6> bounds = {{{0.05, 1.0},
                                            {0.005, 0.5},
                                            {0.05, 0.95},
                                            {0.02, 0.9},
                                            {0.5, 0.99},
                                            {0.0, 1.0}}};
  double tolerance = 1e-4;     // relative improvement per refinement cycle
  int max_evaluations = 4000;  // objective evaluations in total
  int starts = 5;
  int window_thresholds = 64;
  std::uint64_t seed = 0;

  bool IsFree(FreeParameter parameter) const;
  void Validate() const;
};

struct WindowCut {
  double threshold_deg = 0.0;  // lowest elevation kept
  double fraction = 1.0;       // share of the samples kept
};

// Keeps the contiguous highest-elevation run holding `fraction` of the
// samples. DomainError on an empty profile or fraction outside (0, 1].
link::LossProfile CutByFraction(const link::LossProfile& profile, double fraction,
                                WindowCut* cut = nullptr);
// Keeps every sample at or above `threshold_deg`. DomainError when the
// threshold lies above the pass peak.
link::LossProfile CutByThreshold(const link::LossProfile& profile,
                                 double threshold_deg, WindowCut* cut = nullptr);
orbit::PassGeometry CutByThreshold(const orbit::PassGeometry& pass,
                                   double threshold_deg);

using Objective = std::function<finitekey::KeyResult(
    const detect::ProtocolParams&, const link::LossProfile&)>;

// Standard objective: block statistics in expected mode, then the key length
// for the protocol. BBM92 honours `legacy`.
Objective MakeObjective(link::LinkDirection direction,
                        const finitekey::SecurityParams& sec, bool legacy = false);

struct TraceRow {
  int index = 0;
  double threshold_deg = 0.0;
  std::array<double, 5> values{};  // mu1, mu2, p1, p2, basis_prob
  double skl_real = 0.0;
  std::int64_t skl_bits = 0;
};

struct OptimizationResult {
  detect::ProtocolParams best_params;
  WindowCut best_window;
  finitekey::KeyResult result;
  int evaluations = 0;
  int rejected = 0;
  std::vector<TraceRow> trace;
};

// Raised when no evaluated point yields a positive key; carries the search
// record so callers can still report the zero-key optimum.
class NoPositiveKeyError : public ModelError {
 public:
  explicit NoPositiveKeyError(OptimizationResult partial)
      : ModelError("optimize", "no feasible point yields a positive key"),
        partial_(std::move(partial)) {}
  const OptimizationResult& partial() const { return partial_; }

 private:
  OptimizationResult partial_;
};

// Maximizes the key length over the free parameters.
OptimizationResult OptimizeSkl(const link::LossProfile& profile,
                               const detect::ProtocolParams& params_template,
                               const Objective& objective,
                               const OptimizationSpec& spec);

OptimizationResult OptimizeSkl(const link::OpticalChain& chain,
                               const orbit::PassGeometry& pass,
                               const detect::ProtocolParams& params_template,
                               const finitekey::SecurityParams& sec,
                               const OptimizationSpec& spec);

std::string TraceToCsv(const std::vector<TraceRow>& trace);

// Derivative-free maximization over a box. Points outside `feasible` are
// rejected without evaluating `f`.
struct NelderMeadResult {
  std::vector<double> best_x;
  double best_value = 0.0;
  int evaluations = 0;
  int rejected = 0;
};

NelderMeadResult NelderMeadMaximize(
    const std::function<double(const std::vector<double>&)>& f,
    const std::function<bool(const std::vector<double>&)>& feasible,
    std::vector<double> start, const std::vector<double>& step, double tolerance,
    int max_evaluations);

}  // namespace satqkd::optimize

#endif  // SATQKD_OPTIMIZE_H_
