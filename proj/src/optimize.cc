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

#include "satqkd/optimize.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <utility>

#include <fmt/format.h>

#include "satqkd/errors.h"

namespace satqkd::optimize {
namespace {

using detect::ProtocolParams;
using finitekey::KeyResult;

constexpr double kRejected = -std::numeric_limits<double>::infinity();

constexpr std::array<std::string_view, 6> kParameterNames = {
    "mu1", "mu2", "p1", "p2", "basis_prob", "window_fraction"};

double Get(const ProtocolParams& p, FreeParameter which) {
  switch (which) {
    case FreeParameter::kMu1: return p.intensities[0];
    case FreeParameter::kMu2: return p.intensities[1];
    case FreeParameter::kP1: return p.intensity_probs[0];
    case FreeParameter::kP2: return p.intensity_probs[1];
    case FreeParameter::kBasisProb: return p.basis_prob;
    case FreeParameter::kWindowFraction: return 1.0;
  }
  return 0.0;
}

void Set(ProtocolParams& p, FreeParameter which, double value) {
  switch (which) {
    case FreeParameter::kMu1: p.intensities[0] = value; break;
    case FreeParameter::kMu2: p.intensities[1] = value; break;
    case FreeParameter::kP1: p.intensity_probs[0] = value; break;
    case FreeParameter::kP2: p.intensity_probs[1] = value; break;
    case FreeParameter::kBasisProb: p.basis_prob = value; break;
    case FreeParameter::kWindowFraction: break;
  }
  if (which == FreeParameter::kP1 || which == FreeParameter::kP2) {
    p.intensity_probs[2] = 1.0 - p.intensity_probs[0] - p.intensity_probs[1];
  }
}

// Lexicographic: whole bits first, then the unfloored expression.
bool Better(const KeyResult& a, const KeyResult& b) {
  if (a.skl_bits != b.skl_bits) return a.skl_bits > b.skl_bits;
  return a.skl_real > b.skl_real;
}

int PeakIndex(const link::LossProfile& profile) {
  const auto it = std::max_element(
      profile.samples.begin(), profile.samples.end(),
      [](const auto& a, const auto& b) { return a.elevation_deg < b.elevation_deg; });
  return static_cast<int>(it - profile.samples.begin());
}

link::LossProfile Slice(const link::LossProfile& profile, int first, int last,
                        WindowCut* cut) {
  std::vector<link::LossSample> kept(profile.samples.begin() + first,
                                     profile.samples.begin() + last + 1);
  if (cut != nullptr) {
    double lowest = kept.front().elevation_deg;
    for (const auto& s : kept) lowest = std::min(lowest, s.elevation_deg);
    cut->threshold_deg = lowest;
    cut->fraction = static_cast<double>(kept.size()) /
                    static_cast<double>(profile.samples.size());
  }
  return link::MakeLossProfile(std::move(kept));
}

}  // namespace

std::string_view ToString(FreeParameter parameter) {
  return kParameterNames[static_cast<size_t>(parameter)];
}

FreeParameter FreeParameterFromString(std::string_view name) {
  for (size_t i = 0; i < kParameterNames.size(); ++i) {
    if (kParameterNames[i] == name) return static_cast<FreeParameter>(i);
  }
  throw ConfigError("optimize", fmt::format("unknown free parameter '{}'", name));
}

bool OptimizationSpec::IsFree(FreeParameter parameter) const {
  return std::find(free_parameters.begin(), free_parameters.end(), parameter) !=
         free_parameters.end();
}

void OptimizationSpec::Validate() const {
  for (const auto p : free_parameters) {
    const auto& b = bounds[static_cast<size_t>(p)];
    if (!(b.lower < b.upper)) {
      throw ConfigError("optimize", fmt::format("empty bounds for {}", ToString(p)));
    }
    const bool probability = p != FreeParameter::kMu1 && p != FreeParameter::kMu2;
    if (b.lower < 0.0 || (probability && b.upper > 1.0)) {
      throw ConfigError("optimize", fmt::format("bounds for {} out of range", ToString(p)));
    }
  }
  if (!(tolerance > 0.0) || max_evaluations < 1 || starts < 1 || window_thresholds < 2) {
    throw ConfigError("optimize", "tolerance, evaluation budget, starts or window grid invalid");
  }
}

link::LossProfile CutByFraction(const link::LossProfile& profile, double fraction,
                                WindowCut* cut) {
  if (profile.empty()) throw DomainError("optimize", "empty cut: profile has no samples");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw DomainError("optimize", fmt::format("window fraction {} outside (0, 1]", fraction));
  }
  const int total = static_cast<int>(profile.samples.size());
  const int wanted =
      std::clamp(static_cast<int>(std::ceil(fraction * total - 1e-9)), 1, total);
  int first = PeakIndex(profile);
  int last = first;
  while (last - first + 1 < wanted) {
    const bool can_left = first > 0;
    const bool can_right = last < total - 1;
    if (can_left && (!can_right || profile.samples[first - 1].elevation_deg >=
                                       profile.samples[last + 1].elevation_deg)) {
      --first;
    } else {
      ++last;
    }
  }
  return Slice(profile, first, last, cut);
}

link::LossProfile CutByThreshold(const link::LossProfile& profile,
                                 double threshold_deg, WindowCut* cut) {
  if (profile.empty()) throw DomainError("optimize", "empty cut: profile has no samples");
  const int peak = PeakIndex(profile);
  if (profile.samples[peak].elevation_deg < threshold_deg) {
    throw DomainError("optimize",
                      fmt::format("empty cut: threshold {} deg above the pass peak",
                                  threshold_deg));
  }
  int first = peak;
  int last = peak;
  const int total = static_cast<int>(profile.samples.size());
  while (first > 0 && profile.samples[first - 1].elevation_deg >= threshold_deg) --first;
  while (last < total - 1 && profile.samples[last + 1].elevation_deg >= threshold_deg) ++last;
  return Slice(profile, first, last, cut);
}

orbit::PassGeometry CutByThreshold(const orbit::PassGeometry& pass, double threshold_deg) {
  if (pass.empty() || pass.max_elevation_deg < threshold_deg) {
    throw DomainError("optimize", "empty cut: no pass samples above the threshold");
  }
  return orbit::VisibleWindow(pass, threshold_deg);
}

Objective MakeObjective(link::LinkDirection direction,
                        const finitekey::SecurityParams& sec, bool legacy) {
  return [direction, sec, legacy](const ProtocolParams& params,
                                  const link::LossProfile& profile) {
    if (params.protocol == detect::Protocol::kDecoyBb84) {
      const auto stats = detect::WcpBlockStats(params, profile);
      return finitekey::SklDecoyBb84(stats, params, sec);
    }
    const auto stats = detect::Bbm92BlockStats(params, profile, direction);
    KeyResult result = legacy ? finitekey::SklBbm92Legacy(stats, sec)
                              : finitekey::SklBbm92(stats, sec);
    result.params_used = params;
    return result;
  };
}

NelderMeadResult NelderMeadMaximize(
    const std::function<double(const std::vector<double>&)>& f,
    const std::function<bool(const std::vector<double>&)>& feasible,
    std::vector<double> start, const std::vector<double>& step, double tolerance,
    int max_evaluations) {
  const size_t dim = start.size();
  NelderMeadResult out;
  auto eval = [&](const std::vector<double>& x) {
    if (!feasible(x)) {
      ++out.rejected;
      return kRejected;
    }
    ++out.evaluations;
    return f(x);
  };

  std::vector<std::vector<double>> simplex{start};
  std::vector<double> values{eval(start)};
  for (size_t i = 0; i < dim; ++i) {
    std::vector<double> vertex = start;
    double h = step[i];
    for (int attempt = 0; attempt < 6; ++attempt) {
      vertex[i] = start[i] + h;
      if (feasible(vertex)) break;
      vertex[i] = start[i] - h;
      if (feasible(vertex)) break;
      h *= 0.5;
    }
    simplex.push_back(vertex);
    values.push_back(eval(vertex));
  }

  std::vector<size_t> order(dim + 1);
  double cycle_best = kRejected;
  int iteration = 0;
  while (out.evaluations < max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return values[a] > values[b]; });
    const size_t best = order.front();
    const size_t worst = order.back();
    const size_t second_worst = order[dim - 1];

    if (iteration % static_cast<int>(dim + 1) == 0) {
      const double b = values[best];
      if (std::isfinite(cycle_best) && std::isfinite(b) &&
          b - cycle_best <= tolerance * std::max(std::abs(b), 1.0)) {
        double spread = 0.0;
        for (size_t v = 0; v <= dim; ++v) {
          if (std::isfinite(values[v])) spread = std::max(spread, b - values[v]);
        }
        if (spread <= tolerance * std::max(std::abs(b), 1.0)) break;
      }
      cycle_best = b;
    }
    ++iteration;

    std::vector<double> centroid(dim, 0.0);
    for (size_t v = 0; v <= dim; ++v) {
      if (v == worst) continue;
      for (size_t i = 0; i < dim; ++i) centroid[i] += simplex[v][i] / dim;
    }
    auto along = [&](double t) {
      std::vector<double> x(dim);
      for (size_t i = 0; i < dim; ++i) {
        x[i] = centroid[i] + t * (simplex[worst][i] - centroid[i]);
      }
      return x;
    };

    const auto reflected = along(-1.0);
    const double fr = eval(reflected);
    if (fr > values[best]) {
      const auto expanded = along(-2.0);
      const double fe = eval(expanded);
      if (fe > fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr > values[second_worst]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr > values[worst];
    const auto contracted = along(outside ? -0.5 : 0.5);
    const double fc = eval(contracted);
    if (fc > std::max(fr, values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    bool moved = false;
    for (size_t v = 0; v <= dim; ++v) {
      if (v == best) continue;
      for (size_t i = 0; i < dim; ++i) {
        simplex[v][i] = simplex[best][i] + 0.5 * (simplex[v][i] - simplex[best][i]);
      }
      values[v] = eval(simplex[v]);
      moved = true;
    }
    double size = 0.0;
    for (size_t v = 0; v <= dim; ++v) {
      for (size_t i = 0; i < dim; ++i) {
        size = std::max(size, std::abs(simplex[v][i] - simplex[best][i]) /
                                  std::max(step[i], 1e-300));
      }
    }
    if (!moved || size < 1e-6) break;
  }
  const auto it = std::max_element(values.begin(), values.end());
  out.best_x = simplex[it - values.begin()];
  out.best_value = *it;
  return out;
}

OptimizationResult OptimizeSkl(const link::LossProfile& profile,
                               const ProtocolParams& params_template,
                               const Objective& objective,
                               const OptimizationSpec& spec) {
  spec.Validate();
  params_template.Validate();
  if (profile.empty()) throw DomainError("optimize", "empty loss profile");

  std::vector<FreeParameter> continuous;
  for (const auto p : spec.free_parameters) {
    if (p != FreeParameter::kWindowFraction &&
        std::find(continuous.begin(), continuous.end(), p) == continuous.end()) {
      continuous.push_back(p);
    }
  }
  if (!continuous.empty() && params_template.protocol != detect::Protocol::kDecoyBb84) {
    throw ConfigError("optimize", "only the window is free for BBM92");
  }

  std::vector<double> thresholds;
  {
    double lo = profile.samples.front().elevation_deg;
    double hi = lo;
    for (const auto& s : profile.samples) {
      lo = std::min(lo, s.elevation_deg);
      hi = std::max(hi, s.elevation_deg);
    }
    if (spec.IsFree(FreeParameter::kWindowFraction) && hi > lo) {
      const int count = spec.window_thresholds;
      for (int i = 0; i < count; ++i) thresholds.push_back(lo + (hi - lo) * i / (count - 1));
    } else {
      thresholds.push_back(lo);
    }
  }

  OptimizationResult out;
  bool have_best = false;
  auto params_at = [&](const std::vector<double>& x) {
    ProtocolParams p = params_template;
    for (size_t i = 0; i < continuous.size(); ++i) Set(p, continuous[i], x[i]);
    return p;
  };
  auto feasible = [&](const std::vector<double>& x) {
    for (size_t i = 0; i < continuous.size(); ++i) {
      const auto& b = spec.bounds[static_cast<size_t>(continuous[i])];
      if (!(x[i] >= b.lower && x[i] <= b.upper)) return false;
    }
    try {
      params_at(x).Validate();
    } catch (const ConfigError&) {
      return false;
    }
    return true;
  };

  std::vector<double> x0(continuous.size());
  std::vector<double> step(continuous.size());
  for (size_t i = 0; i < continuous.size(); ++i) {
    const auto& b = spec.bounds[static_cast<size_t>(continuous[i])];
    x0[i] = std::clamp(Get(params_template, continuous[i]), b.lower, b.upper);
    step[i] = 0.1 * (b.upper - b.lower);
  }
  std::mt19937_64 rng(spec.seed);
  std::vector<double> best_x = x0;

  for (size_t t = 0; t < thresholds.size(); ++t) {
    WindowCut cut;
    const auto window = CutByThreshold(profile, thresholds[t], &cut);
    auto record = [&](const ProtocolParams& p) {
      KeyResult r = objective(p, window);
      TraceRow row;
      row.index = static_cast<int>(out.trace.size());
      row.threshold_deg = cut.threshold_deg;
      row.values = {p.intensities[0], p.intensities[1], p.intensity_probs[0],
                    p.intensity_probs[1], p.basis_prob};
      row.skl_real = r.skl_real;
      row.skl_bits = r.skl_bits;
      out.trace.push_back(row);
      ++out.evaluations;
      if (!have_best || Better(r, out.result)) {
        have_best = true;
        r.params_used = p;
        out.result = r;
        out.best_params = p;
        out.best_window = cut;
      }
      return r;
    };

    if (continuous.empty()) {
      record(params_template);
      continue;
    }

    std::vector<std::vector<double>> starts{best_x};
    if (t == 0) {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (int s = 1; s < spec.starts; ++s) {
        for (int attempt = 0; attempt < 1000; ++attempt) {
          std::vector<double> x(continuous.size());
          for (size_t i = 0; i < x.size(); ++i) {
            const auto& b = spec.bounds[static_cast<size_t>(continuous[i])];
            x[i] = b.lower + (b.upper - b.lower) * unit(rng);
          }
          if (feasible(x)) {
            starts.push_back(std::move(x));
            break;
          }
        }
      }
    }

    const int remaining_runs =
        static_cast<int>(thresholds.size() - t - 1) + static_cast<int>(starts.size());
    for (const auto& start : starts) {
      if (!feasible(start)) continue;
      const int budget = std::max(
          4 * static_cast<int>(continuous.size() + 1),
          (spec.max_evaluations - out.evaluations) / std::max(remaining_runs, 1));
      const auto nm = NelderMeadMaximize(
          [&](const std::vector<double>& x) { return record(params_at(x)).skl_real; },
          feasible, start, step, spec.tolerance, budget);
      out.rejected += nm.rejected;
      if (have_best) {
        for (size_t i = 0; i < continuous.size(); ++i) {
          best_x[i] = Get(out.best_params, continuous[i]);
        }
      }
    }
  }

  if (!have_best || out.result.skl_bits <= 0) {
    throw NoPositiveKeyError(std::move(out));
  }
  return out;
}

OptimizationResult OptimizeSkl(const link::OpticalChain& chain,
                               const orbit::PassGeometry& pass,
                               const ProtocolParams& params_template,
                               const finitekey::SecurityParams& sec,
                               const OptimizationSpec& spec) {
  chain.Validate();
  const auto visible = orbit::VisibleWindow(pass, chain.min_elevation_deg);
  const auto profile = link::LossProfileForPass(chain, visible);
  return OptimizeSkl(profile, params_template, MakeObjective(chain.direction, sec), spec);
}

std::string TraceToCsv(const std::vector<TraceRow>& trace) {
  std::string out = "index,threshold_deg,mu1,mu2,p1,p2,basis_prob,skl_real,skl_bits\n";
  for (const auto& r : trace) {
    out += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n",
                       r.index, r.threshold_deg, r.values[0], r.values[1], r.values[2],
                       r.values[3], r.values[4], r.skl_real, r.skl_bits);
  }
  return out;
}

}  // namespace satqkd::optimize
