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

#include "satqkd/cli.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "satqkd/config.h"
#include "satqkd/errors.h"
#include "satqkd/missions.h"
#include "satqkd/optimize.h"

namespace satqkd::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void ReportError(std::ostream& err, std::string_view kind, std::string_view module,
                 std::string_view message) {
  err << json{{"error", kind}, {"module", module}, {"message", message}}.dump() << "\n";
}

std::string JoinArgs(int argc, const char* const* argv) {
  std::string line;
  for (int i = 0; i < argc; ++i) {
    if (i > 0) line += ' ';
    line += argv[i];
  }
  return line;
}

std::vector<double> DefaultElevations() {
  std::vector<double> out;
  for (int e = 10; e <= 90; e += 5) out.push_back(e);
  return out;
}

void AddCommon(CLI::App* sub, CommandSpec& spec, bool with_output) {
  sub->add_option("--config", spec.config_path, "Mission config JSON (or preset name)")
      ->required();
  sub->add_option("--override", spec.overrides, "Dotted key=value applied after loading")
      ->allow_extra_args(false);
  if (!with_output) return;
  sub->add_option("--out", spec.output_dir, "Output directory");
  sub->add_option("--seed", spec.seed, "Master seed (required for sampled counts)");
  sub->add_option("--format", spec.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
}

missions::MissionConfig LoadWithOverrides(const CommandSpec& spec) {
  auto config = missions::LoadConfig(spec.config_path);
  if (!spec.overrides.empty()) {
    auto doc = missions::ConfigToJson(config);
    for (const auto& o : spec.overrides) missions::ApplyOverride(doc, o);
    config = missions::ConfigFromJson(doc, config.base_dir);
  }
  config.Validate();
  return config;
}

void WriteStudy(const CommandSpec& spec, const missions::StudyResult& study,
                const std::string& stem) {
  fs::create_directories(spec.output_dir);
  const bool as_json = spec.format == "json";
  const auto path = fs::path(spec.output_dir) / (stem + (as_json ? ".json" : ".csv"));
  WriteFileAtomic(path.string(), as_json ? missions::StudyToJson(study).dump(2) + "\n"
                                         : missions::StudyToCsv(study));
}

std::string Metadata(const missions::Provenance& p) {
  return fmt::format("# mission: {}\n# config_hash: {}\n# seed: {}\n# version: {}\n# command: {}\n",
                     p.mission, p.config_hash, p.seed, p.tool_version, p.command_line);
}

int ExecuteChecked(const CommandSpec& spec, std::ostream& out) {
  const auto config = LoadWithOverrides(spec);
  if (spec.subcommand == "validate") {
    out << fmt::format("valid {} config_hash={}\n", config.name, missions::ConfigHash(config));
    return kExitOk;
  }
  if (config.count_mode == detect::CountMode::kSampled && !spec.seed.has_value()) {
    throw UsageError{kExitUsage, "--seed is required when count_mode is sampled"};
  }
  const std::uint64_t seed = spec.seed.value_or(0);
  missions::Provenance provenance{config.name, missions::ConfigHash(config), seed, kVersion,
                                  spec.command_line};

  missions::StudyResult study;
  std::string summary;
  if (spec.subcommand == "pass") {
    const auto outcome = missions::RunPassDetailed(config, spec.max_elevation_deg, 0.0,
                                                   missions::PointSeed(seed, 0));
    study = missions::PassStudy(config, spec.max_elevation_deg, seed);
    if (spec.write_trace) {
      fs::create_directories(spec.output_dir);
      WriteFileAtomic((fs::path(spec.output_dir) / "trace.csv").string(),
                      Metadata(provenance) + optimize::TraceToCsv(outcome.trace));
    }
    summary = fmt::format("{} pass {} deg: skl_bits={} qber={:.5f} raw_bits={:.0f}",
                          config.name, spec.max_elevation_deg, outcome.key.skl_bits,
                          outcome.key.qber, outcome.key.raw_bits);
  } else if (spec.subcommand == "sweep") {
    const auto elevations =
        spec.elevations_deg.empty() ? DefaultElevations() : spec.elevations_deg;
    study = missions::ElevationSweep(config, elevations, spec.offsets_db, seed);
    std::vector<std::string> cutoffs;
    auto offsets = spec.offsets_db;
    std::sort(offsets.begin(), offsets.end());
    offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
    for (const double o : offsets) {
      const auto c = missions::ZeroKeyCutoff(study, o);
      cutoffs.push_back(c ? fmt::format("+{}dB:{}deg", o, *c) : fmt::format("+{}dB:none", o));
    }
    summary = fmt::format("{} sweep: {} points, first keyed elevation {}", config.name,
                          study.records.size(), fmt::join(cutoffs, " "));
  } else if (spec.subcommand == "altitude") {
    auto altitudes = spec.altitudes_km;
    if (altitudes.empty()) altitudes = {300, 400, 500, 800, 1000, 2000, 5000, 10000, 20000};
    study = missions::AltitudeStudy(config, altitudes);
    summary = fmt::format("{} altitude: {} points, zenith loss {:.2f} dB to {:.2f} dB",
                          config.name, study.records.size(),
                          study.Value(0, "zenith_loss_db"),
                          study.Value(study.records.size() - 1, "zenith_loss_db"));
  } else if (spec.subcommand == "tradeoff") {
    auto apertures = spec.apertures_m;
    if (apertures.empty()) apertures = {0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0};
    auto pointing = spec.pointing_urad;
    if (pointing.empty()) pointing = {0.5, 1.0, 2.5, 5.0, 10.0};
    auto altitudes = spec.altitudes_km;
    if (altitudes.empty()) {
      altitudes = {500.0, missions::kRepresentativeMeoAltitudeKm, orbit::kGeostationaryAltitudeKm};
    }
    study = missions::TradeoffMap(config, apertures, pointing, altitudes);
    summary = fmt::format("{} tradeoff: {} cells", config.name, study.records.size());
  } else if (spec.subcommand == "accumulate") {
    auto altitudes = spec.altitudes_km;
    if (altitudes.empty()) {
      altitudes = {400, 500, 1000, 2000, 5000, 7000, 10000, 20000, 30000,
                   orbit::kGeostationaryAltitudeKm, 40000};
    }
    study = missions::AccumulationStudy(config, altitudes, spec.qber_cutoff, seed);
    if (spec.write_schedule) {
      std::string text = Metadata(provenance) + "altitude_km,day,max_elevation_deg\n";
      auto sorted = altitudes;
      std::sort(sorted.begin(), sorted.end());
      sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
      for (size_t i = 0; i < sorted.size(); ++i) {
        const auto schedule =
            missions::PassSchedule(sorted[i], config.schedule, missions::PointSeed(seed, i));
        for (const auto& p : schedule) {
          text += fmt::format("{},{},{}\n", sorted[i], p.day, p.max_elevation_deg);
        }
      }
      fs::create_directories(spec.output_dir);
      WriteFileAtomic((fs::path(spec.output_dir) / "schedule.csv").string(), text);
    }
    summary = fmt::format("{} accumulate: {} altitudes, QBER cutoff {}", config.name,
                          study.records.size(), spec.qber_cutoff);
  } else {
    throw UsageError{kExitUsage, fmt::format("unknown subcommand '{}'", spec.subcommand)};
  }
  study.provenance.command_line = spec.command_line;
  WriteStudy(spec, study, spec.subcommand);
  out << summary << "\n";
  return kExitOk;
}

}  // namespace

void WriteFileAtomic(const std::string& path, const std::string& contents) {
  const fs::path target(path);
  fs::path temp = target;
  temp += ".tmp";
  {
    std::ofstream file(temp, std::ios::binary | std::ios::trunc);
    if (!file) throw ModelError("cli", fmt::format("cannot write '{}'", temp.string()));
    file << contents;
    file.flush();
    if (!file) throw ModelError("cli", fmt::format("write to '{}' failed", temp.string()));
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp);
    throw ModelError("cli", fmt::format("cannot move '{}' into place: {}", path, ec.message()));
  }
}

ParseResult ParseArgs(int argc, const char* const* argv, std::ostream& out,
                      std::ostream& err) {
  CommandSpec spec;
  spec.command_line = JoinArgs(argc, argv);
  CLI::App app{"Finite-key secret key length simulator for satellite QKD missions", "satqkd"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);

  auto* pass = app.add_subcommand("pass", "Key length for one pass");
  AddCommon(pass, spec, true);
  pass->add_option("--max-elevation", spec.max_elevation_deg, "Pass maximum elevation [deg]")
      ->check(CLI::Range(0.0, 90.0));
  pass->add_flag("--trace", spec.write_trace, "Write the optimizer trace as trace.csv");

  auto* sweep = app.add_subcommand("sweep", "Key length over max elevation and loss offsets");
  AddCommon(sweep, spec, true);
  sweep->add_option("--elevations", spec.elevations_deg, "Comma-separated max elevations")
      ->delimiter(',');
  sweep->add_option("--offsets", spec.offsets_db, "Comma-separated extra losses [dB]")
      ->delimiter(',');

  auto* altitude = app.add_subcommand("altitude", "Zenith link loss against altitude");
  AddCommon(altitude, spec, true);
  altitude->add_option("--altitudes", spec.altitudes_km, "Comma-separated altitudes [km]")
      ->delimiter(',');

  auto* tradeoff = app.add_subcommand("tradeoff", "Zenith gain over aperture and pointing");
  AddCommon(tradeoff, spec, true);
  tradeoff->add_option("--apertures", spec.apertures_m, "Transmitter apertures [m]")
      ->delimiter(',');
  tradeoff->add_option("--pointing", spec.pointing_urad, "Pointing errors [urad]")
      ->delimiter(',');
  tradeoff->add_option("--altitudes", spec.altitudes_km, "Altitudes [km]")->delimiter(',');

  auto* accumulate = app.add_subcommand("accumulate", "One-year raw key accumulation");
  AddCommon(accumulate, spec, true);
  accumulate->add_option("--altitudes", spec.altitudes_km, "Altitudes [km]")->delimiter(',');
  accumulate->add_option("--cutoff", spec.qber_cutoff, "Per-pass QBER discard threshold")
      ->check(CLI::Range(0.0, 0.5));
  accumulate->add_flag("--schedule", spec.write_schedule, "Also write schedule.csv");

  auto* validate = app.add_subcommand("validate", "Check a config and print its hash");
  AddCommon(validate, spec, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return {std::nullopt, kExitOk};
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return {std::nullopt, kExitOk};
  } catch (const CLI::ParseError& e) {
    ReportError(err, "usage", "cli", e.what());
    return {std::nullopt, kExitUsage};
  }
  for (auto* sub : app.get_subcommands()) spec.subcommand = sub->get_name();
  return {spec, kExitOk};
}

int Execute(const CommandSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    return ExecuteChecked(spec, out);
  } catch (const UsageError& e) {
    ReportError(err, "usage", "cli", e.message);
    return e.exit_code;
  } catch (const ConfigError& e) {
    ReportError(err, "config", e.module(), e.what());
    return kExitUsage;
  } catch (const DomainError& e) {
    ReportError(err, "domain", e.module(), e.what());
    return kExitUsage;
  } catch (const Error& e) {
    ReportError(err, "model", e.module(), e.what());
    return kExitModel;
  } catch (const std::exception& e) {
    ReportError(err, "runtime", "cli", e.what());
    return kExitModel;
  }
}

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const auto parsed = ParseArgs(argc, argv, out, err);
  if (!parsed.spec) return parsed.exit_code;
  return Execute(*parsed.spec, out, err);
}

}  // namespace satqkd::cli
