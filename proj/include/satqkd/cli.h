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

// Command-line surface: argument parsing and execution, kept in a library so
// both the satqkd binary and the tests drive the same code.
//
// Exit status: 0 success (a zero-length key is a result, not a failure),
// 1 usage or configuration error, 2 model or runtime error.

#ifndef SATQKD_CLI_H_
#define SATQKD_CLI_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "satqkd/missions.h"

namespace satqkd::cli {

inline constexpr const char* kVersion = missions::kToolVersion;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitModel = 2;

struct CommandSpec {
  std::string subcommand;  // pass | sweep | altitude | tradeoff | accumulate | validate
  std::string config_path;
  std::string output_dir = ".";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
  std::string command_line;

  double max_elevation_deg = 90.0;        // pass
  bool write_trace = false;               // pass
  std::vector<double> elevations_deg;     // sweep
  std::vector<double> offsets_db = {0.0}; // sweep
  std::vector<double> altitudes_km;       // altitude, tradeoff, accumulate
  std::vector<double> apertures_m;        // tradeoff
  std::vector<double> pointing_urad;      // tradeoff
  double qber_cutoff = 0.11;              // accumulate
  bool write_schedule = false;            // accumulate
};

// Raised for malformed command lines; carries the exit status to use.
struct UsageError {
  int exit_code = kExitUsage;
  std::string message;
};

struct ParseResult {
  std::optional<CommandSpec> spec;  // empty when help or version was printed
  int exit_code = kExitOk;
};

// Strict parsing: unknown flags and malformed values are usage errors,
// reported on `err` as one JSON line.
ParseResult ParseArgs(int argc, const char* const* argv, std::ostream& out,
                      std::ostream& err);

// Runs the command, writing artifacts under spec.output_dir and a one-line
// summary to `out`. Returns the exit status.
int Execute(const CommandSpec& spec, std::ostream& out, std::ostream& err);

// Parse then execute.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Writes `contents` to `path` through a temporary file and a rename.
void WriteFileAtomic(const std::string& path, const std::string& contents);

}  // namespace satqkd::cli

#endif  // SATQKD_CLI_H_
