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

#ifndef SATQKD_ERRORS_H_
#define SATQKD_ERRORS_H_

#include <stdexcept>
#include <string>
#include <utility>

namespace satqkd {

// Every error carries the name of the module that raised it so the CLI can
// report where a run failed.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& message)
      : std::runtime_error(module + ": " + message), module_(std::move(module)) {}

  const std::string& module() const { return module_; }

 private:
  std::string module_;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid or inconsistent configuration (maps to CLI exit status 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Failure while evaluating a model on otherwise valid input (exit status 2).
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace satqkd

#endif  // SATQKD_ERRORS_H_
