/*
Copyright 2026 The gfl Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace gfl {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input text (TU files, config files). Carries source + line.
struct ParseError : Error {
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what) {}
  explicit ParseError(const std::string& what) : Error(what) {}
};

/// Well-formed input describing an impossible structure (cross-graph edge,
/// self-loop, dangling node id).
struct StructuralError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

/// A class has fewer members than requested folds.
struct StratificationError : Error {
  using Error::Error;
};

/// Non-finite value where a finite one is required.
struct NumericError : Error {
  using Error::Error;
};

/// Value outside the domain a downstream mapping presumes.
struct DomainError : Error {
  using Error::Error;
};

}  // namespace gfl
