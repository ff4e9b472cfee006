//
// Copyright 2026 The dplearn Authors
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
//

#ifndef DPLEARN_ERRORS_HPP_
#define DPLEARN_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace dplearn {

// Parameter errors use std::invalid_argument. The classes below separate the
// two failure modes the CLI maps to dedicated exit codes.

/// Invalid experiment/CLI configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A required binomial tail-probability gap is not achievable for the given
/// (m, p, q) triple (exit code 3).
class InfeasibilityError : public std::runtime_error {
 public:
  InfeasibilityError(const std::string& what, double achieved, double required)
      : std::runtime_error(what), achieved_gap(achieved), required_gap(required) {}

  double achieved_gap;
  double required_gap;
};

/// A mechanism would overdraw its privacy budget (exit code 4).
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dplearn

#endif  // DPLEARN_ERRORS_HPP_
