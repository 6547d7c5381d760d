// Copyright 2026 The jdpopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef JDP_ERROR_HPP_
#define JDP_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jdp {

// Malformed input to an evaluation routine (wrong dimension, bad index,
// mismatched horizons).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Problem or experiment configuration that violates a stated assumption.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when the Slater point is not strictly feasible.
class SlaterError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Non-finite value detected during an iteration. `step()` is the iteration
// index at which the value appeared, when known.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, std::size_t step = kNoStep)
      : std::runtime_error(what), step_(step) {}

  static constexpr std::size_t kNoStep = static_cast<std::size_t>(-1);

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace jdp

#endif  // JDP_ERROR_HPP_
