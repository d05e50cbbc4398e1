// Copyright 2026 The otlaplace Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace otlaplace {

// Every failure raised by the library carries one of these codes. The CLI
// maps each code to a distinct process exit status (see exit_code()).
enum class Errc {
  kEmptyInput,
  kDimensionMismatch,
  kNonFiniteCoordinate,
  kInvalidSpec,
  kIoError,
  kParseError,
  kInconsistentPointCount,
  kSizeLimitExceeded,
  kUnsupportedShape,
  kZeroRowMass,
  kUnequalSizes,
  kIndexOutOfRange,
  kInvalidEpsilon,
  kInvalidKernel,
  kInvalidK,
  kDegenerateInput,
  kShapeMismatch,
  kInvalidExponent,
  kBoundaryPoint,
  kUnlabeledComponent,
  kSingularSystem,
  kIncompatibleGround,
  kDomainError,
  kBudgetExceeded,
  kConfigError,
};

std::string_view errc_name(Errc code) noexcept;

// Process exit status used by the CLI for a given error code. Success is 0,
// unknown failures are 1; library codes start at 10.
int exit_code(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace otlaplace
