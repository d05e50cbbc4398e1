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

#include "otlaplace/error.hpp"

namespace otlaplace {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::kEmptyInput: return "EmptyInput";
    case Errc::kDimensionMismatch: return "DimensionMismatch";
    case Errc::kNonFiniteCoordinate: return "NonFiniteCoordinate";
    case Errc::kInvalidSpec: return "InvalidSpec";
    case Errc::kIoError: return "IoError";
    case Errc::kParseError: return "ParseError";
    case Errc::kInconsistentPointCount: return "InconsistentPointCount";
    case Errc::kSizeLimitExceeded: return "SizeLimitExceeded";
    case Errc::kUnsupportedShape: return "UnsupportedShape";
    case Errc::kZeroRowMass: return "ZeroRowMass";
    case Errc::kUnequalSizes: return "UnequalSizes";
    case Errc::kIndexOutOfRange: return "IndexOutOfRange";
    case Errc::kInvalidEpsilon: return "InvalidEpsilon";
    case Errc::kInvalidKernel: return "InvalidKernel";
    case Errc::kInvalidK: return "InvalidK";
    case Errc::kDegenerateInput: return "DegenerateInput";
    case Errc::kShapeMismatch: return "ShapeMismatch";
    case Errc::kInvalidExponent: return "InvalidExponent";
    case Errc::kBoundaryPoint: return "BoundaryPoint";
    case Errc::kUnlabeledComponent: return "UnlabeledComponent";
    case Errc::kSingularSystem: return "SingularSystem";
    case Errc::kIncompatibleGround: return "IncompatibleGround";
    case Errc::kDomainError: return "DomainError";
    case Errc::kBudgetExceeded: return "BudgetExceeded";
    case Errc::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

int exit_code(Errc code) noexcept { return 10 + static_cast<int>(code); }

}  // namespace otlaplace
