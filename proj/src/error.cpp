// Copyright 2026 The pintmg Authors
//
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

#include "pintmg/error.hpp"

namespace pintmg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSingularMatrix: return "SingularMatrix";
    case ErrorCode::kZeroPivot: return "ZeroPivot";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kDuplicateNodes: return "DuplicateNodes";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kCompatibilityViolated: return "CompatibilityViolated";
    case ErrorCode::kSingularPreconditioner: return "SingularPreconditioner";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace pintmg
