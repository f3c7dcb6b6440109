// Copyright 2026 The CFL Authors.
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

#include "cfl/error.h"

namespace cfl {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnknownCategory: return "UnknownCategory";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kMissingTruth: return "MissingTruth";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kCardinalityCap: return "CardinalityCap";
    case ErrorCode::kInfeasibleKl: return "InfeasibleKL";
    case ErrorCode::kConfig: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace cfl
