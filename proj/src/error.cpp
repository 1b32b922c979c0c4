// Copyright 2026 The k3dyn Authors.
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

#include "k3dyn/error.hpp"

namespace k3dyn {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInput: return "InputError";
    case ErrorCode::kDegenerateFiberLine: return "DegenerateFiberLine";
    case ErrorCode::kAllPartialsVanish: return "AllPartialsVanish";
    case ErrorCode::kLostPoint: return "LostPoint";
    case ErrorCode::kCountAmbiguous: return "CountAmbiguous";
    case ErrorCode::kNoSolution: return "NoSolution";
    case ErrorCode::kNonUnique: return "NonUnique";
    case ErrorCode::kSameFixedRay: return "SameFixedRay";
    case ErrorCode::kNotATranslation: return "NotATranslation";
    case ErrorCode::kNotParabolic: return "NotParabolic";
    case ErrorCode::kNotInvariant: return "NotInvariant";
    case ErrorCode::kPoleAtOrigin: return "PoleAtOrigin";
    case ErrorCode::kBadSignPattern: return "BadSignPattern";
    case ErrorCode::kEpsilonTooLarge: return "EpsilonTooLarge";
    case ErrorCode::kInsufficientScaling: return "InsufficientScaling";
    case ErrorCode::kClusterCountMismatch: return "ClusterCountMismatch";
  }
  return "Unknown";
}

}  // namespace k3dyn
