// Copyright 2026 The MKA Authors.
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

#include "mka/error.hpp"

namespace mka {

const char* category_name(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kInvalidArgument: return "invalid-argument";
    case ErrorCategory::kNumeric: return "numeric";
    case ErrorCategory::kDegenerateGeometry: return "degenerate-geometry";
    case ErrorCategory::kInvalidModel: return "invalid-model";
    case ErrorCategory::kInsufficientCandidates: return "insufficient-candidates";
    case ErrorCategory::kEmptyPrototype: return "empty-prototype";
    case ErrorCategory::kTrainingDiverged: return "training-diverged";
    case ErrorCategory::kInvalidDepth: return "invalid-depth";
    case ErrorCategory::kFormat: return "format";
    case ErrorCategory::kIo: return "io";
    case ErrorCategory::kVocabulary: return "vocabulary";
    case ErrorCategory::kAlignment: return "alignment";
  }
  return "unknown";
}

}  // namespace mka
