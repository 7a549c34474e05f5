// Copyright 2026 The docgraph Authors.
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

#include "docgraph/error.h"

namespace docgraph {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedPenman: return "MalformedPenman";
    case ErrorCode::kDuplicateVariable: return "DuplicateVariable";
    case ErrorCode::kBadAlignment: return "BadAlignment";
    case ErrorCode::kMissingMetadata: return "MissingMetadata";
    case ErrorCode::kDuplicateSentence: return "DuplicateSentence";
    case ErrorCode::kInvalidGraph: return "InvalidGraph";
    case ErrorCode::kMissingEmbedding: return "MissingEmbedding";
    case ErrorCode::kUnknownSentence: return "UnknownSentence";
    case ErrorCode::kMissingContextEmbedding: return "MissingContextEmbedding";
    case ErrorCode::kNoGoldLabel: return "NoGoldLabel";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kEmptySegment: return "EmptySegment";
    case ErrorCode::kNoPositive: return "NoPositive";
    case ErrorCode::kNoLabeledTurns: return "NoLabeledTurns";
    case ErrorCode::kMissingGold: return "MissingGold";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kFormat: return "Format";
    case ErrorCode::kConfig: return "Config";
  }
  return "Unknown";
}

}  // namespace docgraph
