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

#ifndef DOCGRAPH_ERROR_H_
#define DOCGRAPH_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace docgraph {

enum class ErrorCode {
  kMalformedPenman,
  kDuplicateVariable,
  kBadAlignment,
  kMissingMetadata,
  kDuplicateSentence,
  kInvalidGraph,
  kMissingEmbedding,
  kUnknownSentence,
  kMissingContextEmbedding,
  kNoGoldLabel,
  kShapeMismatch,
  kNonFinite,
  kEmptySegment,
  kNoPositive,
  kNoLabeledTurns,
  kMissingGold,
  kIo,
  kFormat,
  kConfig,
};

std::string_view error_code_name(ErrorCode code);

// All library failures are reported with this exception. The code lets
// callers (the CLI in particular) map failures to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace docgraph

#endif  // DOCGRAPH_ERROR_H_
