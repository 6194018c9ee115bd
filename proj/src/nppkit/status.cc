// Copyright 2026 The nppkit Authors.
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

#include "nppkit/status.h"

namespace nppkit {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kUnbalancedBrackets: return "UnbalancedBrackets";
    case ErrorCode::kEmptyConstituent: return "EmptyConstituent";
    case ErrorCode::kMalformedLabel: return "MalformedLabel";
    case ErrorCode::kMalformedTree: return "MalformedTree";
    case ErrorCode::kMoreChoicesThanLetters: return "MoreChoicesThanLetters";
    case ErrorCode::kRatioSumInvalid: return "RatioSumInvalid";
    case ErrorCode::kCountMismatch: return "CountMismatch";
    case ErrorCode::kSingleSegmentCorpus: return "SingleSegmentCorpus";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kConfig: return "Config";
    case ErrorCode::kContractViolation: return "ContractViolation";
  }
  return "Unknown";
}

void CheckContract(bool condition, std::string_view what) {
  if (!condition) {
    throw Error(ErrorCode::kContractViolation,
                "data contract violated: " + std::string(what));
  }
}

}  // namespace nppkit
