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

#ifndef NPPKIT_STATUS_H_
#define NPPKIT_STATUS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace nppkit {

// Failure categories shared by every module. The C API maps these one-to-one
// onto npp_status values.
enum class ErrorCode {
  kInvalidArgument,
  kUnbalancedBrackets,
  kEmptyConstituent,
  kMalformedLabel,
  kMalformedTree,
  kMoreChoicesThanLetters,
  kRatioSumInvalid,
  kCountMismatch,
  kSingleSegmentCorpus,
  kIo,
  kConfig,
  kContractViolation,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Throws Error(kContractViolation) when `condition` is false.
void CheckContract(bool condition, std::string_view what);

}  // namespace nppkit

#endif  // NPPKIT_STATUS_H_
