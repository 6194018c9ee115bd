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

#ifndef NPPKIT_PHRASE_EXTRACTION_H_
#define NPPKIT_PHRASE_EXTRACTION_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nppkit/treebank.h"

namespace nppkit {

enum class PhraseType { kNP = 0, kVP = 1, kPP = 2 };

inline constexpr std::array<PhraseType, 3> kPhraseTypes = {
    PhraseType::kNP, PhraseType::kVP, PhraseType::kPP};

std::string_view PhraseTypeName(PhraseType type);
std::optional<PhraseType> PhraseTypeFromLabel(std::string_view label);

struct PhraseSpan {
  PhraseType type;
  Span span;
  std::string text;

  friend bool operator==(const PhraseSpan &, const PhraseSpan &) = default;
};

// The per-sentence phrase sets, each in document order.
struct PhraseGroups {
  std::vector<PhraseSpan> np;
  std::vector<PhraseSpan> vp;
  std::vector<PhraseSpan> pp;

  const std::vector<PhraseSpan> &of(PhraseType type) const;
  std::vector<PhraseSpan> &of(PhraseType type);

  friend bool operator==(const PhraseGroups &, const PhraseGroups &) = default;
};

// Keeps, for each of NP, VP and PP, the lowest phrase nodes: those with no
// descendant (at any depth) of the same type. Phrases of one type are
// therefore pairwise disjoint; phrases of different types may nest.
PhraseGroups ExtractPhrases(const ConstituencyTree &tree);

struct PhraseGroup {
  PhraseType type;
  std::vector<PhraseSpan> phrases;
};

// Groups holding at least `min_size` phrases, in NP, VP, PP order.
// Throws Error(kInvalidArgument) when min_size is 0.
std::vector<PhraseGroup> EligibleGroups(const PhraseGroups &groups,
                                        size_t min_size);

}  // namespace nppkit

#endif  // NPPKIT_PHRASE_EXTRACTION_H_
