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

#include "nppkit/phrase_extraction.h"

#include "nppkit/status.h"

namespace nppkit {
namespace {

using TypeMask = unsigned;

TypeMask Bit(PhraseType type) { return 1u << static_cast<unsigned>(type); }

// Returns the mask of phrase types present in the subtree rooted at `node`
// (itself included). Kept phrases are appended in left-to-right order, which
// is document order because same-type kept spans never nest.
TypeMask Collect(const ConstituencyTree &tree, const Node &node,
                 PhraseGroups &out) {
  TypeMask below = 0;
  for (const Node &child : node.children()) {
    below |= Collect(tree, child, out);
  }
  std::optional<PhraseType> type = PhraseTypeFromLabel(node.label());
  if (!type.has_value()) return below;
  if ((below & Bit(*type)) == 0) {
    out.of(*type).push_back(
        PhraseSpan{*type, node.span(), SpanText(tree, node.span())});
  }
  return below | Bit(*type);
}

}  // namespace

std::string_view PhraseTypeName(PhraseType type) {
  switch (type) {
    case PhraseType::kNP: return "NP";
    case PhraseType::kVP: return "VP";
    case PhraseType::kPP: return "PP";
  }
  return "?";
}

std::optional<PhraseType> PhraseTypeFromLabel(std::string_view label) {
  if (label == "NP") return PhraseType::kNP;
  if (label == "VP") return PhraseType::kVP;
  if (label == "PP") return PhraseType::kPP;
  return std::nullopt;
}

const std::vector<PhraseSpan> &PhraseGroups::of(PhraseType type) const {
  switch (type) {
    case PhraseType::kNP: return np;
    case PhraseType::kVP: return vp;
    case PhraseType::kPP: return pp;
  }
  return np;
}

std::vector<PhraseSpan> &PhraseGroups::of(PhraseType type) {
  return const_cast<std::vector<PhraseSpan> &>(
      static_cast<const PhraseGroups *>(this)->of(type));
}

PhraseGroups ExtractPhrases(const ConstituencyTree &tree) {
  PhraseGroups groups;
  Collect(tree, tree.root(), groups);
  return groups;
}

std::vector<PhraseGroup> EligibleGroups(const PhraseGroups &groups,
                                        size_t min_size) {
  if (min_size == 0) {
    throw Error(ErrorCode::kInvalidArgument, "min group size must be >= 1");
  }
  std::vector<PhraseGroup> eligible;
  for (PhraseType type : kPhraseTypes) {
    const auto &phrases = groups.of(type);
    if (!phrases.empty() && phrases.size() >= min_size) {
      eligible.push_back({type, phrases});
    }
  }
  return eligible;
}

}  // namespace nppkit
