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

#ifndef NPPKIT_INSTANCE_BUILDER_H_
#define NPPKIT_INSTANCE_BUILDER_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nppkit/phrase_extraction.h"
#include "nppkit/random.h"
#include "nppkit/treebank.h"

namespace nppkit {

enum class SkipReason {
  kNoEligibleGroup,
  kAnswerAtSentenceStart,
  kPoolTooSmall,
  kMalformedTree,
  // Group larger than the lettered template can enumerate.
  kMoreChoicesThanLetters,
};

std::string_view SkipReasonName(SkipReason reason);

struct Skip {
  SkipReason reason;
  friend bool operator==(const Skip &, const Skip &) = default;
};

template <typename T>
using BuildResult = std::variant<T, Skip>;

// One next-phrase-prediction question.
struct NppInstance {
  std::string sentence_id;
  PhraseType phrase_type = PhraseType::kNP;
  std::vector<std::string> partial_query;  // tokens[0, answer_span.start)
  std::vector<std::string> choices;        // every phrase of the group
  std::vector<Span> choice_spans;          // parallel to `choices`
  size_t answer_index = 0;

  const std::string &answer() const { return choices[answer_index]; }
  const Span &answer_span() const { return choice_spans[answer_index]; }
};

// Builds at most one instance for a sentence. Draws, in order: one eligible
// group uniformly (among eligible groups holding at least one phrase that
// does not start the sentence), one such phrase uniformly, then a shuffle of
// the group's phrases into the choice list.
BuildResult<NppInstance> BuildNppInstance(const ConstituencyTree &tree,
                                          const PhraseGroups &groups,
                                          std::string_view sentence_id,
                                          Rng &rng, size_t min_size);

// Checks the structural invariants of an instance against its tree; throws
// Error(kContractViolation) on failure.
void VerifyNppInstance(const NppInstance &instance,
                       const ConstituencyTree &tree, size_t min_size);

inline constexpr std::string_view kNextPhrasePrefix = "generate next phrase:";
inline constexpr std::string_view kNextSentencePrefix =
    "generate next sentence:";

// Options are lettered (A) to (Z).
inline constexpr size_t kMaxLetteredChoices = 26;

// Text-to-text form of a multiple-choice instance.
struct SerializedInstance {
  std::string input;
  std::string target;
};

// "<prefix> <query> \n (A) <choice> (B) <choice> ..." where "\n" is the
// literal two-character separator. Throws Error(kMoreChoicesThanLetters) for
// more than 26 choices.
std::string FormatLetteredPrompt(std::string_view prefix,
                                 std::string_view query,
                                 std::span<const std::string> choices);

struct LetteredPrompt {
  std::string query;
  std::vector<std::string> choices;
};

// Inverse of FormatLetteredPrompt. Throws Error(kInvalidArgument) when the
// text does not have the expected shape.
LetteredPrompt ParseLetteredPrompt(std::string_view prompt,
                                   std::string_view prefix);

SerializedInstance SerializeNpp(const NppInstance &instance);

// One (prefix, completion) fine-tuning pair split at a word point.
struct CompletionPair {
  std::string sentence_id;
  std::vector<std::string> p;
  std::vector<std::string> q;
  size_t split_point = 0;
};

// All n-1 splits of an n-token sentence, split points 1..n-1 in order.
std::vector<CompletionPair> BuildCompletionPairs(
    std::span<const std::string> tokens, std::string_view sentence_id);

// Sentences of a corpus with one contiguous range (the context's own
// document) excluded.
class SentencePool {
 public:
  SentencePool(std::span<const std::string> sentences, size_t exclude_begin,
               size_t exclude_end);
  explicit SentencePool(std::span<const std::string> sentences)
      : SentencePool(sentences, 0, 0) {}

  size_t size() const;
  const std::string &operator[](size_t i) const;

 private:
  std::span<const std::string> sentences_;
  size_t exclude_begin_;
  size_t exclude_end_;
};

struct NspInstance {
  std::string doc_id;
  std::string context;
  std::vector<std::string> choices;
  size_t answer_index = 0;

  const std::string &answer() const { return choices[answer_index]; }
};

// context = doc[index], answer = doc[index + 1]; `num_distractors` pool
// sentences are drawn without replacement, then the choices are shuffled.
// Throws Error(kInvalidArgument) unless index + 1 < doc.size().
BuildResult<NspInstance> BuildNspInstance(std::span<const std::string> doc,
                                          size_t index,
                                          std::string_view doc_id,
                                          const SentencePool &pool, Rng &rng,
                                          size_t num_distractors);

SerializedInstance SerializeNsp(const NspInstance &instance);

}  // namespace nppkit

#endif  // NPPKIT_INSTANCE_BUILDER_H_
