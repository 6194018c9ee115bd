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

#include "nppkit/instance_builder.h"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "nppkit/corpus.h"
#include "nppkit/status.h"

namespace nppkit {
namespace {

constexpr std::string_view kQuerySeparator = " \\n ";

std::string OptionTag(size_t index) {
  return std::string("(") + static_cast<char>('A' + index) + ")";
}

}  // namespace

std::string_view SkipReasonName(SkipReason reason) {
  switch (reason) {
    case SkipReason::kNoEligibleGroup: return "NoEligibleGroup";
    case SkipReason::kAnswerAtSentenceStart: return "AnswerAtSentenceStart";
    case SkipReason::kPoolTooSmall: return "PoolTooSmall";
    case SkipReason::kMalformedTree: return "MalformedTree";
    case SkipReason::kMoreChoicesThanLetters: return "MoreChoicesThanLetters";
  }
  return "?";
}

BuildResult<NppInstance> BuildNppInstance(const ConstituencyTree &tree,
                                          const PhraseGroups &groups,
                                          std::string_view sentence_id,
                                          Rng &rng, size_t min_size) {
  const std::vector<PhraseGroup> eligible = EligibleGroups(groups, min_size);
  if (eligible.empty()) return Skip{SkipReason::kNoEligibleGroup};

  auto starts_later = [](const PhraseSpan &p) { return p.span.start > 0; };
  std::vector<const PhraseGroup *> usable;
  for (const PhraseGroup &group : eligible) {
    if (std::any_of(group.phrases.begin(), group.phrases.end(), starts_later)) {
      usable.push_back(&group);
    }
  }
  if (usable.empty()) return Skip{SkipReason::kAnswerAtSentenceStart};

  const PhraseGroup &group = *usable[rng.Uniform(usable.size())];
  std::vector<size_t> candidates;
  for (size_t i = 0; i < group.phrases.size(); ++i) {
    if (starts_later(group.phrases[i])) candidates.push_back(i);
  }
  const size_t answer = candidates[rng.Uniform(candidates.size())];

  std::vector<size_t> order(group.phrases.size());
  std::iota(order.begin(), order.end(), size_t{0});
  rng.Shuffle(std::span<size_t>(order));

  NppInstance instance;
  instance.sentence_id = std::string(sentence_id);
  instance.phrase_type = group.type;
  const Span &answer_span = group.phrases[answer].span;
  instance.partial_query.assign(
      tree.tokens().begin(),
      tree.tokens().begin() + static_cast<std::ptrdiff_t>(answer_span.start));
  for (size_t slot = 0; slot < order.size(); ++slot) {
    const PhraseSpan &phrase = group.phrases[order[slot]];
    instance.choices.push_back(phrase.text);
    instance.choice_spans.push_back(phrase.span);
    if (order[slot] == answer) instance.answer_index = slot;
  }
  return instance;
}

void VerifyNppInstance(const NppInstance &instance,
                       const ConstituencyTree &tree, size_t min_size) {
  CheckContract(instance.choices.size() == instance.choice_spans.size(),
                "choices and spans differ in length");
  CheckContract(instance.answer_index < instance.choices.size(),
                "answer index out of range");
  CheckContract(instance.choices.size() >= min_size,
                "fewer choices than the minimum group size");
  const Span &answer = instance.answer_span();
  CheckContract(!instance.partial_query.empty(), "empty partial query");
  CheckContract(instance.partial_query.size() == answer.start,
                "partial query does not end where the answer begins");
  CheckContract(answer.end <= tree.size() && answer.start < answer.end,
                "answer span outside the sentence");
  CheckContract(instance.partial_query.size() < tree.size(),
                "partial query is not a strict prefix");
  for (size_t i = 0; i < instance.partial_query.size(); ++i) {
    CheckContract(instance.partial_query[i] == tree.tokens()[i],
                  "partial query is not a sentence prefix");
  }
  CheckContract(instance.answer() == SpanText(tree, answer),
                "answer text does not match its span");
  for (size_t i = 0; i < instance.choice_spans.size(); ++i) {
    for (size_t j = i + 1; j < instance.choice_spans.size(); ++j) {
      CheckContract(!(instance.choice_spans[i] == instance.choice_spans[j]),
                    "duplicate choice span");
    }
  }
}

std::string FormatLetteredPrompt(std::string_view prefix,
                                 std::string_view query,
                                 std::span<const std::string> choices) {
  if (choices.size() > kMaxLetteredChoices) {
    throw Error(ErrorCode::kMoreChoicesThanLetters,
                std::to_string(choices.size()) + " choices exceed 26 letters");
  }
  std::string out(prefix);
  out += ' ';
  out += query;
  out += kQuerySeparator;
  for (size_t i = 0; i < choices.size(); ++i) {
    if (i > 0) out += ' ';
    out += OptionTag(i);
    out += ' ';
    out += choices[i];
  }
  return out;
}

LetteredPrompt ParseLetteredPrompt(std::string_view prompt,
                                   std::string_view prefix) {
  auto fail = [](const char *what) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("malformed prompt: ") + what);
  };
  if (prompt.substr(0, prefix.size()) != prefix ||
      prompt.substr(prefix.size(), 1) != " ") {
    fail("missing prefix");
  }
  std::string_view rest = prompt.substr(prefix.size() + 1);
  const size_t sep = rest.find(kQuerySeparator);
  if (sep == std::string_view::npos) fail("missing query separator");
  LetteredPrompt parsed;
  parsed.query = std::string(rest.substr(0, sep));
  rest = rest.substr(sep + kQuerySeparator.size());

  const std::string first = OptionTag(0) + " ";
  if (rest.substr(0, first.size()) != first) fail("missing option (A)");
  rest = rest.substr(first.size());
  for (size_t next = 1;; ++next) {
    if (next == kMaxLetteredChoices) {
      parsed.choices.emplace_back(rest);
      break;
    }
    const std::string tag = " " + OptionTag(next) + " ";
    const size_t at = rest.find(tag);
    if (at == std::string_view::npos) {
      parsed.choices.emplace_back(rest);
      break;
    }
    parsed.choices.emplace_back(rest.substr(0, at));
    rest = rest.substr(at + tag.size());
  }
  return parsed;
}

SerializedInstance SerializeNpp(const NppInstance &instance) {
  return {FormatLetteredPrompt(kNextPhrasePrefix,
                               Detokenize(instance.partial_query),
                               instance.choices),
          instance.answer()};
}

std::vector<CompletionPair> BuildCompletionPairs(
    std::span<const std::string> tokens, std::string_view sentence_id) {
  std::vector<CompletionPair> pairs;
  if (tokens.size() < 2) return pairs;
  pairs.reserve(tokens.size() - 1);
  for (size_t split = 1; split < tokens.size(); ++split) {
    CompletionPair pair;
    pair.sentence_id = std::string(sentence_id);
    pair.p.assign(tokens.begin(), tokens.begin() + split);
    pair.q.assign(tokens.begin() + split, tokens.end());
    pair.split_point = split;
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

SentencePool::SentencePool(std::span<const std::string> sentences,
                           size_t exclude_begin, size_t exclude_end)
    : sentences_(sentences),
      exclude_begin_(std::min(exclude_begin, sentences.size())),
      exclude_end_(std::clamp(exclude_end, exclude_begin_, sentences.size())) {}

size_t SentencePool::size() const {
  return sentences_.size() - (exclude_end_ - exclude_begin_);
}

const std::string &SentencePool::operator[](size_t i) const {
  if (i >= exclude_begin_) i += exclude_end_ - exclude_begin_;
  return sentences_[i];
}

BuildResult<NspInstance> BuildNspInstance(std::span<const std::string> doc,
                                          size_t index,
                                          std::string_view doc_id,
                                          const SentencePool &pool, Rng &rng,
                                          size_t num_distractors) {
  if (index + 1 >= doc.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "context sentence has no successor in its document");
  }
  const size_t n = pool.size();
  if (n < num_distractors) return Skip{SkipReason::kPoolTooSmall};

  // Floyd's sampling: k distinct pool indices, in draw order.
  std::vector<size_t> picked;
  std::unordered_set<size_t> seen;
  for (size_t j = n - num_distractors; j < n; ++j) {
    size_t t = rng.Uniform(j + 1);
    if (!seen.insert(t).second) {
      t = j;
      seen.insert(t);
    }
    picked.push_back(t);
  }

  std::vector<std::string> candidates;
  candidates.push_back(doc[index + 1]);
  for (size_t i : picked) candidates.push_back(pool[i]);

  std::vector<size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), size_t{0});
  rng.Shuffle(std::span<size_t>(order));

  NspInstance instance;
  instance.doc_id = std::string(doc_id);
  instance.context = doc[index];
  for (size_t slot = 0; slot < order.size(); ++slot) {
    instance.choices.push_back(candidates[order[slot]]);
    if (order[slot] == 0) instance.answer_index = slot;
  }
  return instance;
}

SerializedInstance SerializeNsp(const NspInstance &instance) {
  return {FormatLetteredPrompt(kNextSentencePrefix, instance.context,
                               instance.choices),
          instance.answer()};
}

}  // namespace nppkit
