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

#ifndef NPPKIT_CORPUS_H_
#define NPPKIT_CORPUS_H_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "nppkit/random.h"
#include "nppkit/treebank.h"

namespace nppkit {

// Stable record identifier: (corpus name, document index, sentence index).
// Ordering is numeric on the indices, not lexicographic on ToString().
struct SentenceId {
  std::string corpus;
  uint64_t doc = 0;
  uint64_t sent = 0;

  // "corpus/doc/sent"
  std::string ToString() const;

  friend auto operator<=>(const SentenceId &, const SentenceId &) = default;
  friend bool operator==(const SentenceId &, const SentenceId &) = default;
};

struct SentenceRecord {
  SentenceId id;
  std::string text;
  std::vector<std::string> tokens;
  std::optional<ConstituencyTree> tree;
};

// Words ending in '.' that never end a sentence ("e.g.", "Dr.", "Fig.").
class AbbreviationList {
 public:
  AbbreviationList() = default;
  explicit AbbreviationList(std::vector<std::string> words);

  static const AbbreviationList &Default();
  // One abbreviation per line; blank lines and lines starting with '#' are
  // ignored. Throws Error(kIo) if the file cannot be read.
  static AbbreviationList LoadFile(const std::filesystem::path &path);

  bool Contains(std::string_view word) const;
  size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

// Rule-based segmentation. A sentence ends at '.', '!' or '?' (plus any
// trailing closing quotes/brackets) followed by end of text, a line break, or
// whitespace and an uppercase letter. A '.' ending a guarded abbreviation
// never ends a sentence. Internal whitespace runs are collapsed to one space.
std::vector<std::string> SplitSentences(
    std::string_view document,
    const AbbreviationList &guards = AbbreviationList::Default());

// Whitespace split; trailing ".,!?;:" characters are detached as
// one-character tokens.
std::vector<std::string> Tokenize(std::string_view sentence);

// Joins tokens with single spaces.
std::string Detokenize(std::span<const std::string> tokens);

// Lowercases ASCII letters; other bytes are copied unchanged.
std::string AsciiLower(std::string_view text);

enum class Split { kTrain = 0, kDev = 1, kTest = 2 };

std::string_view SplitName(Split split);

struct SplitRatios {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;

  // Throws Error(kRatioSumInvalid) unless all ratios are positive and sum to
  // 1 within 1e-9.
  void Validate() const;
};

struct SplitSizes {
  size_t train = 0;
  size_t dev = 0;
  size_t test = 0;

  friend bool operator==(const SplitSizes &, const SplitSizes &) = default;
};

// dev and test get floor(ratio * n); the remainder goes to train.
SplitSizes ComputeSplitSizes(size_t n, const SplitRatios &ratios);

// Streams the splits of records 0..n-1 in order by sequential selection
// sampling: each arrangement with ComputeSplitSizes(n) records per split is
// equally likely, and no per-record state is kept.
class SplitAssigner {
 public:
  SplitAssigner(size_t n, const SplitRatios &ratios, uint64_t seed);

  // Split of the next record. Must be called at most n times.
  Split Next();

 private:
  Rng rng_;
  size_t left_;
  size_t dev_left_;
  size_t test_left_;
};

// All n splits of a SplitAssigner, as a vector.
std::vector<Split> AssignSplits(size_t n, const SplitRatios &ratios,
                                uint64_t seed);

template <typename T>
struct Splits {
  std::vector<T> train;
  std::vector<T> dev;
  std::vector<T> test;
};

// Records in each split appear in shuffled order.
Splits<SentenceRecord> Partition(std::vector<SentenceRecord> records,
                                 const SplitRatios &ratios, uint64_t seed);

struct DatasetStats {
  std::string dataset;
  size_t train = 0;
  size_t dev = 0;
  size_t test = 0;

  size_t total() const { return train + dev + test; }
};

template <typename T>
DatasetStats ComputeStats(std::string dataset, const Splits<T> &splits) {
  return {std::move(dataset), splits.train.size(), splits.dev.size(),
          splits.test.size()};
}

// "156998" -> "156,998"
std::string FormatCount(size_t count);

// Aligned table: one row per dataset, columns Train, Dev, Test.
std::string FormatStatsTable(std::span<const DatasetStats> rows);

// Where documents come from.
//   treebank:      one bracketed tree per line (one sentence each)
//   doc-per-line:  each non-blank line is a document
//   doc-per-file:  each regular file in a directory is a document
enum class InputMode { kTreebank, kDocPerLine, kDocPerFile };

std::optional<InputMode> ParseInputMode(std::string_view name);
std::string_view InputModeName(InputMode mode);

// Calls fn(ordinal, line) for each non-blank line. Throws Error(kIo).
void ForEachNonBlankLine(
    const std::filesystem::path &path,
    const std::function<void(uint64_t, std::string_view)> &fn);

// Calls fn(doc_index, text) for each document of a raw-text corpus
// (doc-per-line or doc-per-file). Files of a directory are visited in
// lexicographic path order. Throws Error(kIo) or Error(kInvalidArgument) for
// the treebank mode.
void ForEachDocument(const std::filesystem::path &path, InputMode mode,
                     const std::function<void(uint64_t, std::string_view)> &fn);

// Streams sentence records. Raw modes split and tokenize each document;
// treebank mode parses each line and uses the tree yield as tokens. Trees that
// fail to parse are reported through `on_error` (with the line ordinal) and
// skipped; when `on_error` is empty the Error propagates.
void ForEachSentence(
    const std::filesystem::path &path, InputMode mode,
    std::string_view corpus_name, const AbbreviationList &guards,
    const std::function<void(SentenceRecord &&)> &fn,
    const std::function<void(uint64_t, const std::exception &)> &on_error =
        {});

}  // namespace nppkit

#endif  // NPPKIT_CORPUS_H_
