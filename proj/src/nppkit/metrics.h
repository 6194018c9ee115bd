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

#ifndef NPPKIT_METRICS_H_
#define NPPKIT_METRICS_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nppkit {

using Tokens = std::vector<std::string>;

// A candidate completion and its reference completions, already normalized.
struct EvalSegment {
  Tokens candidate;
  std::vector<Tokens> references;
};

// Lowercase, then the corpus tokenizer.
Tokens NormalizeForScoring(std::string_view text);

EvalSegment MakeSegment(std::string_view candidate,
                        std::span<const std::string> references);

inline constexpr size_t kMaxOrder = 4;

//
// BLEU-4
//

struct NgramMatch {
  size_t matches = 0;  // clipped by the maximum count in any one reference
  size_t total = 0;    // candidate n-grams
};

NgramMatch ClippedNgramMatches(const Tokens &candidate,
                               std::span<const Tokens> references, size_t n);

struct BleuStats {
  std::array<size_t, kMaxOrder> matches{};
  std::array<size_t, kMaxOrder> totals{};
  size_t candidate_length = 0;
  size_t reference_length = 0;  // closest reference length, ties to shorter

  BleuStats &operator+=(const BleuStats &other);
};

BleuStats ComputeBleuStats(const EvalSegment &segment);

// Unsmoothed BLEU-4 on pooled statistics, in [0, 100]. Zero when any order
// has no matches.
double BleuFromStats(const BleuStats &stats);

double CorpusBleu(std::span<const EvalSegment> segments);

// Segment-level BLEU-4 with add-one smoothing of the n >= 2 precisions.
double SentenceBleu(const EvalSegment &segment);

//
// METEOR (exact unigram matching only)
//

struct MeteorStats {
  size_t matches = 0;
  size_t chunks = 0;
  size_t candidate_length = 0;
  size_t reference_length = 0;

  MeteorStats &operator+=(const MeteorStats &other);
};

// One-to-one alignment of identical tokens with the maximum number of
// matches and, among those, the fewest chunks (maximal runs that are
// contiguous and in the same order on both sides). Finding the fewest chunks
// is a branch-and-bound search; `node_budget` caps it, after which the best
// alignment found so far is returned.
MeteorStats AlignExact(const Tokens &candidate, const Tokens &reference,
                       size_t node_budget = 2'000'000);

// fmean * (1 - 0.5 * (chunks / matches)^3), fmean = 10PR / (R + 9P).
double MeteorFromStats(const MeteorStats &stats);

// Statistics against the best-scoring reference.
MeteorStats BestMeteorStats(const EvalSegment &segment);

double SegmentMeteor(const EvalSegment &segment);

// Pools matches, chunks and lengths over segments before applying the
// formula.
double CorpusMeteor(std::span<const EvalSegment> segments);

//
// CIDEr
//

struct CiderScores {
  double corpus = 0.0;
  std::vector<double> segments;
};

// Plain CIDEr: per order n, tf-idf vectors with idf(g) = log(|S| / max(1,
// df(g))), df counted over the segments' reference sets; cosine similarity
// averaged over references; segment score 10 * mean over n = 1..4. Throws
// Error(kSingleSegmentCorpus) for fewer than two segments.
CiderScores Cider(std::span<const EvalSegment> segments);

//
// Reports
//

struct SegmentScores {
  double bleu = 0.0;
  double meteor = 0.0;
  std::optional<double> cider;
};

struct EvalReport {
  double bleu4 = 0.0;
  double meteor = 0.0;
  std::optional<double> cider;  // absent for single-segment corpora
  std::string cider_error;
  std::vector<SegmentScores> segments;
};

EvalReport Evaluate(std::span<const EvalSegment> segments);

struct SegmentFileOptions {
  // When non-empty, each line is a JSON object and this field (a string or
  // an array of strings) supplies the text. Otherwise lines are plain text
  // and reference lines hold tab-separated alternatives.
  std::string candidates_field;
  std::string references_field;
};

// Throws Error(kCountMismatch) when the files hold different line counts and
// Error(kIo) when one cannot be read.
std::vector<EvalSegment> LoadSegments(const std::filesystem::path &candidates,
                                      const std::filesystem::path &references,
                                      const SegmentFileOptions &options = {});

EvalReport EvaluateFiles(const std::filesystem::path &candidates,
                         const std::filesystem::path &references,
                         const SegmentFileOptions &options = {});

// Aligned text table with the variant notes.
std::string FormatReport(const EvalReport &report);

// Machine-readable sidecar including per-segment scores.
std::string ReportJson(const EvalReport &report);

}  // namespace nppkit

#endif  // NPPKIT_METRICS_H_
