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

#include "nppkit/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "nppkit/corpus.h"
#include "nppkit/status.h"

namespace nppkit {
namespace {

using NgramCounts = std::map<std::string, size_t>;

NgramCounts CountNgrams(const Tokens &tokens, size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (size_t k = 1; k < n; ++k) {
      key += ' ';
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

size_t ClosestReferenceLength(size_t candidate_length,
                              std::span<const Tokens> references) {
  size_t best = 0;
  size_t best_diff = SIZE_MAX;
  for (const Tokens &ref : references) {
    const size_t len = ref.size();
    const size_t diff = len > candidate_length ? len - candidate_length
                                               : candidate_length - len;
    if (diff < best_diff || (diff == best_diff && len < best)) {
      best = len;
      best_diff = diff;
    }
  }
  return best;
}

}  // namespace

Tokens NormalizeForScoring(std::string_view text) {
  return Tokenize(AsciiLower(text));
}

EvalSegment MakeSegment(std::string_view candidate,
                        std::span<const std::string> references) {
  EvalSegment segment;
  segment.candidate = NormalizeForScoring(candidate);
  for (const std::string &ref : references) {
    segment.references.push_back(NormalizeForScoring(ref));
  }
  return segment;
}

NgramMatch ClippedNgramMatches(const Tokens &candidate,
                               std::span<const Tokens> references, size_t n) {
  NgramMatch result;
  const NgramCounts counts = CountNgrams(candidate, n);
  NgramCounts max_ref;
  for (const Tokens &ref : references) {
    for (const auto &[gram, count] : CountNgrams(ref, n)) {
      size_t &slot = max_ref[gram];
      slot = std::max(slot, count);
    }
  }
  for (const auto &[gram, count] : counts) {
    result.total += count;
    auto it = max_ref.find(gram);
    if (it != max_ref.end()) result.matches += std::min(count, it->second);
  }
  return result;
}

BleuStats &BleuStats::operator+=(const BleuStats &other) {
  for (size_t n = 0; n < kMaxOrder; ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  candidate_length += other.candidate_length;
  reference_length += other.reference_length;
  return *this;
}

BleuStats ComputeBleuStats(const EvalSegment &segment) {
  BleuStats stats;
  for (size_t n = 1; n <= kMaxOrder; ++n) {
    NgramMatch m = ClippedNgramMatches(segment.candidate, segment.references, n);
    stats.matches[n - 1] = m.matches;
    stats.totals[n - 1] = m.total;
  }
  stats.candidate_length = segment.candidate.size();
  stats.reference_length =
      ClosestReferenceLength(segment.candidate.size(), segment.references);
  return stats;
}

namespace {

double BrevityPenalty(size_t candidate_length, size_t reference_length) {
  if (candidate_length >= reference_length) return 1.0;
  return std::exp(1.0 - static_cast<double>(reference_length) /
                            static_cast<double>(candidate_length));
}

}  // namespace

double BleuFromStats(const BleuStats &stats) {
  if (stats.candidate_length == 0) return 0.0;
  double log_sum = 0.0;
  for (size_t n = 0; n < kMaxOrder; ++n) {
    if (stats.matches[n] == 0 || stats.totals[n] == 0) return 0.0;
    log_sum += std::log(static_cast<double>(stats.matches[n]) /
                        static_cast<double>(stats.totals[n]));
  }
  return 100.0 * BrevityPenalty(stats.candidate_length, stats.reference_length) *
         std::exp(log_sum / static_cast<double>(kMaxOrder));
}

double CorpusBleu(std::span<const EvalSegment> segments) {
  BleuStats pooled;
  for (const EvalSegment &segment : segments) {
    pooled += ComputeBleuStats(segment);
  }
  return BleuFromStats(pooled);
}

double SentenceBleu(const EvalSegment &segment) {
  const BleuStats stats = ComputeBleuStats(segment);
  if (stats.candidate_length == 0 || stats.matches[0] == 0) return 0.0;
  double log_sum = std::log(static_cast<double>(stats.matches[0]) /
                            static_cast<double>(stats.totals[0]));
  for (size_t n = 1; n < kMaxOrder; ++n) {
    log_sum += std::log(static_cast<double>(stats.matches[n] + 1) /
                        static_cast<double>(stats.totals[n] + 1));
  }
  return 100.0 * BrevityPenalty(stats.candidate_length, stats.reference_length) *
         std::exp(log_sum / static_cast<double>(kMaxOrder));
}

//
// METEOR
//

MeteorStats &MeteorStats::operator+=(const MeteorStats &other) {
  matches += other.matches;
  chunks += other.chunks;
  candidate_length += other.candidate_length;
  reference_length += other.reference_length;
  return *this;
}

namespace {

// Depth-first search over candidate positions. A "link" is a candidate
// position i > 0 aligned to reference position a(i - 1) + 1; chunks equal
// matches minus links, so the search maximizes links.
class ChunkSearch {
 public:
  ChunkSearch(const Tokens &candidate, const Tokens &reference,
              size_t node_budget)
      : node_budget_(node_budget) {
    std::unordered_map<std::string, int> ids;
    auto id_of = [&ids](const std::string &token) {
      auto [it, inserted] = ids.emplace(token, static_cast<int>(ids.size()));
      return it->second;
    };
    for (const auto &token : candidate) cand_.push_back(id_of(token));
    for (const auto &token : reference) ref_.push_back(id_of(token));
    const size_t types = ids.size();
    positions_.resize(types);
    for (size_t j = 0; j < ref_.size(); ++j) positions_[ref_[j]].push_back(j);
    std::vector<size_t> cand_count(types, 0);
    for (int w : cand_) ++cand_count[w];
    skips_left_.resize(types);
    for (size_t w = 0; w < types; ++w) {
      const size_t matched = std::min(cand_count[w], positions_[w].size());
      total_matches_ += matched;
      skips_left_[w] = cand_count[w] - matched;
    }
    used_.assign(ref_.size(), false);
  }

  MeteorStats Run() {
    MeteorStats stats;
    stats.candidate_length = cand_.size();
    stats.reference_length = ref_.size();
    stats.matches = total_matches_;
    if (total_matches_ == 0) return stats;
    Visit(0, -1, 0, 0);
    stats.chunks = total_matches_ - static_cast<size_t>(best_links_);
    return stats;
  }

 private:
  void Visit(size_t i, long prev, size_t matched, long links) {
    if (exhausted()) return;
    ++nodes_;
    if (i == cand_.size()) {
      if (matched == total_matches_ && links > best_links_) best_links_ = links;
      return;
    }
    // Every future link needs a future match.
    const long bound =
        links + static_cast<long>(std::min(cand_.size() - i,
                                           total_matches_ - matched));
    if (bound <= best_links_) return;

    const int w = cand_[i];
    const size_t extend = prev >= 0 ? static_cast<size_t>(prev) + 1 : SIZE_MAX;
    if (extend < ref_.size() && ref_[extend] == w && !used_[extend]) {
      used_[extend] = true;
      Visit(i + 1, static_cast<long>(extend), matched + 1, links + 1);
      used_[extend] = false;
    }
    for (size_t j : positions_[w]) {
      if (j == extend || used_[j]) continue;
      used_[j] = true;
      Visit(i + 1, static_cast<long>(j), matched + 1, links);
      used_[j] = false;
      if (exhausted()) return;
    }
    if (skips_left_[w] > 0) {
      --skips_left_[w];
      Visit(i + 1, -1, matched, links);
      ++skips_left_[w];
    }
  }

  bool exhausted() const { return best_links_ >= 0 && nodes_ >= node_budget_; }

  std::vector<int> cand_;
  std::vector<int> ref_;
  std::vector<std::vector<size_t>> positions_;
  std::vector<size_t> skips_left_;
  std::vector<bool> used_;
  size_t total_matches_ = 0;
  size_t node_budget_;
  size_t nodes_ = 0;
  long best_links_ = -1;
};

}  // namespace

MeteorStats AlignExact(const Tokens &candidate, const Tokens &reference,
                       size_t node_budget) {
  return ChunkSearch(candidate, reference, node_budget).Run();
}

double MeteorFromStats(const MeteorStats &stats) {
  if (stats.matches == 0) return 0.0;
  const double m = static_cast<double>(stats.matches);
  const double precision = m / static_cast<double>(stats.candidate_length);
  const double recall = m / static_cast<double>(stats.reference_length);
  const double fmean =
      10.0 * precision * recall / (recall + 9.0 * precision);
  const double fragmentation = static_cast<double>(stats.chunks) / m;
  const double penalty = 0.5 * fragmentation * fragmentation * fragmentation;
  return fmean * (1.0 - penalty);
}

MeteorStats BestMeteorStats(const EvalSegment &segment) {
  MeteorStats best;
  double best_score = -1.0;
  for (const Tokens &ref : segment.references) {
    MeteorStats stats = AlignExact(segment.candidate, ref);
    const double score = MeteorFromStats(stats);
    if (score > best_score) {
      best = stats;
      best_score = score;
    }
  }
  if (best_score < 0) best.candidate_length = segment.candidate.size();
  return best;
}

double SegmentMeteor(const EvalSegment &segment) {
  return MeteorFromStats(BestMeteorStats(segment));
}

double CorpusMeteor(std::span<const EvalSegment> segments) {
  MeteorStats pooled;
  for (const EvalSegment &segment : segments) {
    pooled += BestMeteorStats(segment);
  }
  return MeteorFromStats(pooled);
}

//
// CIDEr
//

namespace {

using Vector = std::map<std::string, double>;

struct Weighted {
  Vector vec;
  double norm = 0.0;
};

Weighted TfIdf(const NgramCounts &counts, const NgramCounts &df,
               double log_segments) {
  Weighted out;
  double sq = 0.0;
  for (const auto &[gram, tf] : counts) {
    auto it = df.find(gram);
    const double d = it == df.end() ? 1.0 : static_cast<double>(it->second);
    const double w = static_cast<double>(tf) * (log_segments - std::log(d));
    out.vec.emplace(gram, w);
    sq += w * w;
  }
  out.norm = std::sqrt(sq);
  return out;
}

double Cosine(const Weighted &a, const Weighted &b) {
  if (a.norm == 0.0 || b.norm == 0.0) return 0.0;
  double dot = 0.0;
  for (const auto &[gram, w] : a.vec) {
    auto it = b.vec.find(gram);
    if (it != b.vec.end()) dot += w * it->second;
  }
  return dot / (a.norm * b.norm);
}

}  // namespace

CiderScores Cider(std::span<const EvalSegment> segments) {
  if (segments.size() < 2) {
    throw Error(ErrorCode::kSingleSegmentCorpus,
                "CIDEr needs at least two segments to estimate idf");
  }
  const double log_segments = std::log(static_cast<double>(segments.size()));
  CiderScores scores;
  scores.segments.assign(segments.size(), 0.0);
  for (size_t n = 1; n <= kMaxOrder; ++n) {
    // Document frequency over each segment's pooled reference n-grams.
    std::vector<std::vector<NgramCounts>> ref_counts(segments.size());
    NgramCounts df;
    for (size_t s = 0; s < segments.size(); ++s) {
      std::map<std::string, bool> present;
      for (const Tokens &ref : segments[s].references) {
        ref_counts[s].push_back(CountNgrams(ref, n));
        for (const auto &entry : ref_counts[s].back()) present[entry.first] = true;
      }
      for (const auto &entry : present) ++df[entry.first];
    }
    for (size_t s = 0; s < segments.size(); ++s) {
      if (segments[s].references.empty()) continue;
      const Weighted cand =
          TfIdf(CountNgrams(segments[s].candidate, n), df, log_segments);
      double sum = 0.0;
      for (const NgramCounts &counts : ref_counts[s]) {
        sum += Cosine(cand, TfIdf(counts, df, log_segments));
      }
      scores.segments[s] +=
          sum / static_cast<double>(segments[s].references.size());
    }
  }
  double total = 0.0;
  for (double &score : scores.segments) {
    score = 10.0 * score / static_cast<double>(kMaxOrder);
    total += score;
  }
  scores.corpus = total / static_cast<double>(segments.size());
  return scores;
}

//
// Reports
//

EvalReport Evaluate(std::span<const EvalSegment> segments) {
  if (segments.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no segments to evaluate");
  }
  EvalReport report;
  report.bleu4 = CorpusBleu(segments);
  report.meteor = CorpusMeteor(segments);
  std::optional<CiderScores> cider;
  try {
    cider = Cider(segments);
    report.cider = cider->corpus;
  } catch (const Error &e) {
    if (e.code() != ErrorCode::kSingleSegmentCorpus) throw;
    report.cider_error = std::string(ErrorCodeName(e.code()));
  }
  report.segments.reserve(segments.size());
  for (size_t s = 0; s < segments.size(); ++s) {
    SegmentScores scores;
    scores.bleu = SentenceBleu(segments[s]);
    scores.meteor = SegmentMeteor(segments[s]);
    if (cider.has_value()) scores.cider = cider->segments[s];
    report.segments.push_back(scores);
  }
  return report;
}

namespace {

std::vector<std::string> ReadLines(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read error on " + path.string());
  return lines;
}

std::vector<std::string> FieldTexts(const std::string &line,
                                    const std::string &field,
                                    const std::filesystem::path &path) {
  nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
  if (record.is_discarded() || !record.is_object() || !record.contains(field)) {
    throw Error(ErrorCode::kIo,
                path.string() + ": expected a JSON object with field '" +
                    field + "'");
  }
  const nlohmann::json &value = record[field];
  std::vector<std::string> texts;
  if (value.is_string()) {
    texts.push_back(value.get<std::string>());
  } else if (value.is_array()) {
    for (const auto &item : value) {
      if (!item.is_string()) {
        throw Error(ErrorCode::kIo, path.string() + ": non-string in '" +
                                        field + "'");
      }
      texts.push_back(item.get<std::string>());
    }
  } else {
    throw Error(ErrorCode::kIo,
                path.string() + ": field '" + field + "' is not text");
  }
  return texts;
}

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    parts.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return parts;
}

}  // namespace

std::vector<EvalSegment> LoadSegments(const std::filesystem::path &candidates,
                                      const std::filesystem::path &references,
                                      const SegmentFileOptions &options) {
  const std::vector<std::string> cand_lines = ReadLines(candidates);
  const std::vector<std::string> ref_lines = ReadLines(references);
  if (cand_lines.size() != ref_lines.size()) {
    throw Error(ErrorCode::kCountMismatch,
                std::to_string(cand_lines.size()) + " candidates vs " +
                    std::to_string(ref_lines.size()) + " references");
  }
  std::vector<EvalSegment> segments;
  segments.reserve(cand_lines.size());
  for (size_t i = 0; i < cand_lines.size(); ++i) {
    std::string candidate = cand_lines[i];
    if (!options.candidates_field.empty()) {
      std::vector<std::string> texts =
          FieldTexts(cand_lines[i], options.candidates_field, candidates);
      candidate = texts.empty() ? std::string() : texts.front();
    }
    std::vector<std::string> refs =
        options.references_field.empty()
            ? SplitTabs(ref_lines[i])
            : FieldTexts(ref_lines[i], options.references_field, references);
    if (refs.empty()) refs.emplace_back();
    segments.push_back(MakeSegment(candidate, refs));
  }
  return segments;
}

EvalReport EvaluateFiles(const std::filesystem::path &candidates,
                         const std::filesystem::path &references,
                         const SegmentFileOptions &options) {
  const std::vector<EvalSegment> segments =
      LoadSegments(candidates, references, options);
  return Evaluate(segments);
}

namespace {

std::string Fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

}  // namespace

std::string FormatReport(const EvalReport &report) {
  std::ostringstream out;
  auto row = [&out](const std::string &metric, const std::string &score,
                    const std::string &note) {
    out << metric << std::string(10 - metric.size(), ' ') << score;
    if (!note.empty()) {
      out << std::string(score.size() < 16 ? 16 - score.size() : 1, ' ')
          << note;
    }
    out << '\n';
  };
  row("metric", "score", "variant");
  row("segments", std::to_string(report.segments.size()), "");
  row("BLEU-4", Fixed(report.bleu4),
      "corpus: pooled, unsmoothed; segments: add-one smoothing n>=2");
  row("METEOR", Fixed(report.meteor),
      "exact-METEOR: exact unigram matches, no stem/synonym stages");
  row("CIDEr",
      report.cider.has_value() ? Fixed(*report.cider)
                               : "n/a (" + report.cider_error + ")",
      "plain CIDEr: idf from references, no length penalty");
  row("SPICE", "not implemented", "");
  return out.str();
}

std::string ReportJson(const EvalReport &report) {
  nlohmann::ordered_json doc;
  doc["segments"] = report.segments.size();
  doc["bleu4"] = report.bleu4;
  doc["meteor"] = report.meteor;
  if (report.cider.has_value()) {
    doc["cider"] = *report.cider;
  } else {
    doc["cider"] = nullptr;
    doc["cider_error"] = report.cider_error;
  }
  doc["spice"] = "not implemented";
  doc["variants"] = {
      {"bleu4", "corpus unsmoothed; segment add-one smoothing for n>=2"},
      {"meteor", "exact-METEOR"},
      {"cider", "plain CIDEr, idf=log(|S|/max(1,df))"},
  };
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (size_t i = 0; i < report.segments.size(); ++i) {
    const SegmentScores &s = report.segments[i];
    nlohmann::ordered_json row;
    row["index"] = i;
    row["bleu"] = s.bleu;
    row["meteor"] = s.meteor;
    row["cider"] = s.cider.has_value() ? nlohmann::ordered_json(*s.cider)
                                       : nlohmann::ordered_json(nullptr);
    rows.push_back(std::move(row));
  }
  doc["per_segment"] = std::move(rows);
  return doc.dump(2) + "\n";
}

}  // namespace nppkit
