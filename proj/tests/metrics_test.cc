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

#include <cmath>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "nppkit/status.h"
#include "test_support.h"

namespace nppkit {
namespace {

EvalSegment Seg(std::string_view cand, std::vector<std::string> refs) {
  return MakeSegment(cand, refs);
}

// Exhaustive alignment search: maximum matches, then fewest chunks.
std::pair<size_t, size_t> BruteAlign(const Tokens &c, const Tokens &r) {
  size_t best_m = 0, best_ch = 0;
  std::vector<int> a(c.size(), -1);
  std::vector<bool> used(r.size(), false);
  auto rec = [&](auto &&self, size_t i) -> void {
    if (i == c.size()) {
      size_t m = 0, ch = 0;
      long pi = -2, pj = -2;
      for (size_t k = 0; k < c.size(); ++k) {
        if (a[k] < 0) continue;
        ++m;
        if (!(static_cast<long>(k) == pi + 1 && a[k] == pj + 1)) ++ch;
        pi = static_cast<long>(k);
        pj = a[k];
      }
      if (m > best_m || (m == best_m && m > 0 && ch < best_ch)) {
        best_m = m;
        best_ch = ch;
      }
      return;
    }
    self(self, i + 1);
    for (size_t j = 0; j < r.size(); ++j) {
      if (used[j] || r[j] != c[i]) continue;
      used[j] = true;
      a[i] = static_cast<int>(j);
      self(self, i + 1);
      a[i] = -1;
      used[j] = false;
    }
  };
  rec(rec, 0);
  return {best_m, best_ch};
}

TEST_CASE("normalization") {
  CHECK(NormalizeForScoring("She bought, it.") ==
        Tokens{"she", "bought", ",", "it", "."});
}

TEST_CASE("BLEU hand values") {
  auto s = Seg("the the the", {"the cat"});
  auto m = ClippedNgramMatches(s.candidate, s.references, 1);
  CHECK(m.matches == 1);
  CHECK(m.total == 3);
  CHECK(static_cast<double>(m.matches) / m.total ==
        doctest::Approx(1.0 / 3).epsilon(1e-12));

  std::vector<EvalSegment> same = {Seg("a b c d e", {"a b c d e"}),
                                   Seg("x y z w", {"x y z w"})};
  CHECK(CorpusBleu(same) == 100.0);

  // No pooled 4-gram match: zero, unsmoothed.
  std::vector<EvalSegment> no4 = {Seg("a b c d", {"a b c x d"})};
  CHECK(CorpusBleu(no4) == 0.0);
  CHECK(SentenceBleu(no4[0]) > 0.0);

  // Brevity: closest reference length, ties to the shorter one.
  auto bp = ComputeBleuStats(Seg("a b c d e", {"a b c d e f g", "a b c"}));
  CHECK(bp.reference_length == 3);
  auto bp2 = ComputeBleuStats(Seg("a b c d", {"a b c d e f", "a b"}));
  CHECK(bp2.reference_length == 2);

  std::vector<EvalSegment> empty = {Seg("", {"a b"})};
  CHECK(CorpusBleu(empty) == 0.0);
  CHECK(SentenceBleu(empty[0]) == 0.0);
}

TEST_CASE("BLEU brevity penalty value") {
  // 4 of 6 reference tokens, all n-grams matching.
  std::vector<EvalSegment> s = {Seg("a b c d", {"a b c d e f"})};
  CHECK(CorpusBleu(s) == doctest::Approx(100.0 * std::exp(1.0 - 6.0 / 4.0))
                             .epsilon(1e-12));
}

TEST_CASE("METEOR hand values") {
  CHECK(SegmentMeteor(Seg("the cat sat", {"the cat napped"})) ==
        doctest::Approx(0.625).epsilon(1e-12));
  CHECK(std::fabs(SegmentMeteor(Seg("a b c d", {"a b c d"})) - 0.9921875) <
        1e-12);
  CHECK(SegmentMeteor(Seg("x y", {"a b"})) == 0.0);
  CHECK(SegmentMeteor(Seg("", {"a b"})) == 0.0);

  // Swapped halves: two chunks.
  auto st = AlignExact(Tokens{"c", "d", "a", "b"}, Tokens{"a", "b", "c", "d"});
  CHECK(st.matches == 4);
  CHECK(st.chunks == 2);
}

TEST_CASE("METEOR alignment matches exhaustive search") {
  std::mt19937_64 gen(31);
  const Tokens vocab = {"a", "b", "c", "the"};
  for (int i = 0; i < 3000; ++i) {
    Tokens c, r;
    for (size_t k = gen() % 8; k > 0; --k) c.push_back(vocab[gen() % 4]);
    for (size_t k = 1 + gen() % 8; k > 0; --k) r.push_back(vocab[gen() % 4]);
    auto [m, ch] = BruteAlign(c, r);
    auto st = AlignExact(c, r);
    REQUIRE(st.matches == m);
    REQUIRE(st.chunks == ch);
  }
}

TEST_CASE("METEOR node budget falls back to a valid alignment") {
  Tokens c, r;
  for (int i = 0; i < 60; ++i) {
    c.push_back(i % 2 ? "a" : "b");
    r.push_back(i % 3 ? "a" : "b");
  }
  auto st = AlignExact(c, r, 1000);
  auto full = AlignExact(c, r);
  CHECK(st.matches == full.matches);
  CHECK(st.chunks >= full.chunks);
  CHECK(st.chunks <= st.matches);
}

TEST_CASE("identity corpus") {
  std::vector<EvalSegment> segs;
  const char *lines[] = {"she bought a top and bottom",
                         "we will meet at noon on friday",
                         "automatic target recognition is hard",
                         "the cat sat on the mat"};
  for (const char *l : lines) segs.push_back(Seg(l, {l}));
  auto report = Evaluate(segs);
  CHECK(report.bleu4 == 100.0);
  REQUIRE(report.cider.has_value());
  CHECK(std::fabs(*report.cider - 10.0) < 1e-9);
  for (size_t i = 0; i < segs.size(); ++i) {
    const double m = static_cast<double>(segs[i].candidate.size());
    CHECK(std::fabs(report.segments[i].meteor - (1 - 0.5 / (m * m * m))) <
          1e-12);
    CHECK(std::fabs(*report.segments[i].cider - 10.0) < 1e-9);
  }
}

TEST_CASE("CIDEr edge cases") {
  std::vector<EvalSegment> one = {Seg("a b", {"a b"})};
  try {
    Cider(one);
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kSingleSegmentCorpus);
  }
  auto report = Evaluate(one);
  CHECK_FALSE(report.cider.has_value());
  CHECK(report.cider_error == "SingleSegmentCorpus");
  CHECK(FormatReport(report).find("n/a (SingleSegmentCorpus)") !=
        std::string::npos);

  std::vector<EvalSegment> disjoint = {Seg("x y z", {"a b c"}),
                                       Seg("p q r", {"d e f"})};
  CHECK(Cider(disjoint).corpus == 0.0);
}

void CheckAgainst(const EvalReport &report, const nlohmann::json &expected) {
  CHECK(std::fabs(report.bleu4 - expected["bleu4"].get<double>()) < 1e-9);
  CHECK(std::fabs(report.meteor - expected["meteor"].get<double>()) < 1e-9);
  REQUIRE(report.cider.has_value());
  CHECK(std::fabs(*report.cider - expected["cider"].get<double>()) < 1e-9);
  const auto &rows = expected["per_segment"];
  REQUIRE(rows.size() == report.segments.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(std::fabs(report.segments[i].bleu - rows[i]["bleu"].get<double>()) <
          1e-9);
    CHECK(std::fabs(report.segments[i].meteor -
                    rows[i]["meteor"].get<double>()) < 1e-9);
    CHECK(std::fabs(*report.segments[i].cider -
                    rows[i]["cider"].get<double>()) < 1e-9);
  }
}

TEST_CASE("fixtures match the independent oracle values") {
  const auto dir = testing::DataDir() / "eval";
  auto expected =
      nlohmann::json::parse(testing::ReadFile(dir / "expected.json"));
  CheckAgainst(
      EvaluateFiles(dir / "candidates.txt", dir / "references.txt"),
      expected["main"]);
  CheckAgainst(EvaluateFiles(dir / "cider_toy_candidates.txt",
                             dir / "cider_toy_references.txt"),
               expected["cider_toy"]);
}

TEST_CASE("golden report is byte-stable") {
  const auto dir = testing::DataDir() / "eval";
  auto report = EvaluateFiles(dir / "candidates.txt", dir / "references.txt");
  CHECK(FormatReport(report) == testing::ReadFile(dir / "golden_report.txt"));
  CHECK(ReportJson(report) ==
        testing::ReadFile(dir / "golden_report.txt.json"));
}

TEST_CASE("vocabulary renaming leaves scores unchanged") {
  const auto dir = testing::DataDir() / "eval";
  auto segs = LoadSegments(dir / "candidates.txt", dir / "references.txt");
  auto rename = [](Tokens t) {
    for (auto &w : t) w = "w" + std::to_string(std::hash<std::string>{}(w));
    return t;
  };
  std::vector<EvalSegment> renamed = segs;
  for (auto &s : renamed) {
    s.candidate = rename(s.candidate);
    for (auto &r : s.references) r = rename(r);
  }
  auto a = Evaluate(segs);
  auto b = Evaluate(renamed);
  CHECK(a.bleu4 == doctest::Approx(b.bleu4).epsilon(1e-12));
  CHECK(a.meteor == doctest::Approx(b.meteor).epsilon(1e-12));
  CHECK(*a.cider == doctest::Approx(*b.cider).epsilon(1e-12));
}

TEST_CASE("segment order does not change corpus scores") {
  const auto dir = testing::DataDir() / "eval";
  auto segs = LoadSegments(dir / "candidates.txt", dir / "references.txt");
  auto a = Evaluate(segs);
  std::reverse(segs.begin(), segs.end());
  auto b = Evaluate(segs);
  CHECK(a.bleu4 == doctest::Approx(b.bleu4).epsilon(1e-12));
  CHECK(a.meteor == doctest::Approx(b.meteor).epsilon(1e-12));
  CHECK(*a.cider == doctest::Approx(*b.cider).epsilon(1e-12));
}

TEST_CASE("perturbed candidates never beat the identity") {
  std::mt19937_64 gen(41);
  const char *lines[] = {"she bought a top and bottom",
                         "we will meet at noon on friday",
                         "please send me the report by monday"};
  std::vector<EvalSegment> ident;
  for (const char *l : lines) ident.push_back(Seg(l, {l}));
  const auto best = Evaluate(ident);
  for (int trial = 0; trial < 200; ++trial) {
    auto segs = ident;
    for (auto &s : segs) {
      auto &c = s.candidate;
      switch (gen() % 3) {
        case 0: if (!c.empty()) c.erase(c.begin() + gen() % c.size()); break;
        case 1: c.insert(c.begin() + gen() % (c.size() + 1), "zzz"); break;
        default:
          if (c.size() > 1) std::swap(c[gen() % c.size()], c[gen() % c.size()]);
      }
    }
    auto r = Evaluate(segs);
    CHECK(r.bleu4 <= best.bleu4 + 1e-12);
    CHECK(r.meteor <= best.meteor + 1e-12);
    CHECK(*r.cider <= *best.cider + 1e-9);
    for (size_t i = 0; i < segs.size(); ++i) {
      CHECK(r.segments[i].meteor <= best.segments[i].meteor + 1e-12);
    }
  }
}

TEST_CASE("appending a non-matching token never raises BLEU") {
  std::vector<EvalSegment> segs = {Seg("the cat sat on the mat", {"the cat sat on the mat today"}),
                                   Seg("a b c d", {"a b c d e"})};
  const double base = CorpusBleu(segs);
  segs[0].candidate.push_back("qqq");
  CHECK(CorpusBleu(segs) <= base);
}

TEST_CASE("segment files") {
  auto dir = testing::TempDir("metrics_files");
  testing::WriteFile(dir / "c.txt", "a b\nc d\n");
  testing::WriteFile(dir / "r.txt", "a b\n");
  try {
    LoadSegments(dir / "c.txt", dir / "r.txt");
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kCountMismatch);
  }
  CHECK_THROWS_AS(LoadSegments(dir / "missing", dir / "r.txt"), Error);

  testing::WriteFile(dir / "c.jsonl",
                     "{\"id\":\"1\",\"out\":\"A b\"}\n{\"id\":\"2\",\"out\":\"c\"}\n");
  testing::WriteFile(dir / "r.jsonl",
                     "{\"q\":[\"a b\",\"x\"]}\n{\"q\":\"c\"}\n");
  SegmentFileOptions opts{"out", "q"};
  auto segs = LoadSegments(dir / "c.jsonl", dir / "r.jsonl", opts);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].candidate == Tokens{"a", "b"});
  CHECK(segs[0].references.size() == 2);
  CHECK(segs[1].references == std::vector<Tokens>{{"c"}});
  SegmentFileOptions bad{"nope", "q"};
  CHECK_THROWS_AS(LoadSegments(dir / "c.jsonl", dir / "r.jsonl", bad), Error);
}

TEST_CASE("report formats") {
  std::vector<EvalSegment> segs = {Seg("a b c d", {"a b c d"}),
                                   Seg("e f g h", {"e f g h"})};
  auto report = Evaluate(segs);
  auto text = FormatReport(report);
  CHECK(text.find("exact-METEOR") != std::string::npos);
  CHECK(text.find("SPICE") != std::string::npos);
  CHECK(text.find("100.000000") != std::string::npos);
  auto doc = nlohmann::json::parse(ReportJson(report));
  CHECK(doc["per_segment"].size() == 2);
  CHECK(doc["spice"] == "not implemented");
  CHECK(doc["bleu4"].get<double>() == 100.0);
}

}  // namespace
}  // namespace nppkit
