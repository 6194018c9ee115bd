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

// Acceptance checks, one line per criterion. Exit status is nonzero if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli_runner.h"
#include "json.hpp"
#include "nppkit/corpus.h"
#include "nppkit/instance_builder.h"
#include "nppkit/metrics.h"
#include "nppkit/phrase_extraction.h"
#include "nppkit/random.h"
#include "nppkit/treebank.h"
#include "test_support.h"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace nppkit;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

#define EXPECT(cond, msg)               \
  do {                                  \
    if (!(cond)) return {false, (msg)}; \
  } while (0)

Outcome PieVp() {
  auto tree = ParsePtb(testing::kPieTree);
  auto groups = ExtractPhrases(tree);
  EXPECT(groups.vp.size() == 1, "expected one VP, got " +
                                    std::to_string(groups.vp.size()));
  EXPECT(groups.vp[0].text == "eat pie", "VP is '" + groups.vp[0].text + "'");
  EXPECT(NodesWithLabel(tree, "VP").size() == 3, "tree should hold 3 VPs");
  return {true, "VP = [\"eat pie\"]"};
}

Outcome ShopSentence() {
  auto tree = ParsePtb(testing::kShopTree);
  auto groups = ExtractPhrases(tree);
  std::vector<std::string> nps;
  for (const auto &p : groups.np) nps.push_back(p.text);
  EXPECT((nps == std::vector<std::string>{"a top and bottom",
                                          "that strange little shop"}),
         "NP group mismatch");
  const std::string id = "fixture/0/0";
  Rng rng(DeriveSeed(testing::kShopSeed, id));
  auto built = BuildNppInstance(tree, groups, id, rng, 2);
  EXPECT(std::holds_alternative<NppInstance>(built), "instance skipped");
  const auto &inst = std::get<NppInstance>(built);
  EXPECT(inst.phrase_type == PhraseType::kNP, "group is not NP");
  EXPECT(Detokenize(inst.partial_query) == "She bought", "query mismatch");
  EXPECT(inst.answer() == "a top and bottom", "answer mismatch");
  return {true, "query \"She bought\", answer \"a top and bottom\""};
}

Outcome ExtractionOracle() {
  std::mt19937_64 gen(1000);
  size_t phrases = 0;
  for (int i = 0; i < 1000; ++i) {
    ConstituencyTree tree(testing::RandomNode(gen, 1, 8, 4));
    auto groups = ExtractPhrases(tree);
    for (PhraseType type : kPhraseTypes) {
      const std::string label(PhraseTypeName(type));
      EXPECT(testing::Spans(groups.of(type)) ==
                 testing::LowestOracle(tree, label),
             "tree " + std::to_string(i) + " " + label + " disagrees");
      phrases += groups.of(type).size();
    }
  }
  return {true, "1000/1000 trees agree (" + std::to_string(phrases) +
                    " phrases)"};
}

Outcome PairLaw() {
  std::mt19937_64 gen(4);
  const std::vector<std::string> vocab = {"we", "meet", "at", "noon", "on",
                                          "friday", "the", "cat", "sat"};
  auto dir = testing::TempDir("acceptance_pairs");
  std::ofstream corpus(dir / "sentences.txt");
  uint64_t expected = 0, tokens_total = 0;
  for (int i = 0; i < 10000; ++i) {
    const size_t n = 2 + gen() % 59;
    std::vector<std::string> tokens;
    for (size_t k = 0; k + 1 < n; ++k) tokens.push_back(vocab[gen() % 9]);
    tokens.push_back(".");
    auto pairs = BuildCompletionPairs(tokens, "s/" + std::to_string(i));
    EXPECT(pairs.size() == n - 1, "wrong pair count at sentence " +
                                      std::to_string(i));
    for (size_t k = 0; k < pairs.size(); ++k) {
      auto joined = pairs[k].p;
      joined.insert(joined.end(), pairs[k].q.begin(), pairs[k].q.end());
      EXPECT(joined == tokens, "pair does not reconstruct sentence");
      EXPECT(pairs[k].split_point == k + 1 && !pairs[k].q.empty(),
             "bad split point");
    }
    expected += n - 1;
    tokens_total += n;
    corpus << Detokenize(tokens) << '\n';
  }
  corpus.close();

  auto r = testing::RunCli({"build-pairs", "--input",
                            (dir / "sentences.txt").string(), "--input-mode",
                            "doc-per-line", "--out", (dir / "o").string()});
  EXPECT(r.exit_code == 0, "build-pairs failed: " + r.err);
  auto manifest = json::parse(testing::ReadFile(dir / "o" / "manifest.json"));
  const auto &c = manifest["counts"];
  EXPECT(c["sentences"] == 10000, "manifest sentences != 10000");
  EXPECT(c["tokens"] == tokens_total, "manifest tokens mismatch");
  EXPECT(c["pairs"] == expected, "manifest pairs != sum(n-1)");
  EXPECT(c["pairs_train"].get<uint64_t>() + c["pairs_dev"].get<uint64_t>() +
                 c["pairs_test"].get<uint64_t>() ==
             expected,
         "split pair counts do not sum to total");
  uint64_t lines = 0;
  for (const char *split : {"train", "dev", "test"}) {
    std::ifstream in(dir / "o" / (std::string("pairs.") + split + ".jsonl"));
    for (std::string line; std::getline(in, line);) ++lines;
  }
  EXPECT(lines == expected, "pair files hold " + std::to_string(lines) +
                                " lines, expected " + std::to_string(expected));
  return {true, std::to_string(expected) + " pairs, manifest reconciles"};
}

EvalSegment Seg(const std::string &c, const std::vector<std::string> &refs) {
  return MakeSegment(c, refs);
}

Outcome MetricIdentities() {
  const char *lines[] = {"she bought a top and bottom",
                         "we will meet at noon on friday",
                         "automatic target recognition is hard",
                         "the cat sat on the mat",
                         "please send the report before the meeting"};
  std::vector<EvalSegment> segs;
  for (const char *l : lines) segs.push_back(Seg(l, {l}));
  auto report = Evaluate(segs);
  EXPECT(report.bleu4 == 100.0, "identity BLEU-4 != 100");
  EXPECT(report.cider && std::fabs(*report.cider - 10.0) < 1e-9,
         "identity CIDEr != 10");
  for (size_t i = 0; i < segs.size(); ++i) {
    const double m = static_cast<double>(segs[i].candidate.size());
    EXPECT(std::fabs(report.segments[i].meteor - (1 - 0.5 / (m * m * m))) <
               1e-12,
           "identity METEOR off at segment " + std::to_string(i));
  }
  auto clip = Seg("the the the", {"the cat"});
  auto m = ClippedNgramMatches(clip.candidate, clip.references, 1);
  EXPECT(std::fabs(static_cast<double>(m.matches) / m.total - 1.0 / 3) < 1e-9,
         "clipped precision != 1/3");
  EXPECT(std::fabs(SegmentMeteor(Seg("the cat sat", {"the cat napped"})) -
                   0.625) < 1e-9,
         "METEOR hand case != 0.625");
  return {true, "BLEU 100, CIDEr 10, METEOR identity, 1/3 and 0.625 cases"};
}

Outcome AnswerUniformity() {
  auto tree = ParsePtb(
      "(S (NP (DT The) (NN cat)) (VP (VBD sat) (PP (IN on) (NP (DT the) "
      "(NN mat))) (PP (IN near) (NP (DT the) (NN door)))) (. .))");
  auto groups = ExtractPhrases(tree);
  groups.np.clear();  // leaves exactly the two PPs
  const size_t n = 10000;
  size_t first = 0;
  for (size_t i = 0; i < n; ++i) {
    const std::string id = "u/0/" + std::to_string(i);
    Rng rng(DeriveSeed(12345, id));
    auto built = BuildNppInstance(tree, groups, id, rng, 2);
    EXPECT(std::holds_alternative<NppInstance>(built), "unexpected skip");
    const auto &inst = std::get<NppInstance>(built);
    EXPECT(inst.choices.size() == 2, "not a two-choice instance");
    first += inst.answer_index == 0;
  }
  const double freq = static_cast<double>(first) / n;
  char buf[64];
  std::snprintf(buf, sizeof buf, "freq(answer_index=0) = %.4f", freq);
  EXPECT(freq >= 0.48 && freq <= 0.52, buf);
  return {true, buf};
}

Outcome Determinism() {
  auto dir = testing::TempDir("acceptance_determinism");
  std::mt19937_64 gen(7);
  std::ofstream bank(dir / "bank.ptb");
  bank << testing::ReadFile(testing::DataDir() / "fixture.ptb");
  for (int i = 0; i < 3000; ++i) {
    bank << ToBracketed(ConstituencyTree(testing::RandomNode(gen, 1, 6, 4)))
         << '\n';
  }
  bank.close();
  std::vector<std::string> files;
  for (int workers : {1, 8}) {
    for (int rep = 0; rep < 2; ++rep) {
      const auto out = dir / ("w" + std::to_string(workers) + "_" +
                              std::to_string(rep));
      auto r = testing::RunCli({"build-npp", "--input",
                                (dir / "bank.ptb").string(), "--out",
                                out.string(), "--seed", "42", "--workers",
                                std::to_string(workers)});
      EXPECT(r.exit_code == 0, "build-npp failed: " + r.err);
      files.push_back(testing::ReadFile(out / "npp.jsonl"));
    }
  }
  EXPECT(!files[0].empty(), "no instances written");
  for (size_t i = 1; i < files.size(); ++i) {
    EXPECT(files[i] == files[0], "run " + std::to_string(i) + " differs");
  }
  return {true, "4 runs byte-identical (" + std::to_string(files[0].size()) +
                    " bytes)"};
}

Outcome StatsShape() {
  const auto fixture = testing::DataDir() / "stats_fixture.txt";
  const auto sentences = SplitSentences(testing::ReadFile(fixture));
  auto r = testing::RunCli({"stats", "--ratios", "0.6,0.2,0.2", "--dataset",
                            "Fixture=" + fixture.string()});
  EXPECT(r.exit_code == 0, "stats failed: " + r.err);
  std::istringstream table(r.out);
  std::string header, row, extra;
  std::getline(table, header);
  std::getline(table, row);
  EXPECT(!std::getline(table, extra) || extra.empty(), "extra table rows");
  std::istringstream hs(header);
  std::vector<std::string> cols;
  for (std::string c; hs >> c;) cols.push_back(c);
  EXPECT((cols == std::vector<std::string>{"Dataset", "Train", "Dev", "Test"}),
         "header is '" + header + "'");
  std::istringstream rs(row);
  std::string name;
  uint64_t train = 0, dev = 0, test = 0;
  rs >> name >> train >> dev >> test;
  EXPECT(name == "Fixture", "row name is '" + name + "'");
  EXPECT(train + dev + test == sentences.size(),
         "counts sum to " + std::to_string(train + dev + test) + ", input has " +
             std::to_string(sentences.size()));
  return {true, std::to_string(train) + "+" + std::to_string(dev) + "+" +
                    std::to_string(test) + " = " +
                    std::to_string(sentences.size()) + " sentences"};
}

}  // namespace

int main() {
  struct Criterion {
    const char *name;
    double budget_s;  // 0: none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"pie sentence lowest VP", 1, PieVp},
      {"shop sentence NP group and instance", 1, ShopSentence},
      {"extraction matches brute-force oracle", 10, ExtractionOracle},
      {"completion pair law and manifest totals", 10, PairLaw},
      {"metric identities and hand values", 0, MetricIdentities},
      {"answer position uniformity", 0, AnswerUniformity},
      {"build-npp determinism across workers", 0, Determinism},
      {"stats table shape and totals", 0, StatsShape},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    if (o.ok && criteria[i].budget_s > 0 && secs >= criteria[i].budget_s) {
      o = {false, "took " + std::to_string(secs) + " s"};
    }
    failed += !o.ok;
    std::printf("%s criterion %zu: %s (%.3f s) - %s\n", o.ok ? "PASS" : "FAIL",
                i + 1, criteria[i].name, secs, o.detail.c_str());
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
