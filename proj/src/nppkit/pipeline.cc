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

#include "nppkit/pipeline.h"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "nppkit/instance_builder.h"
#include "nppkit/metrics.h"
#include "nppkit/phrase_extraction.h"
#include "nppkit/random.h"
#include "nppkit/status.h"
#include "nppkit/treebank.h"

#ifndef NPPKIT_VERSION
#define NPPKIT_VERSION "0.0.0"
#endif

namespace nppkit {
namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

// Records read from the input per parallel batch; bounds peak memory.
constexpr size_t kBatchSize = 4096;
constexpr size_t kMaxWorkers = 256;

[[noreturn]] void ConfigError(const std::string &message) {
  throw Error(ErrorCode::kConfig, message);
}

uint64_t ParseUnsigned(std::string_view key, std::string_view value) {
  uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    ConfigError("invalid value for " + std::string(key) + ": '" +
                std::string(value) + "'");
  }
  return out;
}

double ParseDouble(std::string_view key, std::string_view value) {
  std::string text(value);
  char *end = nullptr;
  double out = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    ConfigError("invalid value for " + std::string(key) + ": '" + text + "'");
  }
  return out;
}

std::string Trim(std::string_view text) {
  const char *ws = " \t\r\n";
  size_t begin = text.find_first_not_of(ws);
  if (begin == std::string_view::npos) return "";
  size_t end = text.find_last_not_of(ws);
  return std::string(text.substr(begin, end - begin + 1));
}

std::string UtcTimestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Streams lines into a temporary file that replaces `path` on Commit().
class AtomicLineWriter {
 public:
  explicit AtomicLineWriter(fs::path path)
      : path_(std::move(path)), tmp_(path_.string() + ".tmp") {
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error(ErrorCode::kIo, "cannot write " + tmp_.string());
  }
  ~AtomicLineWriter() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      fs::remove(tmp_, ec);
    }
  }

  void Write(std::string_view line) {
    out_ << line << '\n';
    ++lines_;
  }

  void Commit() {
    out_.close();
    if (!out_) throw Error(ErrorCode::kIo, "write failed: " + tmp_.string());
    std::error_code ec;
    fs::rename(tmp_, path_, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot rename to " + path_.string());
    committed_ = true;
  }

  uint64_t lines() const { return lines_; }

 private:
  fs::path path_;
  fs::path tmp_;
  std::ofstream out_;
  uint64_t lines_ = 0;
  bool committed_ = false;
};

// Applies fn to every item on up to `workers` threads; results keep input
// order, so output never depends on the worker count.
template <typename Out, typename In, typename Fn>
std::vector<Out> OrderedMap(const std::vector<In> &items, size_t workers,
                            Fn fn) {
  std::vector<Out> out(items.size());
  const size_t n = items.size();
  const size_t threads = std::min(workers, n);
  if (threads <= 1) {
    for (size_t i = 0; i < n; ++i) out[i] = fn(items[i]);
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (size_t k = 0; k < threads; ++k) {
    pool.emplace_back([&, k] {
      try {
        for (size_t i = k; i < n; i += threads) out[i] = fn(items[i]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    });
  }
  for (auto &t : pool) t.join();
  for (auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

void RequireInputPath(const PipelineConfig &config) {
  if (config.input.empty()) ConfigError("no input path given");
  std::error_code ec;
  if (!fs::exists(config.input, ec)) {
    throw Error(ErrorCode::kIo, "input not found: " + config.input.string());
  }
}

void PrepareOutDir(const PipelineConfig &config) {
  if (config.out_dir.empty()) ConfigError("no output directory given");
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec || !fs::is_directory(config.out_dir)) {
    throw Error(ErrorCode::kIo,
                "cannot create output directory: " + config.out_dir.string());
  }
}

std::string CorpusName(const PipelineConfig &config) {
  if (!config.corpus_name.empty()) return config.corpus_name;
  std::string stem = config.input.stem().string();
  if (stem.empty()) stem = config.input.filename().string();
  return stem.empty() ? "corpus" : stem;
}

AbbreviationList LoadGuards(const PipelineConfig &config) {
  if (config.guard_list.empty()) return AbbreviationList::Default();
  return AbbreviationList::LoadFile(config.guard_list);
}

Json InputDigests(const fs::path &input) {
  Json inputs = Json::array();
  std::vector<fs::path> files;
  std::error_code ec;
  if (fs::is_directory(input, ec)) {
    for (const auto &entry : fs::directory_iterator(input, ec)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(input);
  }
  for (const auto &file : files) {
    inputs.push_back({{"path", file.string()},
                      {"bytes", fs::file_size(file, ec)},
                      {"sha256", FileSha256(file)}});
  }
  return inputs;
}

void WriteManifest(const PipelineConfig &config, const RunResult &result) {
  Json manifest;
  manifest["toolkit"] = "nppkit";
  manifest["version"] = NPPKIT_VERSION;
  manifest["command"] = result.command;
  manifest["config"] = config.Snapshot();
  manifest["inputs"] = InputDigests(config.input);
  manifest["counts"] = result.counts;
  manifest["skips"] = result.skips;
  manifest["created_at"] = UtcTimestamp();
  WriteFileAtomic(config.out_dir / "manifest.json", manifest.dump(2) + "\n");
}

void WriteSkipSidecar(const fs::path &path, uint64_t inputs, uint64_t outputs,
                      const std::map<std::string, uint64_t> &skips) {
  Json doc;
  doc["inputs"] = inputs;
  doc["outputs"] = outputs;
  doc["skips"] = skips;
  WriteFileAtomic(path, doc.dump(2) + "\n");
}

uint64_t SumSkips(const std::map<std::string, uint64_t> &skips) {
  uint64_t total = 0;
  for (const auto &entry : skips) total += entry.second;
  return total;
}

std::string QaRecord(const std::string &id, const SerializedInstance &s) {
  Json record;
  record["id"] = id;
  record["input"] = s.input;
  record["target"] = s.target;
  return record.dump();
}

// Ordinals of the records kept by --sample: `count` of `total`, uniformly
// without replacement (Floyd's algorithm).
std::vector<bool> SampleMask(uint64_t total, uint64_t count, uint64_t seed) {
  std::vector<bool> keep(total, count >= total);
  if (count >= total) return keep;
  Rng rng(DeriveSeed(seed, "sample"));
  for (uint64_t j = total - count; j < total; ++j) {
    uint64_t t = rng.Uniform(j + 1);
    keep[keep[t] ? j : t] = true;
  }
  return keep;
}

struct NppOutcome {
  std::string line;
  std::optional<SkipReason> skip;
};

NppOutcome BuildOneNpp(const PipelineConfig &config, const std::string &id,
                       std::string_view text) {
  NppOutcome outcome;
  std::optional<ConstituencyTree> tree;
  try {
    tree = ParsePtb(text);
  } catch (const Error &) {
    outcome.skip = SkipReason::kMalformedTree;
    return outcome;
  }
  const PhraseGroups groups = ExtractPhrases(*tree);
  Rng rng(DeriveSeed(config.seed, id));
  BuildResult<NppInstance> built =
      BuildNppInstance(*tree, groups, id, rng, config.min_group_size);
  if (const Skip *skip = std::get_if<Skip>(&built)) {
    outcome.skip = skip->reason;
    return outcome;
  }
  const NppInstance &instance = std::get<NppInstance>(built);
  VerifyNppInstance(instance, *tree, config.min_group_size);
  try {
    outcome.line = QaRecord(id, SerializeNpp(instance));
  } catch (const Error &e) {
    if (e.code() != ErrorCode::kMoreChoicesThanLetters) throw;
    outcome.skip = SkipReason::kMoreChoicesThanLetters;
  }
  return outcome;
}

}  // namespace

//
// PipelineConfig
//

void PipelineConfig::Set(std::string_view raw_key, std::string_view raw_value) {
  std::string key = Trim(raw_key);
  std::replace(key.begin(), key.end(), '-', '_');
  const std::string value = Trim(raw_value);
  if (key == "seed") {
    seed = ParseUnsigned(key, value);
  } else if (key == "min_group_size") {
    min_group_size = ParseUnsigned(key, value);
  } else if (key == "ratios") {
    std::vector<double> parts;
    std::stringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) parts.push_back(ParseDouble(key, Trim(item)));
    if (parts.size() != 3) ConfigError("ratios needs three values: train,dev,test");
    ratios = {parts[0], parts[1], parts[2]};
  } else if (key == "train_ratio") {
    ratios.train = ParseDouble(key, value);
  } else if (key == "dev_ratio") {
    ratios.dev = ParseDouble(key, value);
  } else if (key == "test_ratio") {
    ratios.test = ParseDouble(key, value);
  } else if (key == "guard_list") {
    guard_list = value;
  } else if (key == "input_mode") {
    input_mode = ParseInputMode(value);
    if (!input_mode) ConfigError("unknown input mode: " + value);
  } else if (key == "template") {
    template_name = value;
  } else if (key == "distractors") {
    distractors = ParseUnsigned(key, value);
  } else if (key == "workers") {
    workers = ParseUnsigned(key, value);
  } else if (key == "sample") {
    sample = ParseUnsigned(key, value);
  } else if (key == "corpus_name") {
    corpus_name = value;
  } else if (key == "input") {
    input = value;
  } else if (key == "out") {
    out_dir = value;
  } else if (key == "candidates_field") {
    candidates_field = value;
  } else if (key == "references_field") {
    references_field = value;
  } else if (key == "unit") {
    unit = value;
  } else {
    ConfigError("unknown config key: " + key);
  }
}

void PipelineConfig::LoadFile(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config " + path.string());
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (Trim(line).empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      ConfigError(path.string() + ":" + std::to_string(line_no) +
                  ": expected key=value");
    }
    Set(line.substr(0, eq), line.substr(eq + 1));
  }
}

void PipelineConfig::Validate() const {
  ratios.Validate();
  if (min_group_size == 0) ConfigError("min_group_size must be >= 1");
  if (template_name != "lettered") {
    ConfigError("unknown template: " + template_name);
  }
  if (workers == 0 || workers > kMaxWorkers) {
    ConfigError("workers must be in [1, 256]");
  }
  if (distractors == 0) ConfigError("distractors must be >= 1");
  if (distractors + 1 > 26) ConfigError("at most 25 distractors");
  if (unit != "sentences" && unit != "pairs") {
    ConfigError("unit must be 'sentences' or 'pairs'");
  }
}

Json PipelineConfig::Snapshot() const {
  Json doc;
  doc["seed"] = seed;
  doc["min_group_size"] = min_group_size;
  doc["ratios"] = {ratios.train, ratios.dev, ratios.test};
  doc["guard_list"] = guard_list.string();
  doc["input_mode"] =
      input_mode ? std::string(InputModeName(*input_mode)) : std::string();
  doc["template"] = template_name;
  doc["distractors"] = distractors;
  doc["workers"] = workers;
  doc["sample"] = sample ? Json(*sample) : Json(nullptr);
  doc["corpus_name"] = corpus_name;
  doc["input"] = input.string();
  doc["out"] = out_dir.string();
  return doc;
}

//
// Commands
//

RunResult RunBuildNpp(const PipelineConfig &config) {
  config.Validate();
  if (config.input_mode && *config.input_mode != InputMode::kTreebank) {
    ConfigError("build-npp reads a treebank (input_mode=treebank)");
  }
  RequireInputPath(config);
  PrepareOutDir(config);
  const std::string corpus = CorpusName(config);

  std::optional<std::vector<bool>> keep;
  if (config.sample) {
    uint64_t total = 0;
    ForEachNonBlankLine(config.input, [&](uint64_t, std::string_view) { ++total; });
    keep = SampleMask(total, *config.sample, config.seed);
  }

  RunResult result;
  result.command = "build-npp";
  for (SkipReason reason : {SkipReason::kNoEligibleGroup,
                            SkipReason::kAnswerAtSentenceStart,
                            SkipReason::kMalformedTree,
                            SkipReason::kMoreChoicesThanLetters}) {
    result.skips[std::string(SkipReasonName(reason))] = 0;
  }
  uint64_t trees_read = 0;
  uint64_t inputs = 0;

  AtomicLineWriter writer(config.out_dir / "npp.jsonl");
  std::vector<std::pair<std::string, std::string>> batch;
  auto flush = [&] {
    std::vector<NppOutcome> outcomes = OrderedMap<NppOutcome>(
        batch, config.workers,
        [&](const std::pair<std::string, std::string> &item) {
          return BuildOneNpp(config, item.first, item.second);
        });
    for (const NppOutcome &outcome : outcomes) {
      if (outcome.skip) {
        ++result.skips[std::string(SkipReasonName(*outcome.skip))];
      } else {
        writer.Write(outcome.line);
      }
    }
    batch.clear();
  };
  ForEachNonBlankLine(config.input, [&](uint64_t ordinal, std::string_view line) {
    ++trees_read;
    if (keep && !(*keep)[ordinal]) return;
    ++inputs;
    batch.emplace_back(SentenceId{corpus, 0, ordinal}.ToString(),
                       std::string(line));
    if (batch.size() >= kBatchSize) flush();
  });
  flush();
  writer.Commit();

  const uint64_t outputs = writer.lines();
  CheckContract(inputs == outputs + SumSkips(result.skips),
                "inputs != outputs + skips");
  result.counts = {{"trees_read", trees_read},
                   {"inputs", inputs},
                   {"instances", outputs},
                   {"skipped", SumSkips(result.skips)}};
  WriteSkipSidecar(config.out_dir / "npp.stats.json", inputs, outputs,
                   result.skips);
  WriteManifest(config, result);

  std::ostringstream summary;
  summary << "build-npp: " << inputs << " trees, " << outputs
          << " instances, " << SumSkips(result.skips) << " skipped\n";
  for (const auto &[reason, count] : result.skips) {
    summary << "  skip " << reason << ": " << count << '\n';
  }
  result.summary = summary.str();
  return result;
}

RunResult RunBuildPairs(const PipelineConfig &config) {
  config.Validate();
  RequireInputPath(config);
  PrepareOutDir(config);
  const InputMode mode = config.input_mode.value_or(InputMode::kDocPerLine);
  const std::string corpus = CorpusName(config);
  const AbbreviationList guards = LoadGuards(config);

  uint64_t malformed = 0;
  auto count_error = [&](uint64_t, const std::exception &) { ++malformed; };

  // Pass 1 fixes the sentence count, pass 2 streams the pairs.
  uint64_t sentences = 0;
  ForEachSentence(config.input, mode, corpus, guards,
                  [&](SentenceRecord &&) { ++sentences; }, count_error);
  SplitAssigner assigner(sentences, config.ratios, config.seed);

  AtomicLineWriter train(config.out_dir / "pairs.train.jsonl");
  AtomicLineWriter dev(config.out_dir / "pairs.dev.jsonl");
  AtomicLineWriter test(config.out_dir / "pairs.test.jsonl");
  std::array<AtomicLineWriter *, 3> writers = {&train, &dev, &test};
  std::array<uint64_t, 3> split_sentences{};
  uint64_t tokens = 0;
  uint64_t single_token = 0;
  uint64_t k = 0;
  malformed = 0;
  ForEachSentence(
      config.input, mode, corpus, guards,
      [&](SentenceRecord &&record) {
        CheckContract(k++ < sentences, "sentence count changed");
        const size_t split = static_cast<size_t>(assigner.Next());
        ++split_sentences[split];
        tokens += record.tokens.size();
        if (record.tokens.size() < 2) ++single_token;
        const std::string id = record.id.ToString();
        std::vector<CompletionPair> pairs =
            BuildCompletionPairs(record.tokens, id);
        CheckContract(pairs.size() + 1 == std::max<size_t>(record.tokens.size(), 1),
                      "pair count != n - 1");
        for (const CompletionPair &pair : pairs) {
          Json line;
          line["id"] = id + "#" + std::to_string(pair.split_point);
          line["p"] = Detokenize(pair.p);
          line["q"] = Detokenize(pair.q);
          writers[split]->Write(line.dump());
        }
      },
      count_error);
  CheckContract(k == sentences, "sentence count changed");
  for (AtomicLineWriter *w : writers) w->Commit();

  const uint64_t pairs = train.lines() + dev.lines() + test.lines();
  CheckContract(pairs + sentences == tokens,
                "pairs != sum over sentences of (n - 1)");
  RunResult result;
  result.command = "build-pairs";
  result.skips = {{"MalformedTree", malformed}};
  result.counts = {{"sentences", sentences},
                   {"tokens", tokens},
                   {"pairs", pairs},
                   {"single_token_sentences", single_token},
                   {"sentences_train", split_sentences[0]},
                   {"sentences_dev", split_sentences[1]},
                   {"sentences_test", split_sentences[2]},
                   {"pairs_train", train.lines()},
                   {"pairs_dev", dev.lines()},
                   {"pairs_test", test.lines()}};

  const DatasetStats pair_stats{corpus, train.lines(), dev.lines(),
                                test.lines()};
  const DatasetStats sentence_stats{corpus, split_sentences[0],
                                    split_sentences[1], split_sentences[2]};
  const std::string table = FormatStatsTable(std::span(&pair_stats, 1));
  WriteFileAtomic(config.out_dir / "stats.txt", table);
  Json stats;
  stats["dataset"] = corpus;
  stats["pairs"] = {{"train", pair_stats.train},
                    {"dev", pair_stats.dev},
                    {"test", pair_stats.test}};
  stats["sentences"] = {{"train", sentence_stats.train},
                        {"dev", sentence_stats.dev},
                        {"test", sentence_stats.test}};
  WriteFileAtomic(config.out_dir / "stats.json", stats.dump(2) + "\n");
  WriteManifest(config, result);

  result.summary = "build-pairs: " + std::to_string(sentences) +
                   " sentences, " + std::to_string(pairs) + " pairs\n" + table;
  return result;
}

RunResult RunBuildNsp(const PipelineConfig &config) {
  config.Validate();
  const InputMode mode = config.input_mode.value_or(InputMode::kDocPerLine);
  if (mode == InputMode::kTreebank) {
    ConfigError("build-nsp needs document structure (doc-per-line or "
                "doc-per-file input)");
  }
  RequireInputPath(config);
  PrepareOutDir(config);
  const std::string corpus = CorpusName(config);
  const AbbreviationList guards = LoadGuards(config);

  // The distractor pool spans the whole corpus, so sentences are held in
  // memory.
  std::vector<std::string> sentences;
  std::vector<std::pair<size_t, size_t>> docs;
  ForEachDocument(config.input, mode, [&](uint64_t, std::string_view text) {
    const size_t begin = sentences.size();
    for (std::string &s : SplitSentences(text, guards)) {
      sentences.push_back(std::move(s));
    }
    docs.emplace_back(begin, sentences.size());
  });

  struct Context {
    size_t doc;
    size_t index;
  };
  std::vector<Context> contexts;
  for (size_t d = 0; d < docs.size(); ++d) {
    const size_t len = docs[d].second - docs[d].first;
    for (size_t i = 0; i + 1 < len; ++i) contexts.push_back({d, i});
  }

  struct NspOutcome {
    std::string line;
    bool skipped = false;
  };
  const std::span<const std::string> all(sentences);
  std::vector<NspOutcome> outcomes = OrderedMap<NspOutcome>(
      contexts, config.workers, [&](const Context &c) {
        const auto [begin, end] = docs[c.doc];
        const std::string id = SentenceId{corpus, c.doc, c.index}.ToString();
        Rng rng(DeriveSeed(config.seed, id));
        SentencePool pool(all, begin, end);
        BuildResult<NspInstance> built = BuildNspInstance(
            all.subspan(begin, end - begin), c.index,
            corpus + "/" + std::to_string(c.doc), pool, rng,
            config.distractors);
        NspOutcome outcome;
        if (std::holds_alternative<Skip>(built)) {
          outcome.skipped = true;
        } else {
          outcome.line = QaRecord(id, SerializeNsp(std::get<NspInstance>(built)));
        }
        return outcome;
      });

  RunResult result;
  result.command = "build-nsp";
  result.skips = {{std::string(SkipReasonName(SkipReason::kPoolTooSmall)), 0}};
  AtomicLineWriter writer(config.out_dir / "nsp.jsonl");
  for (const NspOutcome &outcome : outcomes) {
    if (outcome.skipped) {
      ++result.skips.begin()->second;
    } else {
      writer.Write(outcome.line);
    }
  }
  writer.Commit();
  const uint64_t outputs = writer.lines();
  CheckContract(contexts.size() == outputs + SumSkips(result.skips),
                "inputs != outputs + skips");
  result.counts = {{"documents", docs.size()},
                   {"sentences", sentences.size()},
                   {"inputs", contexts.size()},
                   {"instances", outputs},
                   {"skipped", SumSkips(result.skips)}};
  WriteSkipSidecar(config.out_dir / "nsp.stats.json", contexts.size(), outputs,
                   result.skips);
  WriteManifest(config, result);
  result.summary = "build-nsp: " + std::to_string(contexts.size()) +
                   " contexts, " + std::to_string(outputs) + " instances, " +
                   std::to_string(SumSkips(result.skips)) + " skipped\n";
  return result;
}

RunResult RunStats(const PipelineConfig &config,
                   std::span<const DatasetInput> datasets) {
  config.Validate();
  std::vector<DatasetInput> inputs(datasets.begin(), datasets.end());
  if (inputs.empty()) {
    RequireInputPath(config);
    inputs.push_back({CorpusName(config), config.input});
  }
  const InputMode mode = config.input_mode.value_or(InputMode::kDocPerLine);
  const AbbreviationList guards = LoadGuards(config);
  const bool pairs = config.unit == "pairs";

  RunResult result;
  result.command = "stats";
  std::vector<DatasetStats> rows;
  Json sidecar = Json::array();
  for (const DatasetInput &dataset : inputs) {
    std::error_code ec;
    if (!fs::exists(dataset.path, ec)) {
      throw Error(ErrorCode::kIo, "input not found: " + dataset.path.string());
    }
    // Two passes: count, then stream each sentence into its split.
    uint64_t sentences = 0;
    ForEachSentence(
        dataset.path, mode, dataset.name, guards,
        [&](SentenceRecord &&) { ++sentences; },
        [](uint64_t, const std::exception &) {});
    SplitAssigner assigner(sentences, config.ratios, config.seed);
    uint64_t malformed = 0;
    uint64_t seen = 0;
    DatasetStats row{dataset.name, 0, 0, 0};
    ForEachSentence(
        dataset.path, mode, dataset.name, guards,
        [&](SentenceRecord &&record) {
          CheckContract(seen++ < sentences, "sentence count changed");
          const size_t n = record.tokens.size();
          const size_t units = pairs ? (n > 0 ? n - 1 : 0) : 1;
          switch (assigner.Next()) {
            case Split::kTrain: row.train += units; break;
            case Split::kDev: row.dev += units; break;
            case Split::kTest: row.test += units; break;
          }
        },
        [&](uint64_t, const std::exception &) { ++malformed; });
    CheckContract(seen == sentences, "sentence count changed");
    result.counts[dataset.name + ".sentences"] = sentences;
    result.skips[dataset.name + ".MalformedTree"] = malformed;
    sidecar.push_back({{"dataset", row.dataset},
                       {"unit", config.unit},
                       {"train", row.train},
                       {"dev", row.dev},
                       {"test", row.test},
                       {"total", row.total()},
                       {"sentences", sentences}});
    rows.push_back(std::move(row));
  }
  result.summary = FormatStatsTable(rows);
  if (!config.out_dir.empty()) {
    PrepareOutDir(config);
    WriteFileAtomic(config.out_dir / "stats.txt", result.summary);
    WriteFileAtomic(config.out_dir / "stats.json", sidecar.dump(2) + "\n");
  }
  return result;
}

RunResult RunEvaluate(const PipelineConfig &config,
                      const fs::path &candidates, const fs::path &references,
                      const fs::path &report_path) {
  SegmentFileOptions options;
  options.candidates_field = config.candidates_field;
  options.references_field = config.references_field;
  const EvalReport report = EvaluateFiles(candidates, references, options);
  RunResult result;
  result.command = "evaluate";
  result.counts["segments"] = report.segments.size();
  result.summary = FormatReport(report);
  if (!report_path.empty()) {
    WriteFileAtomic(report_path, result.summary);
    WriteFileAtomic(report_path.string() + ".json", ReportJson(report));
  }
  return result;
}

//
// Utilities
//

std::string FileSha256(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIo, "sha256 unavailable");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const std::streamsize got = in.gcount();
    if (got > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<size_t>(got));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static const char *hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

void WriteFileAtomic(const fs::path &path, std::string_view content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(ErrorCode::kIo, "write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot rename to " + path.string());
}

}  // namespace nppkit
