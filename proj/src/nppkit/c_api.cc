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

#include "nppkit/nppkit.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nppkit/corpus.h"
#include "nppkit/instance_builder.h"
#include "nppkit/metrics.h"
#include "nppkit/phrase_extraction.h"
#include "nppkit/pipeline.h"
#include "nppkit/random.h"
#include "nppkit/status.h"
#include "nppkit/treebank.h"

struct npp_tree {
  nppkit::ConstituencyTree tree;
};

struct npp_phrases {
  nppkit::PhraseGroups groups;
};

struct npp_instance {
  npp_skip_reason skip = NPP_SKIP_NONE;
  std::string id;
  std::string query;
  std::vector<std::string> choices;
  size_t answer_index = 0;
  std::string input;
  std::string target;
  std::string record;
};

struct npp_pairs {
  struct Entry {
    std::string p;
    std::string q;
    size_t split_point;
  };
  std::vector<Entry> entries;
};

struct npp_strings {
  std::vector<std::string> items;
};

struct npp_report {
  nppkit::EvalReport report;
};

struct npp_config {
  nppkit::PipelineConfig config;
};

struct npp_run {
  nppkit::RunResult result;
};

namespace {

thread_local std::string last_error;

npp_status ToStatus(nppkit::ErrorCode code) {
  using nppkit::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return NPP_ERR_INVALID_ARGUMENT;
    case ErrorCode::kUnbalancedBrackets: return NPP_ERR_UNBALANCED_BRACKETS;
    case ErrorCode::kEmptyConstituent: return NPP_ERR_EMPTY_CONSTITUENT;
    case ErrorCode::kMalformedLabel: return NPP_ERR_MALFORMED_LABEL;
    case ErrorCode::kMalformedTree: return NPP_ERR_MALFORMED_TREE;
    case ErrorCode::kMoreChoicesThanLetters:
      return NPP_ERR_MORE_CHOICES_THAN_LETTERS;
    case ErrorCode::kRatioSumInvalid: return NPP_ERR_RATIO_SUM_INVALID;
    case ErrorCode::kCountMismatch: return NPP_ERR_COUNT_MISMATCH;
    case ErrorCode::kSingleSegmentCorpus: return NPP_ERR_SINGLE_SEGMENT_CORPUS;
    case ErrorCode::kIo: return NPP_ERR_IO;
    case ErrorCode::kConfig: return NPP_ERR_CONFIG;
    case ErrorCode::kContractViolation: return NPP_ERR_CONTRACT_VIOLATION;
  }
  return NPP_ERR_INTERNAL;
}

npp_status Fail(npp_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into a status and the thread's last
// error message.
template <typename Fn>
npp_status Guard(Fn &&body) {
  try {
    body();
    return NPP_OK;
  } catch (const nppkit::Error &e) {
    return Fail(ToStatus(e.code()), e.what());
  } catch (const std::bad_alloc &) {
    return Fail(NPP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception &e) {
    return Fail(NPP_ERR_INTERNAL, e.what());
  } catch (...) {
    return Fail(NPP_ERR_INTERNAL, "unknown error");
  }
}

#define NPP_REQUIRE(cond)                                               \
  do {                                                                  \
    if (!(cond)) return Fail(NPP_ERR_INVALID_ARGUMENT, #cond " failed"); \
  } while (0)

std::optional<nppkit::PhraseType> ToPhraseType(npp_phrase_type type) {
  switch (type) {
    case NPP_PHRASE_NP: return nppkit::PhraseType::kNP;
    case NPP_PHRASE_VP: return nppkit::PhraseType::kVP;
    case NPP_PHRASE_PP: return nppkit::PhraseType::kPP;
  }
  return std::nullopt;
}

npp_skip_reason ToSkip(nppkit::SkipReason reason) {
  using nppkit::SkipReason;
  switch (reason) {
    case SkipReason::kNoEligibleGroup: return NPP_SKIP_NO_ELIGIBLE_GROUP;
    case SkipReason::kAnswerAtSentenceStart:
      return NPP_SKIP_ANSWER_AT_SENTENCE_START;
    case SkipReason::kPoolTooSmall: return NPP_SKIP_POOL_TOO_SMALL;
    case SkipReason::kMalformedTree: return NPP_SKIP_MALFORMED_TREE;
    case SkipReason::kMoreChoicesThanLetters:
      return NPP_SKIP_MORE_CHOICES_THAN_LETTERS;
  }
  return NPP_SKIP_NONE;
}

char *CopyString(const std::string &s) {
  char *out = static_cast<char *>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

std::string Record(const std::string &id,
                   const nppkit::SerializedInstance &s) {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["input"] = s.input;
  j["target"] = s.target;
  return j.dump();
}

npp_status RunCommand(const npp_config *config, npp_run **out,
                      nppkit::RunResult (*command)(
                          const nppkit::PipelineConfig &)) {
  NPP_REQUIRE(out != nullptr);
  *out = nullptr;
  NPP_REQUIRE(config != nullptr);
  return Guard([&] {
    auto run = std::make_unique<npp_run>();
    run->result = command(config->config);
    *out = run.release();
  });
}

}  // namespace

extern "C" {

const char *npp_version(void) { return NPPKIT_VERSION; }

const char *npp_status_name(npp_status status) {
  switch (status) {
    case NPP_OK: return "OK";
    case NPP_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case NPP_ERR_UNBALANCED_BRACKETS: return "UnbalancedBrackets";
    case NPP_ERR_EMPTY_CONSTITUENT: return "EmptyConstituent";
    case NPP_ERR_MALFORMED_LABEL: return "MalformedLabel";
    case NPP_ERR_MALFORMED_TREE: return "MalformedTree";
    case NPP_ERR_MORE_CHOICES_THAN_LETTERS: return "MoreChoicesThanLetters";
    case NPP_ERR_RATIO_SUM_INVALID: return "RatioSumInvalid";
    case NPP_ERR_COUNT_MISMATCH: return "CountMismatch";
    case NPP_ERR_SINGLE_SEGMENT_CORPUS: return "SingleSegmentCorpus";
    case NPP_ERR_IO: return "Io";
    case NPP_ERR_CONFIG: return "Config";
    case NPP_ERR_CONTRACT_VIOLATION: return "ContractViolation";
    case NPP_ERR_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char *npp_last_error(void) { return last_error.c_str(); }

int npp_status_exit_code(npp_status status) {
  switch (status) {
    case NPP_OK: return 0;
    case NPP_ERR_INVALID_ARGUMENT:
    case NPP_ERR_CONFIG:
    case NPP_ERR_RATIO_SUM_INVALID:
      return 1;
    case NPP_ERR_IO: return 2;
    default: return 3;
  }
}

void npp_string_free(char *s) { std::free(s); }

//
// Treebank
//

npp_status npp_tree_parse(const char *text, size_t length, npp_tree **out) {
  NPP_REQUIRE(out != nullptr);
  *out = nullptr;
  NPP_REQUIRE(text != nullptr || length == 0);
  return Guard([&] {
    *out = new npp_tree{nppkit::ParsePtb(std::string_view(text, length))};
  });
}

void npp_tree_free(npp_tree *tree) { delete tree; }

size_t npp_tree_num_tokens(const npp_tree *tree) {
  return tree ? tree->tree.size() : 0;
}

const char *npp_tree_token(const npp_tree *tree, size_t index) {
  if (tree == nullptr || index >= tree->tree.size()) return nullptr;
  return tree->tree.tokens()[index].c_str();
}

npp_status npp_tree_to_bracketed(const npp_tree *tree, char **out) {
  NPP_REQUIRE(out != nullptr);
  *out = nullptr;
  NPP_REQUIRE(tree != nullptr);
  return Guard([&] { *out = CopyString(nppkit::ToBracketed(tree->tree)); });
}

npp_status npp_tree_nodes_with_label(const npp_tree *tree, const char *label,
                                     npp_span *spans, size_t capacity,
                                     size_t *count) {
  NPP_REQUIRE(tree != nullptr && label != nullptr && count != nullptr);
  NPP_REQUIRE(spans != nullptr || capacity == 0);
  return Guard([&] {
    const auto nodes = nppkit::NodesWithLabel(tree->tree, label);
    *count = nodes.size();
    for (size_t i = 0; i < nodes.size() && i < capacity; ++i) {
      spans[i] = {nodes[i]->span().start, nodes[i]->span().end};
    }
  });
}

//
// Phrases
//

npp_status npp_phrases_extract(const npp_tree *tree, npp_phrases **out) {
  NPP_REQUIRE(out != nullptr);
  *out = nullptr;
  NPP_REQUIRE(tree != nullptr);
  return Guard(
      [&] { *out = new npp_phrases{nppkit::ExtractPhrases(tree->tree)}; });
}

void npp_phrases_free(npp_phrases *phrases) { delete phrases; }

size_t npp_phrases_count(const npp_phrases *phrases, npp_phrase_type type) {
  auto t = ToPhraseType(type);
  if (phrases == nullptr || !t) return 0;
  return phrases->groups.of(*t).size();
}

npp_status npp_phrases_get(const npp_phrases *phrases, npp_phrase_type type,
                           size_t index, npp_span *span, const char **text) {
  NPP_REQUIRE(phrases != nullptr);
  auto t = ToPhraseType(type);
  NPP_REQUIRE(t.has_value());
  const auto &group = phrases->groups.of(*t);
  NPP_REQUIRE(index < group.size());
  if (span != nullptr) *span = {group[index].span.start, group[index].span.end};
  if (text != nullptr) *text = group[index].text.c_str();
  return NPP_OK;
}

const char *npp_phrase_type_name(npp_phrase_type type) {
  auto t = ToPhraseType(type);
  return t ? nppkit::PhraseTypeName(*t).data() : "?";
}

//
// Instances
//

npp_status npp_npp_build(const npp_tree *tree, const char *sentence_id,
                         uint64_t global_seed, size_t min_group_size,
                         npp_instance **out) {
  NPP_REQUIRE(out != nullptr);
  *out = nullptr;
  NPP_REQUIRE(tree != nullptr && sentence_id != nullptr);
  return Guard([&] {
    auto inst = std::make_unique<npp_instance>();
    inst->id = sentence_id;
    nppkit::Rng rng(nppkit::DeriveSeed(global_seed, inst->id));
    const nppkit::PhraseGroups groups = nppkit::ExtractPhrases(tree->tree);
    auto built = nppkit::BuildNppInstance(tree->tree, groups, inst->id, rng,
                                          min_group_size);
    if (auto *skip = std::get_if<nppkit::Skip>(&built)) {
      inst->skip = ToSkip(skip->reason);
    } else {
      const auto &instance = std::get<nppkit::NppInstance>(built);
      nppkit::VerifyNppInstance(instance, tree->tree, min_group_size);
      if (instance.choices.size() > nppkit::kMaxLetteredChoices) {
        inst->skip = NPP_SKIP_MORE_CHOICES_THAN_LETTERS;
        *out = inst.release();
        return;
      }
      const auto serialized = nppkit::SerializeNpp(instance);
      inst->query = nppkit::Detokenize(instance.partial_query);
      inst->choices = instance.choices;
      inst->answer_index = instance.answer_index;
      inst->input = serialized.input;
      inst->target = serialized.target;
      inst->record = Record(inst->id, serialized);
    }
    *out = inst.release();
  });
}

npp_status npp_nsp_build(const char *const *doc, size_t doc_length,
                         size_t index, const char *sentence_id,
                         const char *const *pool, size_t pool_length,
                         uint64_t global_seed, size_t distractors,
                         npp_instance **out) {
  NPP_REQUIRE(out != nullptr);
  *out = nullptr;
  NPP_REQUIRE(doc != nullptr && sentence_id != nullptr);
  NPP_REQUIRE(pool != nullptr || pool_length == 0);
  return Guard([&] {
    std::vector<std::string> doc_sentences(doc, doc + doc_length);
    std::vector<std::string> pool_sentences(pool, pool + pool_length);
    auto inst = std::make_unique<npp_instance>();
    inst->id = sentence_id;
    nppkit::Rng rng(nppkit::DeriveSeed(global_seed, inst->id));
    nppkit::SentencePool sentence_pool(pool_sentences);
    auto built = nppkit::BuildNspInstance(doc_sentences, index, inst->id,
                                          sentence_pool, rng, distractors);
    if (auto *skip = std::get_if<nppkit::Skip>(&built)) {
      inst->skip = ToSkip(skip->reason);
    } else {
      const auto &instance = std::get<nppkit::NspInstance>(built);
      const auto serialized = nppkit::SerializeNsp(instance);
      inst->query = instance.context;
      inst->choices = instance.choices;
      inst->answer_index = instance.answer_index;
      inst->input = serialized.input;
      inst->target = serialized.target;
      inst->record = Record(inst->id, serialized);
    }
    *out = inst.release();
  });
}

void npp_instance_free(npp_instance *instance) { delete instance; }

npp_skip_reason npp_instance_skip_reason(const npp_instance *instance) {
  return instance ? instance->skip : NPP_SKIP_NONE;
}

const char *npp_instance_id(const npp_instance *instance) {
  return instance ? instance->id.c_str() : nullptr;
}

const char *npp_instance_input(const npp_instance *instance) {
  return instance && instance->skip == NPP_SKIP_NONE ? instance->input.c_str()
                                                     : nullptr;
}

const char *npp_instance_target(const npp_instance *instance) {
  return instance && instance->skip == NPP_SKIP_NONE ? instance->target.c_str()
                                                     : nullptr;
}

const char *npp_instance_query(const npp_instance *instance) {
  return instance && instance->skip == NPP_SKIP_NONE ? instance->query.c_str()
                                                     : nullptr;
}

size_t npp_instance_num_choices(const npp_instance *instance) {
  return instance ? instance->choices.size() : 0;
}

const char *npp_instance_choice(const npp_instance *instance, size_t index) {
  if (instance == nullptr || index >= instance->choices.size()) return nullptr;
  return instance->choices[index].c_str();
}

size_t npp_instance_answer_index(const npp_instance *instance) {
  return instance ? instance->answer_index : 0;
}

const char *npp_instance_record(const npp_instance *instance) {
  return instance && instance->skip == NPP_SKIP_NONE ? instance->record.c_str()
                                                     : nullptr;
}

//
// Pairs
//

npp_status npp_pairs_build(const char *const *tokens, size_t count,
                           const char *sentence_id, npp_pairs **out) {
  NPP_REQUIRE(out != nullptr);
  *out = nullptr;
  NPP_REQUIRE(tokens != nullptr || count == 0);
  NPP_REQUIRE(sentence_id != nullptr);
  return Guard([&] {
    std::vector<std::string> words(tokens, tokens + count);
    auto pairs = std::make_unique<npp_pairs>();
    for (const auto &pair : nppkit::BuildCompletionPairs(words, sentence_id)) {
      pairs->entries.push_back({nppkit::Detokenize(pair.p),
                                nppkit::Detokenize(pair.q), pair.split_point});
    }
    *out = pairs.release();
  });
}

void npp_pairs_free(npp_pairs *pairs) { delete pairs; }

size_t npp_pairs_count(const npp_pairs *pairs) {
  return pairs ? pairs->entries.size() : 0;
}

npp_status npp_pairs_get(const npp_pairs *pairs, size_t index, const char **p,
                         const char **q, size_t *split_point) {
  NPP_REQUIRE(pairs != nullptr && index < pairs->entries.size());
  const auto &entry = pairs->entries[index];
  if (p != nullptr) *p = entry.p.c_str();
  if (q != nullptr) *q = entry.q.c_str();
  if (split_point != nullptr) *split_point = entry.split_point;
  return NPP_OK;
}

//
// Text processing
//

npp_status npp_split_sentences(const char *document, npp_strings **out) {
  NPP_REQUIRE(out != nullptr);
  *out = nullptr;
  NPP_REQUIRE(document != nullptr);
  return Guard(
      [&] { *out = new npp_strings{nppkit::SplitSentences(document)}; });
}

npp_status npp_tokenize(const char *sentence, npp_strings **out) {
  NPP_REQUIRE(out != nullptr);
  *out = nullptr;
  NPP_REQUIRE(sentence != nullptr);
  return Guard([&] { *out = new npp_strings{nppkit::Tokenize(sentence)}; });
}

void npp_strings_free(npp_strings *strings) { delete strings; }

size_t npp_strings_count(const npp_strings *strings) {
  return strings ? strings->items.size() : 0;
}

const char *npp_strings_get(const npp_strings *strings, size_t index) {
  if (strings == nullptr || index >= strings->items.size()) return nullptr;
  return strings->items[index].c_str();
}

//
// Metrics
//

npp_status npp_report_from_lines(const char *const *candidates,
                                 const char *const *references, size_t count,
                                 npp_report **out) {
  NPP_REQUIRE(out != nullptr);
  *out = nullptr;
  NPP_REQUIRE(count > 0 && candidates != nullptr && references != nullptr);
  return Guard([&] {
    std::vector<nppkit::EvalSegment> segments;
    for (size_t i = 0; i < count; ++i) {
      std::vector<std::string> refs;
      std::string line = references[i] ? references[i] : "";
      size_t start = 0;
      while (true) {
        size_t tab = line.find('\t', start);
        refs.push_back(line.substr(start, tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
      }
      segments.push_back(
          nppkit::MakeSegment(candidates[i] ? candidates[i] : "", refs));
    }
    *out = new npp_report{nppkit::Evaluate(segments)};
  });
}

npp_status npp_report_from_files(const char *candidates_path,
                                 const char *references_path,
                                 npp_report **out) {
  NPP_REQUIRE(out != nullptr);
  *out = nullptr;
  NPP_REQUIRE(candidates_path != nullptr && references_path != nullptr);
  return Guard([&] {
    *out = new npp_report{
        nppkit::EvaluateFiles(candidates_path, references_path)};
  });
}

void npp_report_free(npp_report *report) { delete report; }

double npp_report_bleu4(const npp_report *report) {
  return report ? report->report.bleu4 : 0.0;
}

double npp_report_meteor(const npp_report *report) {
  return report ? report->report.meteor : 0.0;
}

double npp_report_cider(const npp_report *report, int *defined) {
  const bool ok = report != nullptr && report->report.cider.has_value();
  if (defined != nullptr) *defined = ok ? 1 : 0;
  return ok ? *report->report.cider : 0.0;
}

size_t npp_report_num_segments(const npp_report *report) {
  return report ? report->report.segments.size() : 0;
}

npp_status npp_report_segment(const npp_report *report, size_t index,
                              double *bleu, double *meteor, double *cider) {
  NPP_REQUIRE(report != nullptr && index < report->report.segments.size());
  const auto &s = report->report.segments[index];
  if (bleu != nullptr) *bleu = s.bleu;
  if (meteor != nullptr) *meteor = s.meteor;
  if (cider != nullptr) *cider = s.cider.value_or(0.0);
  return NPP_OK;
}

npp_status npp_report_format(const npp_report *report, char **text) {
  NPP_REQUIRE(text != nullptr);
  *text = nullptr;
  NPP_REQUIRE(report != nullptr);
  return Guard(
      [&] { *text = CopyString(nppkit::FormatReport(report->report)); });
}

npp_status npp_report_json(const npp_report *report, char **json) {
  NPP_REQUIRE(json != nullptr);
  *json = nullptr;
  NPP_REQUIRE(report != nullptr);
  return Guard([&] { *json = CopyString(nppkit::ReportJson(report->report)); });
}

//
// Pipeline
//

npp_status npp_config_new(npp_config **out) {
  NPP_REQUIRE(out != nullptr);
  *out = nullptr;
  return Guard([&] { *out = new npp_config(); });
}

void npp_config_free(npp_config *config) { delete config; }

npp_status npp_config_set(npp_config *config, const char *key,
                          const char *value) {
  NPP_REQUIRE(config != nullptr && key != nullptr && value != nullptr);
  return Guard([&] { config->config.Set(key, value); });
}

npp_status npp_config_load(npp_config *config, const char *path) {
  NPP_REQUIRE(config != nullptr && path != nullptr);
  return Guard([&] { config->config.LoadFile(path); });
}

npp_status npp_run_build_npp(const npp_config *config, npp_run **out) {
  return RunCommand(config, out, &nppkit::RunBuildNpp);
}

npp_status npp_run_build_pairs(const npp_config *config, npp_run **out) {
  return RunCommand(config, out, &nppkit::RunBuildPairs);
}

npp_status npp_run_build_nsp(const npp_config *config, npp_run **out) {
  return RunCommand(config, out, &nppkit::RunBuildNsp);
}

npp_status npp_run_stats(const npp_config *config, const char *const *names,
                         const char *const *paths, size_t count,
                         npp_run **out) {
  NPP_REQUIRE(out != nullptr);
  *out = nullptr;
  NPP_REQUIRE(config != nullptr);
  NPP_REQUIRE(count == 0 || (names != nullptr && paths != nullptr));
  return Guard([&] {
    std::vector<nppkit::DatasetInput> datasets;
    for (size_t i = 0; i < count; ++i) {
      if (names[i] == nullptr || paths[i] == nullptr) {
        throw nppkit::Error(nppkit::ErrorCode::kInvalidArgument,
                            "null dataset name or path");
      }
      datasets.push_back({names[i], paths[i]});
    }
    auto run = std::make_unique<npp_run>();
    run->result = nppkit::RunStats(config->config, datasets);
    *out = run.release();
  });
}

npp_status npp_run_evaluate(const npp_config *config,
                            const char *candidates_path,
                            const char *references_path,
                            const char *report_path, npp_run **out) {
  NPP_REQUIRE(out != nullptr);
  *out = nullptr;
  NPP_REQUIRE(config != nullptr && candidates_path != nullptr &&
              references_path != nullptr);
  return Guard([&] {
    auto run = std::make_unique<npp_run>();
    run->result = nppkit::RunEvaluate(config->config, candidates_path,
                                      references_path,
                                      report_path ? report_path : "");
    *out = run.release();
  });
}

void npp_run_free(npp_run *run) { delete run; }

const char *npp_run_summary(const npp_run *run) {
  return run ? run->result.summary.c_str() : nullptr;
}

npp_status npp_run_count(const npp_run *run, const char *key,
                         uint64_t *value) {
  NPP_REQUIRE(run != nullptr && key != nullptr && value != nullptr);
  std::string k = key;
  if (k.rfind("skip.", 0) == 0) {
    auto it = run->result.skips.find(k.substr(5));
    if (it == run->result.skips.end()) {
      return Fail(NPP_ERR_INVALID_ARGUMENT, "no skip bucket " + k);
    }
    *value = it->second;
    return NPP_OK;
  }
  auto it = run->result.counts.find(k);
  if (it == run->result.counts.end()) {
    return Fail(NPP_ERR_INVALID_ARGUMENT, "no counter " + k);
  }
  *value = it->second;
  return NPP_OK;
}

}  // extern "C"
