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

#ifndef NPPKIT_PIPELINE_H_
#define NPPKIT_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "nppkit/corpus.h"

namespace nppkit {

// Settings for one pipeline run. Every key accepted by Set() can also appear
// in a key=value config file.
struct PipelineConfig {
  uint64_t seed = 0;
  size_t min_group_size = 2;
  SplitRatios ratios;
  std::filesystem::path guard_list;  // empty: built-in abbreviation list
  std::optional<InputMode> input_mode;
  std::string template_name = "lettered";
  size_t distractors = 1;
  size_t workers = 1;
  std::optional<uint64_t> sample;
  std::string corpus_name;  // empty: stem of the input path
  std::filesystem::path input;
  std::filesystem::path out_dir;
  std::string candidates_field;
  std::string references_field;
  std::string unit = "sentences";  // stats: "sentences" or "pairs"

  // Throws Error(kConfig) for an unknown key or an unparsable value.
  void Set(std::string_view key, std::string_view value);

  // key=value per line; '#' starts a comment. Throws Error(kIo) or
  // Error(kConfig).
  void LoadFile(const std::filesystem::path &path);

  // Throws Error(kConfig) or Error(kRatioSumInvalid).
  void Validate() const;

  nlohmann::ordered_json Snapshot() const;
};

// Outcome of a command: counters, skip-reason histogram and the text shown
// to the user.
struct RunResult {
  std::string command;
  std::map<std::string, uint64_t> counts;
  std::map<std::string, uint64_t> skips;
  std::string summary;
};

// Trees -> lowest phrases -> one NPP instance per tree. Writes npp.jsonl,
// npp.stats.json and manifest.json under out_dir.
RunResult RunBuildNpp(const PipelineConfig &config);

// Sentences -> train/dev/test partition -> every (p, q) split. Writes
// pairs.{train,dev,test}.jsonl, stats.txt, stats.json and manifest.json.
RunResult RunBuildPairs(const PipelineConfig &config);

// Consecutive sentence pairs with distractors from other documents. Writes
// nsp.jsonl, nsp.stats.json and manifest.json.
RunResult RunBuildNsp(const PipelineConfig &config);

struct DatasetInput {
  std::string name;
  std::filesystem::path path;
};

// Table of per-split counts, one row per dataset. When out_dir is set, also
// writes stats.txt and stats.json there.
RunResult RunStats(const PipelineConfig &config,
                   std::span<const DatasetInput> datasets);

// Scores candidates against references; writes the text report to
// `report_path` (when non-empty) and the JSON sidecar next to it.
RunResult RunEvaluate(const PipelineConfig &config,
                      const std::filesystem::path &candidates,
                      const std::filesystem::path &references,
                      const std::filesystem::path &report_path);

// Lowercase hex SHA-256 of a file. Throws Error(kIo).
std::string FileSha256(const std::filesystem::path &path);

// Writes `content` to a sibling temporary file, then renames it over `path`.
void WriteFileAtomic(const std::filesystem::path &path,
                     std::string_view content);

}  // namespace nppkit

#endif  // NPPKIT_PIPELINE_H_
