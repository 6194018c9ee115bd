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

// nppkit command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "nppkit/nppkit.h"

namespace {

struct ConfigDeleter {
  void operator()(npp_config *c) const { npp_config_free(c); }
};
struct RunDeleter {
  void operator()(npp_run *r) const { npp_run_free(r); }
};
using ConfigPtr = std::unique_ptr<npp_config, ConfigDeleter>;
using RunPtr = std::unique_ptr<npp_run, RunDeleter>;

int Report(npp_status status) {
  std::cerr << "nppkit: " << npp_status_name(status) << ": "
            << npp_last_error() << '\n';
  return npp_status_exit_code(status);
}

// Flags shared by every subcommand; unset ones leave the config file alone.
struct CommonFlags {
  std::string config_file;
  std::map<std::string, std::string> values;
};

void AddOption(CLI::App *cmd, CommonFlags &flags, const std::string &name,
               const std::string &help) {
  cmd->add_option_function<std::string>(
      "--" + name,
      [&flags, name](const std::string &v) { flags.values[name] = v; }, help);
}

void AddCommon(CLI::App *cmd, CommonFlags &flags) {
  cmd->add_option("--config", flags.config_file, "key=value config file");
  AddOption(cmd, flags, "seed", "global seed");
  AddOption(cmd, flags, "out", "output directory");
  AddOption(cmd, flags, "input", "input file or directory");
  AddOption(cmd, flags, "input-mode", "treebank|doc-per-line|doc-per-file");
  AddOption(cmd, flags, "corpus-name", "corpus name used in record ids");
  AddOption(cmd, flags, "workers", "worker threads");
}

void AddBuild(CLI::App *cmd, CommonFlags &flags) {
  AddOption(cmd, flags, "min-group-size", "minimum phrases per group");
  AddOption(cmd, flags, "template", "prompt template (lettered)");
  AddOption(cmd, flags, "distractors", "distractor sentences per NSP item");
  AddOption(cmd, flags, "sample", "uniformly sample N records");
  AddOption(cmd, flags, "ratios", "train,dev,test split ratios");
  AddOption(cmd, flags, "guard-list", "abbreviation guard list file");
}

// Builds the effective config: file first, then command-line overrides.
npp_status MakeConfig(const CommonFlags &flags, ConfigPtr &out) {
  npp_config *raw = nullptr;
  npp_status st = npp_config_new(&raw);
  if (st != NPP_OK) return st;
  out.reset(raw);
  if (!flags.config_file.empty()) {
    st = npp_config_load(raw, flags.config_file.c_str());
    if (st != NPP_OK) return st;
  }
  for (const auto &[key, value] : flags.values) {
    st = npp_config_set(raw, key.c_str(), value.c_str());
    if (st != NPP_OK) return st;
  }
  return NPP_OK;
}

int RunBuild(const CommonFlags &flags,
             npp_status (*command)(const npp_config *, npp_run **)) {
  ConfigPtr config;
  npp_status st = MakeConfig(flags, config);
  if (st != NPP_OK) return Report(st);
  npp_run *raw = nullptr;
  st = command(config.get(), &raw);
  if (st != NPP_OK) return Report(st);
  RunPtr run(raw);
  std::cout << npp_run_summary(run.get());
  return 0;
}

int DebugPhrases(const std::string &path, const std::string &inline_tree) {
  std::vector<std::string> trees;
  if (!inline_tree.empty()) {
    trees.push_back(inline_tree);
  } else {
    std::ifstream in(path);
    if (!in) {
      std::cerr << "nppkit: Io: cannot open " << path << '\n';
      return npp_status_exit_code(NPP_ERR_IO);
    }
    for (std::string line; std::getline(in, line);) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        trees.push_back(line);
      }
    }
  }
  constexpr npp_phrase_type kTypes[] = {NPP_PHRASE_NP, NPP_PHRASE_VP,
                                        NPP_PHRASE_PP};
  for (size_t t = 0; t < trees.size(); ++t) {
    npp_tree *tree = nullptr;
    npp_status st = npp_tree_parse(trees[t].data(), trees[t].size(), &tree);
    if (st != NPP_OK) return Report(st);
    npp_phrases *phrases = nullptr;
    st = npp_phrases_extract(tree, &phrases);
    npp_tree_free(tree);
    if (st != NPP_OK) return Report(st);
    if (t > 0) std::cout << '\n';
    for (npp_phrase_type type : kTypes) {
      for (size_t i = 0; i < npp_phrases_count(phrases, type); ++i) {
        npp_span span;
        const char *text = nullptr;
        npp_phrases_get(phrases, type, i, &span, &text);
        std::cout << npp_phrase_type_name(type) << '\t' << span.start << '\t'
                  << span.end << '\t' << text << '\n';
      }
    }
    npp_phrases_free(phrases);
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"nppkit: next phrase prediction data toolkit"};
  app.set_version_flag("--version", std::string(npp_version()));
  app.require_subcommand(1);

  CommonFlags flags;

  auto *build_npp = app.add_subcommand("build-npp", "treebank -> NPP items");
  AddCommon(build_npp, flags);
  AddBuild(build_npp, flags);

  auto *build_nsp = app.add_subcommand("build-nsp", "raw corpus -> NSP items");
  AddCommon(build_nsp, flags);
  AddBuild(build_nsp, flags);

  auto *build_pairs =
      app.add_subcommand("build-pairs", "corpus -> (prefix, completion) pairs");
  AddCommon(build_pairs, flags);
  AddBuild(build_pairs, flags);

  std::string candidates, references, report;
  auto *evaluate = app.add_subcommand("evaluate", "score completions");
  AddCommon(evaluate, flags);
  evaluate->add_option("--candidates", candidates, "one candidate per line")
      ->required();
  evaluate->add_option("--references", references,
                       "tab-separated references per line")
      ->required();
  evaluate->add_option("--report", report, "text report path");
  AddOption(evaluate, flags, "candidates-field", "JSONL candidate field");
  AddOption(evaluate, flags, "references-field", "JSONL reference field");

  std::vector<std::string> datasets;
  auto *stats = app.add_subcommand("stats", "per-split counts table");
  AddCommon(stats, flags);
  AddOption(stats, flags, "ratios", "train,dev,test split ratios");
  AddOption(stats, flags, "guard-list", "abbreviation guard list file");
  AddOption(stats, flags, "unit", "sentences|pairs");
  stats->add_option("--dataset", datasets, "NAME=PATH (repeatable)");

  std::string tree_text;
  auto *debug = app.add_subcommand("debug-phrases",
                                   "print lowest NP/VP/PP spans per tree");
  std::string debug_input;
  debug->add_option("--input", debug_input, "treebank file, one tree a line");
  debug->add_option("--tree", tree_text, "a single bracketed tree");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 1;
  }

  if (*build_npp) return RunBuild(flags, npp_run_build_npp);
  if (*build_nsp) return RunBuild(flags, npp_run_build_nsp);
  if (*build_pairs) return RunBuild(flags, npp_run_build_pairs);

  if (*debug) {
    if (debug_input.empty() && tree_text.empty()) {
      std::cerr << "nppkit: debug-phrases needs --input or --tree\n";
      return 1;
    }
    return DebugPhrases(debug_input, tree_text);
  }

  ConfigPtr config;
  npp_status st = MakeConfig(flags, config);
  if (st != NPP_OK) return Report(st);
  npp_run *raw = nullptr;

  if (*evaluate) {
    st = npp_run_evaluate(config.get(), candidates.c_str(),
                          references.c_str(), report.c_str(), &raw);
  } else {
    std::vector<std::string> names, paths;
    for (const auto &d : datasets) {
      const auto eq = d.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == d.size()) {
        std::cerr << "nppkit: --dataset expects NAME=PATH, got " << d << '\n';
        return 1;
      }
      names.push_back(d.substr(0, eq));
      paths.push_back(d.substr(eq + 1));
    }
    std::vector<const char *> name_ptrs, path_ptrs;
    for (size_t i = 0; i < names.size(); ++i) {
      name_ptrs.push_back(names[i].c_str());
      path_ptrs.push_back(paths[i].c_str());
    }
    st = npp_run_stats(config.get(), name_ptrs.data(), path_ptrs.data(),
                       names.size(), &raw);
  }
  if (st != NPP_OK) return Report(st);
  RunPtr run(raw);
  std::cout << npp_run_summary(run.get());
  return 0;
}
