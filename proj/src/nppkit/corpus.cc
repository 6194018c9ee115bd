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

#include "nppkit/corpus.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "nppkit/random.h"
#include "nppkit/status.h"

namespace nppkit {
namespace {

bool IsSpace(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool IsUpper(char c) {
  return std::isupper(static_cast<unsigned char>(c)) != 0;
}

bool IsTerminal(char c) { return c == '.' || c == '!' || c == '?'; }

bool IsCloser(char c) {
  return c == '"' || c == '\'' || c == ')' || c == ']' || c == '}';
}

bool IsOpener(char c) {
  return c == '"' || c == '\'' || c == '(' || c == '[' || c == '{';
}

bool IsDetachable(char c) {
  return c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == ':';
}

std::string CollapseWhitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (IsSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

const char *const kDefaultAbbreviations[] = {
    "e.g.", "i.e.", "etc.", "cf.",  "vs.",   "al.",   "approx.", "resp.",
    "Dr.",  "Mr.",  "Mrs.", "Ms.",  "Prof.", "Jr.",   "Sr.",     "St.",
    "Fig.", "Figs.", "Eq.", "Eqs.", "Sec.",  "Tab.",  "Ref.",    "Refs.",
    "Vol.", "No.",  "pp.",  "Ch.",  "Inc.",  "Ltd.",  "Co.",     "Corp.",
    "U.S.", "a.m.", "p.m.", "Jan.", "Feb.",  "Mar.",  "Apr.",    "Jun.",
    "Jul.", "Aug.", "Sep.", "Sept.", "Oct.", "Nov.",  "Dec.",
};

}  // namespace

std::string SentenceId::ToString() const {
  return corpus + "/" + std::to_string(doc) + "/" + std::to_string(sent);
}

AbbreviationList::AbbreviationList(std::vector<std::string> words)
    : words_(std::make_move_iterator(words.begin()),
             std::make_move_iterator(words.end())) {}

const AbbreviationList &AbbreviationList::Default() {
  static const AbbreviationList *list = new AbbreviationList(
      std::vector<std::string>(std::begin(kDefaultAbbreviations),
                               std::end(kDefaultAbbreviations)));
  return *list;
}

AbbreviationList AbbreviationList::LoadFile(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot read guard list: " + path.string());
  }
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string word = CollapseWhitespace(line);
    if (word.empty() || word[0] == '#') continue;
    words.push_back(std::move(word));
  }
  return AbbreviationList(std::move(words));
}

bool AbbreviationList::Contains(std::string_view word) const {
  return words_.count(std::string(word)) > 0;
}

std::vector<std::string> SplitSentences(std::string_view document,
                                        const AbbreviationList &guards) {
  std::vector<std::string> sentences;
  const size_t n = document.size();
  size_t start = 0;
  size_t i = 0;
  while (i < n) {
    if (!IsTerminal(document[i])) {
      ++i;
      continue;
    }
    const size_t mark = i;
    size_t end = i + 1;
    while (end < n && (IsTerminal(document[end]) || IsCloser(document[end]))) {
      ++end;
    }
    bool boundary = false;
    if (end == n) {
      boundary = true;
    } else if (IsSpace(document[end])) {
      size_t next = end;
      bool line_break = false;
      while (next < n && IsSpace(document[next])) {
        line_break |= document[next] == '\n';
        ++next;
      }
      if (next == n || line_break) {
        boundary = true;
      } else {
        size_t letter = next;
        while (letter < n && IsOpener(document[letter])) ++letter;
        boundary = letter < n && IsUpper(document[letter]);
      }
    }
    if (boundary && document[mark] == '.') {
      size_t word_start = mark;
      while (word_start > start && !IsSpace(document[word_start - 1])) {
        --word_start;
      }
      while (word_start < mark && IsOpener(document[word_start])) ++word_start;
      std::string_view word = document.substr(word_start, mark + 1 - word_start);
      if (guards.Contains(word)) boundary = false;
    }
    if (boundary) {
      std::string sentence =
          CollapseWhitespace(document.substr(start, end - start));
      if (!sentence.empty()) sentences.push_back(std::move(sentence));
      start = end;
    }
    i = end;
  }
  if (start < n) {
    std::string rest = CollapseWhitespace(document.substr(start));
    if (!rest.empty()) sentences.push_back(std::move(rest));
  }
  return sentences;
}

std::vector<std::string> Tokenize(std::string_view sentence) {
  std::vector<std::string> tokens;
  size_t i = 0;
  const size_t n = sentence.size();
  while (i < n) {
    while (i < n && IsSpace(sentence[i])) ++i;
    size_t end = i;
    while (end < n && !IsSpace(sentence[end])) ++end;
    if (end == i) break;
    std::string_view word = sentence.substr(i, end - i);
    size_t cut = word.size();
    while (cut > 0 && IsDetachable(word[cut - 1])) --cut;
    if (cut > 0) tokens.emplace_back(word.substr(0, cut));
    for (size_t k = cut; k < word.size(); ++k) tokens.emplace_back(1, word[k]);
    i = end;
  }
  return tokens;
}

std::string Detokenize(std::span<const std::string> tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::string AsciiLower(std::string_view text) {
  std::string out(text);
  for (char &c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "?";
}

void SplitRatios::Validate() const {
  if (!(train > 0) || !(dev > 0) || !(test > 0)) {
    throw Error(ErrorCode::kRatioSumInvalid,
                "split ratios must all be positive");
  }
  if (std::fabs(train + dev + test - 1.0) > 1e-9) {
    throw Error(ErrorCode::kRatioSumInvalid, "split ratios must sum to 1");
  }
}

SplitSizes ComputeSplitSizes(size_t n, const SplitRatios &ratios) {
  ratios.Validate();
  // The epsilon keeps products such as 0.7 * 10 from flooring to 6.
  auto share = [n](double ratio) {
    return static_cast<size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
  };
  SplitSizes sizes;
  sizes.dev = std::min(n, share(ratios.dev));
  sizes.test = std::min(n - sizes.dev, share(ratios.test));
  sizes.train = n - sizes.dev - sizes.test;
  return sizes;
}

namespace {

std::vector<size_t> ShuffledOrder(size_t n, uint64_t seed) {
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(seed);
  rng.Shuffle(std::span<size_t>(order));
  return order;
}

}  // namespace

SplitAssigner::SplitAssigner(size_t n, const SplitRatios &ratios,
                             uint64_t seed)
    : rng_(DeriveSeed(seed, "splits")), left_(n) {
  const SplitSizes sizes = ComputeSplitSizes(n, ratios);
  dev_left_ = sizes.dev;
  test_left_ = sizes.test;
}

Split SplitAssigner::Next() {
  CheckContract(left_ > 0, "more records than announced");
  const uint64_t u = rng_.Uniform(left_--);
  if (u < dev_left_) {
    --dev_left_;
    return Split::kDev;
  }
  if (u < dev_left_ + test_left_) {
    --test_left_;
    return Split::kTest;
  }
  return Split::kTrain;
}

std::vector<Split> AssignSplits(size_t n, const SplitRatios &ratios,
                                uint64_t seed) {
  SplitAssigner assigner(n, ratios, seed);
  std::vector<Split> splits;
  splits.reserve(n);
  for (size_t i = 0; i < n; ++i) splits.push_back(assigner.Next());
  return splits;
}

Splits<SentenceRecord> Partition(std::vector<SentenceRecord> records,
                                 const SplitRatios &ratios, uint64_t seed) {
  const size_t n = records.size();
  const SplitSizes sizes = ComputeSplitSizes(n, ratios);
  const std::vector<size_t> order = ShuffledOrder(n, seed);
  Splits<SentenceRecord> splits;
  splits.train.reserve(sizes.train);
  splits.dev.reserve(sizes.dev);
  splits.test.reserve(sizes.test);
  for (size_t k = 0; k < n; ++k) {
    auto &dest = k < sizes.train                ? splits.train
                 : k < sizes.train + sizes.dev ? splits.dev
                                               : splits.test;
    dest.push_back(std::move(records[order[k]]));
  }
  return splits;
}

std::string FormatCount(size_t count) {
  std::string digits = std::to_string(count);
  std::string out;
  const size_t lead = digits.size() % 3;
  for (size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (i + 3 - lead) % 3 == 0) out += ',';
    out += digits[i];
  }
  return out;
}

std::string FormatStatsTable(std::span<const DatasetStats> rows) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"Dataset", "Train", "Dev", "Test"});
  for (const DatasetStats &row : rows) {
    cells.push_back({row.dataset, FormatCount(row.train), FormatCount(row.dev),
                     FormatCount(row.test)});
  }
  std::vector<size_t> width(4, 0);
  for (const auto &line : cells) {
    for (size_t c = 0; c < 4; ++c) width[c] = std::max(width[c], line[c].size());
  }
  std::ostringstream out;
  for (const auto &line : cells) {
    out << line[0] << std::string(width[0] - line[0].size(), ' ');
    for (size_t c = 1; c < 4; ++c) {
      out << "  " << std::string(width[c] - line[c].size(), ' ') << line[c];
    }
    out << '\n';
  }
  return out.str();
}

std::optional<InputMode> ParseInputMode(std::string_view name) {
  if (name == "treebank") return InputMode::kTreebank;
  if (name == "doc-per-line") return InputMode::kDocPerLine;
  if (name == "doc-per-file") return InputMode::kDocPerFile;
  return std::nullopt;
}

std::string_view InputModeName(InputMode mode) {
  switch (mode) {
    case InputMode::kTreebank: return "treebank";
    case InputMode::kDocPerLine: return "doc-per-line";
    case InputMode::kDocPerFile: return "doc-per-file";
  }
  return "?";
}

void ForEachNonBlankLine(
    const std::filesystem::path &path,
    const std::function<void(uint64_t, std::string_view)> &fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  uint64_t ordinal = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (std::all_of(line.begin(), line.end(), IsSpace)) continue;
    fn(ordinal++, line);
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read error on " + path.string());
}

void ForEachDocument(
    const std::filesystem::path &path, InputMode mode,
    const std::function<void(uint64_t, std::string_view)> &fn) {
  namespace fs = std::filesystem;
  switch (mode) {
    case InputMode::kTreebank:
      throw Error(ErrorCode::kInvalidArgument,
                  "treebank input has no document structure");
    case InputMode::kDocPerLine:
      ForEachNonBlankLine(path, fn);
      return;
    case InputMode::kDocPerFile: {
      std::error_code ec;
      std::vector<fs::path> files;
      if (fs::is_directory(path, ec)) {
        for (const auto &entry : fs::directory_iterator(path, ec)) {
          if (entry.is_regular_file()) files.push_back(entry.path());
        }
        if (ec) throw Error(ErrorCode::kIo, "cannot list " + path.string());
        std::sort(files.begin(), files.end());
      } else {
        files.push_back(path);
      }
      uint64_t doc = 0;
      for (const auto &file : files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw Error(ErrorCode::kIo, "cannot open " + file.string());
        std::ostringstream text;
        text << in.rdbuf();
        fn(doc++, text.str());
      }
      return;
    }
  }
}

void ForEachSentence(
    const std::filesystem::path &path, InputMode mode,
    std::string_view corpus_name, const AbbreviationList &guards,
    const std::function<void(SentenceRecord &&)> &fn,
    const std::function<void(uint64_t, const std::exception &)> &on_error) {
  if (mode == InputMode::kTreebank) {
    ForEachNonBlankLine(path, [&](uint64_t ordinal, std::string_view line) {
      SentenceRecord record;
      record.id = {std::string(corpus_name), 0, ordinal};
      try {
        record.tree = ParsePtb(line);
      } catch (const Error &e) {
        if (!on_error) throw;
        on_error(ordinal, e);
        return;
      }
      record.tokens = record.tree->tokens();
      record.text = Detokenize(record.tokens);
      fn(std::move(record));
    });
    return;
  }
  ForEachDocument(path, mode, [&](uint64_t doc, std::string_view text) {
    uint64_t sent = 0;
    for (std::string &sentence : SplitSentences(text, guards)) {
      SentenceRecord record;
      record.id = {std::string(corpus_name), doc, sent++};
      record.tokens = Tokenize(sentence);
      record.text = std::move(sentence);
      fn(std::move(record));
    }
  });
}

}  // namespace nppkit
