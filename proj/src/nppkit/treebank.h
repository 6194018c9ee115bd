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

#ifndef NPPKIT_TREEBANK_H_
#define NPPKIT_TREEBANK_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace nppkit {

// Half-open token range [start, end).
struct Span {
  size_t start = 0;
  size_t end = 0;

  size_t size() const { return end - start; }
  bool Overlaps(const Span &other) const {
    return start < other.end && other.start < end;
  }
  bool Contains(const Span &other) const {
    return start <= other.start && other.end <= end;
  }
  friend bool operator==(const Span &, const Span &) = default;
};

// A constituent. Leaves are preterminals: a POS label plus exactly one
// surface token and no children. Internal nodes have at least one child and
// no token.
class Node {
 public:
  Node() = default;
  Node(std::string label, std::string token)
      : label_(std::move(label)), token_(std::move(token)) {}
  Node(std::string label, std::vector<Node> children)
      : label_(std::move(label)), children_(std::move(children)) {}

  const std::string &label() const { return label_; }
  const std::string &token() const { return token_; }
  const std::vector<Node> &children() const { return children_; }
  const Span &span() const { return span_; }
  bool is_leaf() const { return children_.empty(); }

  friend bool operator==(const Node &, const Node &) = default;

 private:
  friend class ConstituencyTree;

  std::string label_;
  std::string token_;
  std::vector<Node> children_;
  Span span_;
};

class ConstituencyTree {
 public:
  // Validates the node structure, assigns spans and collects the yield.
  // Throws Error on an invalid structure (empty label, leaf without token,
  // internal node carrying a token).
  explicit ConstituencyTree(Node root);

  const Node &root() const { return root_; }
  const std::vector<std::string> &tokens() const { return tokens_; }
  size_t size() const { return tokens_.size(); }

  friend bool operator==(const ConstituencyTree &,
                         const ConstituencyTree &) = default;

 private:
  Node root_;
  std::vector<std::string> tokens_;
};

// Maximum bracket nesting accepted by ParsePtb.
inline constexpr size_t kMaxTreeDepth = 1000;

// Parses one bracketed tree such as "(S (NP (PRP She)) (VP (VBZ naps)))".
// A "(ROOT x)" or "( x)" wrapper around a single constituent is removed.
// Labels are reduced to their base form ("NP-SBJ-1" -> "NP"); tokens are kept
// verbatim. Throws Error with kUnbalancedBrackets, kEmptyConstituent,
// kMalformedLabel or kMalformedTree; never crashes on arbitrary input.
ConstituencyTree ParsePtb(std::string_view text);

// Strips functional tags and coindexation: "NP-SBJ" -> "NP", "NP=2" -> "NP".
// Labels starting with '-' ("-NONE-", "-LRB-") are returned unchanged.
std::string BaseLabel(std::string_view label);

// Canonical form: "(LABEL child child ...)", leaves as "(POS token)".
std::string ToBracketed(const ConstituencyTree &tree);

std::vector<std::string> YieldTokens(const ConstituencyTree &tree);

// All nodes labeled `label`, in pre-order. Pointers refer into `tree`.
std::vector<const Node *> NodesWithLabel(const ConstituencyTree &tree,
                                         std::string_view label);

// Joins tree.tokens() over `span` with single spaces.
std::string SpanText(const ConstituencyTree &tree, const Span &span);

}  // namespace nppkit

#endif  // NPPKIT_TREEBANK_H_
