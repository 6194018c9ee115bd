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

#include "nppkit/treebank.h"

#include <cctype>
#include <optional>
#include <utility>

#include "nppkit/status.h"

namespace nppkit {
namespace {

bool IsSpace(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

ConstituencyTree::ConstituencyTree(Node root) : root_(std::move(root)) {
  struct Frame {
    Node *node;
    size_t next_child;
  };
  // Iterative post-order so that hand-built trees cannot exhaust the stack.
  std::vector<Frame> stack;
  stack.push_back({&root_, 0});
  while (!stack.empty()) {
    Frame &top = stack.back();
    Node &node = *top.node;
    if (top.next_child == 0) {
      if (node.label_.empty()) {
        throw Error(ErrorCode::kMalformedLabel, "node with an empty label");
      }
      for (char c : node.label_) {
        if (c == '(' || c == ')' || IsSpace(c)) {
          throw Error(ErrorCode::kMalformedLabel,
                      "label contains brackets or whitespace: " + node.label_);
        }
      }
      if (node.children_.empty()) {
        if (node.token_.empty()) {
          throw Error(ErrorCode::kEmptyConstituent,
                      "constituent without children or token: " +
                          node.label_);
        }
        for (char c : node.token_) {
          if (c == '(' || c == ')' || IsSpace(c)) {
            throw Error(ErrorCode::kMalformedTree,
                        "token contains brackets or whitespace: " +
                            node.token_);
          }
        }
        node.span_ = {tokens_.size(), tokens_.size() + 1};
        tokens_.push_back(node.token_);
        stack.pop_back();
        continue;
      }
      if (!node.token_.empty()) {
        throw Error(ErrorCode::kMalformedTree,
                    "internal node carries a token: " + node.label_);
      }
      node.span_.start = tokens_.size();
    }
    if (top.next_child < node.children_.size()) {
      if (stack.size() > kMaxTreeDepth) {
        throw Error(ErrorCode::kMalformedTree, "tree nesting too deep");
      }
      Node *child = &node.children_[top.next_child++];
      stack.push_back({child, 0});
      continue;
    }
    node.span_.end = tokens_.size();
    stack.pop_back();
  }
}

std::string BaseLabel(std::string_view label) {
  if (label.empty() || label.front() == '-') return std::string(label);
  size_t cut = label.find_first_of("-=", 1);
  if (cut == std::string_view::npos) return std::string(label);
  return std::string(label.substr(0, cut));
}

ConstituencyTree ParsePtb(std::string_view text) {
  struct Pending {
    std::optional<std::string> label;
    std::optional<std::string> token;
    std::vector<Node> children;
  };
  std::vector<Pending> stack;
  std::optional<Node> root;

  size_t pos = 0;
  const size_t n = text.size();
  while (pos < n) {
    char c = text[pos];
    if (IsSpace(c)) {
      ++pos;
      continue;
    }
    if (root.has_value()) {
      if (c == ')') {
        throw Error(ErrorCode::kUnbalancedBrackets,
                    "unmatched ')' after the tree");
      }
      throw Error(ErrorCode::kMalformedTree, "trailing content after the tree");
    }
    if (c == '(') {
      ++pos;
      if (!stack.empty()) {
        Pending &parent = stack.back();
        if (!parent.label.has_value()) {
          // Only the outermost bracket may omit its label: "( (S ...))".
          if (stack.size() > 1) {
            throw Error(ErrorCode::kMalformedLabel,
                        "expected a label, found '('");
          }
          parent.label = std::string();
        }
        if (parent.token.has_value()) {
          throw Error(ErrorCode::kMalformedTree,
                      "node mixes a token with child constituents");
        }
      }
      if (stack.size() >= kMaxTreeDepth) {
        throw Error(ErrorCode::kMalformedTree, "tree nesting too deep");
      }
      stack.emplace_back();
      continue;
    }
    if (c == ')') {
      ++pos;
      if (stack.empty()) {
        throw Error(ErrorCode::kUnbalancedBrackets, "unmatched ')'");
      }
      Pending done = std::move(stack.back());
      stack.pop_back();
      if (!done.label.has_value() && done.children.empty()) {
        throw Error(ErrorCode::kEmptyConstituent, "empty constituent '()'");
      }
      if (done.children.empty() && !done.token.has_value()) {
        throw Error(ErrorCode::kEmptyConstituent,
                    "constituent without children or token: " + *done.label);
      }
      Node node = done.children.empty()
                      ? Node(*done.label, std::move(*done.token))
                      : Node(done.label.value_or(std::string()),
                             std::move(done.children));
      if (stack.empty()) {
        root = std::move(node);
      } else {
        stack.back().children.push_back(std::move(node));
      }
      continue;
    }
    // Atom: a maximal run of non-space, non-bracket bytes.
    size_t end = pos;
    while (end < n && text[end] != '(' && text[end] != ')' &&
           !IsSpace(text[end])) {
      ++end;
    }
    std::string_view atom = text.substr(pos, end - pos);
    pos = end;
    if (stack.empty()) {
      throw Error(ErrorCode::kMalformedTree,
                  "text outside brackets: " + std::string(atom));
    }
    Pending &top = stack.back();
    if (!top.label.has_value()) {
      top.label = BaseLabel(atom);
    } else if (!top.children.empty()) {
      throw Error(ErrorCode::kMalformedTree,
                  "node mixes a token with child constituents");
    } else if (top.token.has_value()) {
      throw Error(ErrorCode::kMalformedTree,
                  "leaf carries more than one token: " + std::string(atom));
    } else {
      top.token = std::string(atom);
    }
  }
  if (!stack.empty()) {
    throw Error(ErrorCode::kUnbalancedBrackets,
                "missing ')' at end of input");
  }
  if (!root.has_value()) {
    throw Error(ErrorCode::kMalformedTree, "no tree in input");
  }
  // Unwrap "(ROOT x)" and "( x)".
  while ((root->label().empty() || root->label() == "ROOT") &&
         root->children().size() == 1) {
    Node inner = root->children().front();
    root = std::move(inner);
  }
  if (root->label().empty()) {
    root = Node("ROOT", std::vector<Node>(root->children()));
  }
  return ConstituencyTree(std::move(*root));
}

namespace {

void AppendBracketed(const Node &node, std::string &out) {
  out += '(';
  out += node.label();
  if (node.is_leaf()) {
    out += ' ';
    out += node.token();
  } else {
    for (const Node &child : node.children()) {
      out += ' ';
      AppendBracketed(child, out);
    }
  }
  out += ')';
}

}  // namespace

std::string ToBracketed(const ConstituencyTree &tree) {
  std::string out;
  AppendBracketed(tree.root(), out);
  return out;
}

std::vector<std::string> YieldTokens(const ConstituencyTree &tree) {
  return tree.tokens();
}

std::vector<const Node *> NodesWithLabel(const ConstituencyTree &tree,
                                         std::string_view label) {
  std::vector<const Node *> found;
  std::vector<const Node *> stack = {&tree.root()};
  while (!stack.empty()) {
    const Node *node = stack.back();
    stack.pop_back();
    if (node->label() == label) found.push_back(node);
    const auto &children = node->children();
    for (auto it = children.rbegin(); it != children.rend(); ++it) {
      stack.push_back(&*it);
    }
  }
  return found;
}

std::string SpanText(const ConstituencyTree &tree, const Span &span) {
  std::string text;
  for (size_t i = span.start; i < span.end && i < tree.size(); ++i) {
    if (i > span.start) text += ' ';
    text += tree.tokens()[i];
  }
  return text;
}

}  // namespace nppkit
