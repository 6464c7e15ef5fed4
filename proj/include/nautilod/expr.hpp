// Copyright 2026 The NautiLOD Authors.
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

#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nautilod/error.hpp"
#include "nautilod/prefixes.hpp"
#include "nautilod/query.hpp"
#include "nautilod/rdf.hpp"

namespace nautilod {

/// `[ASK ...]` body of a test.
struct TestSpec {
  QueryPattern query;
  friend bool operator==(const TestSpec&, const TestSpec&) = default;
};

/// `{name(?a, ?b)[SELECT ...]}`. `arguments` lists the variables written in
/// parentheses; they are passed to the procedure in that order.
struct ActionSpec {
  std::string procedure;
  std::vector<std::string> arguments;
  QueryPattern params;
  friend bool operator==(const ActionSpec&, const ActionSpec&) = default;
};

enum class ExprKind { pred, inverse_pred, wildcard, action, concat, optional, star, plus, alt, test };

struct PathNode;
using PathExpr = std::shared_ptr<const PathNode>;

struct PathNode {
  ExprKind kind;
  std::optional<Uri> uri;                    // pred, inverse_pred
  std::shared_ptr<const ActionSpec> action;  // action
  std::shared_ptr<const TestSpec> test;      // test
  PathExpr left;                             // concat/alt left, unary inner
  PathExpr right;                            // concat/alt right

  friend bool operator==(const PathNode& a, const PathNode& b) {
    if (a.kind != b.kind || a.uri != b.uri) return false;
    if (bool(a.action) != bool(b.action) || (a.action && !(*a.action == *b.action))) return false;
    if (bool(a.test) != bool(b.test) || (a.test && !(*a.test == *b.test))) return false;
    auto same = [](const PathExpr& x, const PathExpr& y) { return x == y || (x && y && *x == *y); };
    return same(a.left, b.left) && same(a.right, b.right);
  }
};

namespace expr {

inline PathExpr make(PathNode node) { return std::make_shared<const PathNode>(std::move(node)); }

inline PathExpr pred(Uri u) { return make({ExprKind::pred, std::move(u), {}, {}, {}, {}}); }
inline PathExpr inverse(Uri u) { return make({ExprKind::inverse_pred, std::move(u), {}, {}, {}, {}}); }
inline PathExpr wildcard() { return make({ExprKind::wildcard, {}, {}, {}, {}, {}}); }
inline PathExpr action(ActionSpec a) {
  return make({ExprKind::action, {}, std::make_shared<const ActionSpec>(std::move(a)), {}, {}, {}});
}
inline PathExpr concat(PathExpr l, PathExpr r) { return make({ExprKind::concat, {}, {}, {}, std::move(l), std::move(r)}); }
inline PathExpr alt(PathExpr l, PathExpr r) { return make({ExprKind::alt, {}, {}, {}, std::move(l), std::move(r)}); }
inline PathExpr optional(PathExpr e) { return make({ExprKind::optional, {}, {}, {}, std::move(e), {}}); }
inline PathExpr star(PathExpr e) { return make({ExprKind::star, {}, {}, {}, std::move(e), {}}); }
inline PathExpr plus(PathExpr e) { return make({ExprKind::plus, {}, {}, {}, std::move(e), {}}); }
inline PathExpr test(PathExpr e, TestSpec t) {
  return make({ExprKind::test, {}, {}, std::make_shared<const TestSpec>(std::move(t)), std::move(e), {}});
}

// e+ as e/e*.
inline PathExpr desugar_plus(const PathExpr& e) { return concat(e->left, star(e->left)); }

}  // namespace expr

inline std::size_t node_count(const PathExpr& e) {
  if (!e) return 0;
  return 1 + node_count(e->left) + node_count(e->right);
}

inline std::size_t depth(const PathExpr& e) {
  if (!e) return 0;
  return 1 + std::max(depth(e->left), depth(e->right));
}

/// Pre-order walk. Occurrence ids of tests and actions follow this order.
inline void preorder(const PathExpr& e, const std::function<void(const PathNode&)>& visit) {
  if (!e) return;
  visit(*e);
  preorder(e->left, visit);
  preorder(e->right, visit);
}

inline bool has_tests_or_actions(const PathExpr& e) {
  bool found = false;
  preorder(e, [&](const PathNode& n) { found |= n.kind == ExprKind::test || n.kind == ExprKind::action; });
  return found;
}

// ---------------------------------------------------------------------------

namespace detail {

class ExprParser {
 public:
  ExprParser(std::string_view text, const PrefixMap& prefixes) : text_(text), prefixes_(prefixes) {}

  PathExpr parse() {
    skip_ws();
    if (at_end()) fail("empty expression");
    PathExpr e = parse_alt();
    skip_ws();
    if (!at_end()) {
      if (peek() == ')') fail("unbalanced ')'");
      fail(std::string("unexpected '") + peek() + "'");
    }
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { fail(message, pos_); }
  [[noreturn]] void fail(const std::string& message, std::size_t at) const { throw SyntaxError(message, 1, at + 1); }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool consume(char c) {
    skip_ws();
    if (!at_end() && peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  PathExpr parse_alt() {
    PathExpr e = parse_concat();
    while (consume('|')) e = expr::alt(e, parse_concat());
    return e;
  }

  PathExpr parse_concat() {
    PathExpr e = parse_postfix();
    while (consume('/')) e = expr::concat(e, parse_postfix());
    return e;
  }

  PathExpr parse_postfix() {
    const std::size_t start = (skip_ws(), pos_);
    auto [e, grouped] = parse_primary();
    while (true) {
      skip_ws();
      if (at_end()) break;
      const char c = peek();
      if (c == '?') {
        ++pos_;
        e = expr::optional(e);
      } else if (c == '*') {
        ++pos_;
        e = expr::star(e);
      } else if (c == '+') {
        ++pos_;
        e = expr::plus(e);
      } else if (c == '[') {
        const std::size_t open = pos_;
        const std::string_view body = bracket_body();
        e = expr::test(e, TestSpec{parse_embedded(body, open + 1, QueryForm::ask)});
      } else if (c == '^' && text_.substr(pos_, 3) == "^-1") {
        if (!grouped) fail("'^-1' must follow a parenthesized predicate");
        if (e->kind == ExprKind::wildcard) fail("the wildcard cannot be inverted", start);
        if (e->kind != ExprKind::pred) fail("'^-1' applies to a single predicate only", start);
        pos_ += 3;
        e = expr::inverse(*e->uri);
      } else {
        break;
      }
      grouped = false;
    }
    return e;
  }

  std::pair<PathExpr, bool> parse_primary() {
    skip_ws();
    if (at_end()) fail("expected a path");
    const std::size_t start = pos_;
    const char c = peek();
    if (c == '(') {
      ++pos_;
      skip_ws();
      if (!at_end() && peek() == ')') fail("empty group");
      PathExpr inner = parse_alt();
      if (!consume(')')) fail("expected ')'");
      return {inner, true};
    }
    if (c == '<') return {parse_iri_or_wildcard(), false};
    if (c == '^') {
      ++pos_;
      skip_ws();
      if (!at_end() && peek() == '<' && text_.substr(pos_, 3) == "<_>") fail("the wildcard cannot be inverted", start);
      PathExpr p;
      if (!at_end() && peek() == '<') p = parse_iri_or_wildcard();
      else p = parse_prefixed_name();
      return {expr::inverse(*p->uri), false};
    }
    if (c == '{') {
      ++pos_;
      skip_ws();
      if (!at_end() && peek() == '{') fail("nested action braces");
      PathExpr a = parse_action();
      if (!consume('}')) fail("expected '}' closing the action");
      return {a, false};
    }
    if (c == '[') fail("test without a path to apply it to");
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_' ||
                                    text_[end] == '-'))
        ++end;
      if (end < text_.size() && text_[end] == ':') return {parse_prefixed_name(), false};
      return {parse_action(), false};
    }
    fail(std::string("unexpected '") + c + "'");
  }

  PathExpr parse_iri_or_wildcard() {
    const std::size_t start = pos_;
    const std::size_t close = text_.find('>', pos_);
    if (close == std::string_view::npos) fail("unterminated IRI");
    const std::string_view content = text_.substr(pos_ + 1, close - pos_ - 1);
    pos_ = close + 1;
    if (content == "_") return expr::wildcard();
    try {
      return expr::pred(expand_bracketed_iri(content, prefixes_, start + 1));
    } catch (const UriError& e) {
      fail(e.what(), start);
    }
  }

  PathExpr parse_prefixed_name() {
    const std::size_t start = pos_;
    while (!at_end() && is_prefix_char(peek(), pos_ == start)) ++pos_;
    if (at_end() || peek() != ':' || pos_ == start) fail("expected a predicate", start);
    const std::string prefix(text_.substr(start, pos_ - start));
    ++pos_;
    const std::size_t local = pos_;
    while (!at_end() && is_local_name_char(peek())) ++pos_;
    while (pos_ > local && text_[pos_ - 1] == '.') --pos_;
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) throw UnknownPrefixError(prefix, 1, start + 1);
    try {
      return expr::pred(Uri(it->second + std::string(text_.substr(local, pos_ - local))));
    } catch (const UriError& e) {
      fail(e.what(), start);
    }
  }

  // name ['(' ?v (',' ?v)* ')'] '[' SELECT ... ']'
  PathExpr parse_action() {
    skip_ws();
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
    if (pos_ == start || !std::isalpha(static_cast<unsigned char>(text_[start])))
      fail("expected an action name", start);
    ActionSpec spec;
    spec.procedure = std::string(text_.substr(start, pos_ - start));
    if (consume('(')) {
      skip_ws();
      while (!at_end() && peek() != ')') {
        if (peek() != '?' && peek() != '$') fail("action arguments must be variables");
        const std::size_t v = ++pos_;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
        if (pos_ == v) fail("empty variable name");
        spec.arguments.emplace_back(text_.substr(v, pos_ - v));
        skip_ws();
        if (!at_end() && peek() == ',') {
          ++pos_;
          skip_ws();
        }
      }
      if (!consume(')')) fail("expected ')' after action arguments");
    }
    skip_ws();
    if (at_end() || peek() != '[') fail("action '" + spec.procedure + "' needs a [SELECT ...] parameter query");
    const std::size_t open = pos_;
    const std::string_view body = bracket_body();
    spec.params = parse_embedded(body, open + 1, QueryForm::select);
    for (const auto& a : spec.arguments) {
      if (std::find(spec.params.projection.begin(), spec.params.projection.end(), a) == spec.params.projection.end())
        fail("action argument ?" + a + " is not projected by its SELECT", start);
    }
    return expr::action(std::move(spec));
  }

  // Returns the text between a '[' at pos_ and its balancing ']'; string
  // literals inside the query may contain brackets.
  std::string_view bracket_body() {
    const std::size_t open = pos_;
    std::size_t depth = 0;
    char quote = 0;
    for (std::size_t i = pos_; i < text_.size(); ++i) {
      const char c = text_[i];
      if (quote) {
        if (c == '\\') ++i;
        else if (c == quote) quote = 0;
        continue;
      }
      if (c == '"' || c == '\'') quote = c;
      else if (c == '[') ++depth;
      else if (c == ']' && --depth == 0) {
        pos_ = i + 1;
        return text_.substr(open + 1, i - open - 1);
      }
    }
    fail("unbalanced '['", open);
  }

  QueryPattern parse_embedded(std::string_view body, std::size_t offset, QueryForm expected) {
    QueryPattern q;
    try {
      q = parse_query(body, prefixes_);
    } catch (const UnknownPrefixError& e) {
      throw UnknownPrefixError(e.prefix(), 1, e.column() + offset);
    } catch (const UnsupportedFeatureError& e) {
      throw UnsupportedFeatureError(e.feature(), 1, e.column() + offset);
    } catch (const SyntaxError& e) {
      throw SyntaxError(e.message(), 1, e.column() + offset);
    }
    if (q.form != expected)
      fail(expected == QueryForm::ask ? "a test must be an ASK query" : "action parameters must be a SELECT query",
           offset);
    return q;
  }

  std::string_view text_;
  const PrefixMap& prefixes_;
  std::size_t pos_ = 0;
};

inline void print(std::string& out, const PathExpr& e) {
  switch (e->kind) {
    case ExprKind::pred: out += to_ntriples(*e->uri); return;
    case ExprKind::inverse_pred: out += "^" + to_ntriples(*e->uri); return;
    case ExprKind::wildcard: out += "<_>"; return;
    case ExprKind::action: {
      out += "{" + e->action->procedure;
      if (!e->action->arguments.empty()) {
        out += "(";
        for (std::size_t i = 0; i < e->action->arguments.size(); ++i) {
          if (i) out += ",";
          out += "?" + e->action->arguments[i];
        }
        out += ")";
      }
      out += "[" + pretty_print(e->action->params) + "]}";
      return;
    }
    case ExprKind::concat:
      print(out, e->left);
      out += "/";
      if (e->right->kind == ExprKind::concat) {
        out += "(";
        print(out, e->right);
        out += ")";
      } else {
        print(out, e->right);
      }
      return;
    case ExprKind::alt:
      out += "(";
      print(out, e->left);
      out += "|";
      print(out, e->right);
      out += ")";
      return;
    case ExprKind::optional:
    case ExprKind::star:
    case ExprKind::plus:
    case ExprKind::test:
      out += "(";
      print(out, e->left);
      out += ")";
      if (e->kind == ExprKind::optional) out += "?";
      else if (e->kind == ExprKind::star) out += "*";
      else if (e->kind == ExprKind::plus) out += "+";
      else out += "[" + pretty_print(e->test->query) + "]";
      return;
  }
}

}  // namespace detail

// Expression file text: lines starting with '#' are dropped, the rest joined by spaces.
inline std::string expression_file_text(std::string_view file) {
  std::string out;
  std::size_t start = 0;
  while (start <= file.size()) {
    std::size_t nl = file.find('\n', start);
    if (nl == std::string_view::npos) nl = file.size();
    std::string_view line = file.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto first = line.find_first_not_of(" \t\r");
    if (first != std::string_view::npos && line[first] != '#') {
      if (!out.empty()) out += ' ';
      out += line;
    }
    start = nl + 1;
  }
  while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) out.pop_back();
  return out;
}

/// Parses a navigation expression. Postfix operators bind tighter than `/`,
/// which binds tighter than `|`.
inline PathExpr parse(std::string_view text, const PrefixMap& prefixes = default_prefixes()) {
  return detail::ExprParser(text, prefixes).parse();
}

/// Canonical one-line form with absolute IRIs.
inline std::string pretty_print(const PathExpr& e) {
  std::string out;
  detail::print(out, e);
  return out;
}

}  // namespace nautilod
