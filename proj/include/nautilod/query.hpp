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

// The query subset used by tests (ASK) and action parameters (SELECT):
// basic graph patterns, FILTER comparisons against constants, and a single
// top-level UNION. Queries are evaluated over one description at a time.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "nautilod/error.hpp"
#include "nautilod/ntriples.hpp"
#include "nautilod/prefixes.hpp"
#include "nautilod/rdf.hpp"

namespace nautilod {

struct Variable {
  std::string name;
  friend bool operator==(const Variable&, const Variable&) = default;
  friend auto operator<=>(const Variable&, const Variable&) = default;
};

using PatternTerm = std::variant<Variable, Uri, Literal>;

struct TriplePattern {
  PatternTerm subject;
  PatternTerm predicate;
  PatternTerm object;
  friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

enum class CompareOp { lt, gt, le, ge, eq, ne };

inline const char* to_string(CompareOp op) {
  switch (op) {
    case CompareOp::lt: return "<";
    case CompareOp::gt: return ">";
    case CompareOp::le: return "<=";
    case CompareOp::ge: return ">=";
    case CompareOp::eq: return "=";
    case CompareOp::ne: return "!=";
  }
  return "?";
}

/// `FILTER(?var op constant)`.
struct FilterExpr {
  std::string variable;
  CompareOp op = CompareOp::eq;
  Literal value;
  friend bool operator==(const FilterExpr&, const FilterExpr&) = default;
};

struct GroupPattern {
  std::vector<TriplePattern> triples;
  std::vector<FilterExpr> filters;
  friend bool operator==(const GroupPattern&, const GroupPattern&) = default;
};

enum class QueryForm { ask, select };

/// A parsed ASK or SELECT query. `branches` holds one group for a plain
/// BGP, or one group per UNION arm. `filters` apply to every arm.
struct QueryPattern {
  QueryForm form = QueryForm::ask;
  std::vector<std::string> projection;
  std::vector<GroupPattern> branches{GroupPattern{}};
  std::vector<FilterExpr> filters;

  std::set<std::string> variables() const {
    std::set<std::string> out;
    for (const auto& branch : branches)
      for (const auto& tp : branch.triples)
        for (const PatternTerm* t : {&tp.subject, &tp.predicate, &tp.object})
          if (auto v = std::get_if<Variable>(t)) out.insert(v->name);
    return out;
  }

  friend bool operator==(const QueryPattern&, const QueryPattern&) = default;
};

using Binding = std::map<std::string, Term>;

struct QueryDiagnostics {
  std::vector<std::string> messages;
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

class QueryParser {
 public:
  QueryParser(std::string_view text, const PrefixMap& prefixes) : text_(text), prefixes_(prefixes) {}

  QueryPattern parse() {
    QueryPattern q;
    skip_ws();
    const std::size_t start = pos_;
    const std::string form = upper(read_word());
    if (form == "ASK") {
      q.form = QueryForm::ask;
    } else if (form == "SELECT") {
      q.form = QueryForm::select;
      skip_ws();
      if (peek_keyword("DISTINCT") || peek_keyword("REDUCED")) read_word();
      skip_ws();
      if (!at_end() && peek() == '*') unsupported("SELECT *");
      while (skip_ws(), !at_end() && (peek() == '?' || peek() == '$')) q.projection.push_back(read_variable().name);
      if (q.projection.empty()) fail("SELECT needs at least one projected variable");
    } else if (form == "CONSTRUCT" || form == "DESCRIBE" || form == "PREFIX" || form == "BASE") {
      unsupported(form, start);
    } else {
      fail("query must start with ASK or SELECT", start);
    }

    skip_ws();
    if (peek_keyword("FROM")) unsupported("FROM");
    if (peek_keyword("WHERE")) read_word();
    skip_ws();
    if (!at_end() && peek() == '{') {
      ++pos_;
      parse_group_body(q, '}');
      expect('}');
    } else {
      parse_group_body(q, '\0');
    }
    skip_ws();
    if (!at_end()) {
      const std::string word = upper(peek_word());
      if (word == "ORDER" || word == "LIMIT" || word == "OFFSET" || word == "GROUP" || word == "HAVING" ||
          word == "VALUES")
        unsupported(word);
      fail("unexpected trailing content");
    }

    if (q.branches.size() == 1 && !q.filters.empty()) {
      auto& f = q.branches.front().filters;
      f.insert(f.end(), q.filters.begin(), q.filters.end());
      q.filters.clear();
    }
    if (q.form == QueryForm::select) {
      const auto vars = q.variables();
      for (const auto& v : q.projection)
        if (!vars.count(v)) fail("projected variable ?" + v + " does not occur in the pattern", start);
    }
    return q;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { fail(message, pos_); }
  [[noreturn]] void fail(const std::string& message, std::size_t at) const {
    throw SyntaxError(message, 1, at + 1);
  }
  [[noreturn]] void unsupported(const std::string& feature) const { unsupported(feature, pos_); }
  [[noreturn]] void unsupported(const std::string& feature, std::size_t at) const {
    throw UnsupportedFeatureError(feature, 1, at + 1);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  void skip_ws() {
    while (!at_end()) {
      if (std::isspace(static_cast<unsigned char>(peek()))) {
        ++pos_;
      } else if (peek() == '#') {
        while (!at_end() && peek() != '\n') ++pos_;
      } else {
        break;
      }
    }
  }
  void expect(char c) {
    skip_ws();
    if (at_end() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  static std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
  }
  std::string peek_word() const {
    std::size_t end = pos_;
    while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) ++end;
    return std::string(text_.substr(pos_, end - pos_));
  }
  bool peek_keyword(std::string_view kw) const {
    const std::string w = peek_word();
    if (upper(w) != kw) return false;
    const std::size_t end = pos_ + w.size();
    return end >= text_.size() || text_[end] != ':';
  }
  std::string read_word() {
    std::string w = peek_word();
    pos_ += w.size();
    return w;
  }

  Variable read_variable() {
    ++pos_;  // ? or $
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
    if (pos_ == start) fail("empty variable name");
    return Variable{std::string(text_.substr(start, pos_ - start))};
  }

  // group_body := ( '{' triples '}' ('UNION' '{' triples '}')* | triples ) filters*
  void parse_group_body(QueryPattern& q, char terminator) {
    skip_ws();
    if (!at_end() && peek() == '{') {
      q.branches.clear();
      while (true) {
        expect('{');
        GroupPattern g;
        parse_triples_block(g, '}');
        expect('}');
        q.branches.push_back(std::move(g));
        skip_ws();
        if (peek_keyword("UNION")) {
          read_word();
          continue;
        }
        break;
      }
      while (skip_ws(), peek_keyword("FILTER")) {
        read_word();
        q.filters.push_back(parse_filter());
      }
      skip_ws();
      if (!at_end() && peek() == '.') ++pos_;
      skip_ws();
      if (!at_end() && peek() == '{') unsupported("nested group patterns");
      if (!at_end() && (terminator == '\0' || peek() != terminator)) reject_keyword_or_fail();
      return;
    }
    parse_triples_block(q.branches.front(), terminator);
  }

  void reject_keyword_or_fail() {
    const std::string word = upper(peek_word());
    static const std::set<std::string> kUnsupported = {"OPTIONAL", "GRAPH", "SERVICE", "MINUS", "BIND",
                                                       "VALUES",   "NOT",   "EXISTS",  "ORDER", "LIMIT",
                                                       "OFFSET",   "GROUP", "HAVING"};
    if (kUnsupported.count(word)) unsupported(word);
    fail("unexpected token in group pattern");
  }

  void parse_triples_block(GroupPattern& g, char terminator) {
    while (true) {
      skip_ws();
      if (at_end() || (terminator != '\0' && peek() == terminator)) return;
      if (peek() == '{') unsupported("nested group patterns");
      if (peek() == '[') unsupported("blank node property lists");
      if (peek_keyword("FILTER")) {
        read_word();
        g.filters.push_back(parse_filter());
        continue;
      }
      if (peek_keyword("UNION")) unsupported("UNION outside a top-level group list");
      {
        const std::string word = upper(peek_word());
        if (word == "OPTIONAL" || word == "GRAPH" || word == "SERVICE" || word == "MINUS" || word == "BIND" ||
            word == "VALUES")
          unsupported(word);
      }
      TriplePattern tp{parse_pattern_term(false), parse_pattern_term(true), parse_pattern_term(false)};
      if (std::holds_alternative<Literal>(tp.subject)) fail("literal in subject position");
      if (std::holds_alternative<Literal>(tp.predicate)) fail("literal in predicate position");
      g.triples.push_back(std::move(tp));
      skip_ws();
      if (!at_end() && (peek() == ';' || peek() == ',')) unsupported("predicate/object lists");
      if (!at_end() && peek() == '.') ++pos_;
    }
  }

  PatternTerm parse_pattern_term(bool predicate_position) {
    skip_ws();
    if (at_end()) fail("unexpected end of query");
    const char c = peek();
    if (c == '?' || c == '$') return read_variable();
    if (c == '_' && text_.substr(pos_, 2) == "_:") unsupported("blank nodes");
    if (c == '[') unsupported("blank nodes");
    if (c == '<') return read_iri();
    if (predicate_position && c == 'a') {
      const std::size_t next = pos_ + 1;
      if (next >= text_.size() || std::isspace(static_cast<unsigned char>(text_[next]))) {
        ++pos_;
        return Uri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type");
      }
    }
    if (c == '"' || c == '\'' || std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-')
      return read_literal();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      if (peek_keyword("TRUE") || peek_keyword("FALSE")) return read_literal();
      return read_prefixed_name();
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Uri read_iri() {
    const std::size_t start = pos_;
    ++pos_;
    const std::size_t close = text_.find('>', pos_);
    if (close == std::string_view::npos) fail("unterminated IRI", start);
    const std::string_view content = text_.substr(pos_, close - pos_);
    pos_ = close + 1;
    try {
      return expand_bracketed_iri(content, prefixes_, start + 1);
    } catch (const UriError& e) {
      fail(e.what(), start);
    }
  }

  Uri read_prefixed_name() {
    const std::size_t start = pos_;
    while (!at_end() && detail::is_prefix_char(peek(), pos_ == start)) ++pos_;
    if (at_end() || peek() != ':') fail("expected a prefixed name", start);
    const std::string prefix(text_.substr(start, pos_ - start));
    ++pos_;
    const std::size_t local_start = pos_;
    while (!at_end() && detail::is_local_name_char(peek())) ++pos_;
    while (pos_ > local_start && text_[pos_ - 1] == '.') --pos_;
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) throw UnknownPrefixError(prefix, 1, start + 1);
    try {
      return Uri(it->second + std::string(text_.substr(local_start, pos_ - local_start)));
    } catch (const UriError& e) {
      fail(e.what(), start);
    }
  }

  Literal read_literal() {
    skip_ws();
    const std::size_t start = pos_;
    if (at_end()) fail("expected a literal");
    const char c = peek();
    if (c == '"' || c == '\'') {
      const char quote = c;
      ++pos_;
      std::string lexical;
      while (true) {
        if (at_end()) fail("unterminated string literal", start);
        const char ch = text_[pos_++];
        if (ch == quote) break;
        if (ch == '\\') {
          if (at_end()) fail("dangling escape", start);
          const char e = text_[pos_++];
          switch (e) {
            case 'n': lexical += '\n'; break;
            case 't': lexical += '\t'; break;
            case 'r': lexical += '\r'; break;
            case 'b': lexical += '\b'; break;
            case 'f': lexical += '\f'; break;
            case 'u':
            case 'U': {
              const std::size_t digits = e == 'u' ? 4 : 8;
              if (pos_ + digits > text_.size()) fail("truncated unicode escape");
              const std::string hex(text_.substr(pos_, digits));
              char* end = nullptr;
              const unsigned long cp = std::strtoul(hex.c_str(), &end, 16);
              if (end != hex.c_str() + digits) fail("invalid unicode escape");
              pos_ += digits;
              detail::append_utf8(lexical, cp);
              break;
            }
            default: lexical += e;
          }
        } else {
          lexical += ch;
        }
      }
      if (text_.substr(pos_, 2) == "^^") {
        pos_ += 2;
        if (!at_end() && peek() == '<') return Literal(std::move(lexical), read_iri());
        return Literal(std::move(lexical), read_prefixed_name());
      }
      if (!at_end() && peek() == '@') {
        ++pos_;
        const std::size_t tag = pos_;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) ++pos_;
        if (pos_ == tag) fail("empty language tag");
        return Literal(std::move(lexical), std::nullopt, std::string(text_.substr(tag, pos_ - tag)));
      }
      return Literal(std::move(lexical));
    }
    if (peek_keyword("TRUE") || peek_keyword("FALSE")) {
      std::string w = read_word();
      for (char& ch : w) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      return Literal(std::move(w), xsd::type("boolean"));
    }
    // Unquoted ISO-8601 date, e.g. 1961-01-01.
    if (text_.size() >= pos_ + 10) {
      const std::string_view d = text_.substr(pos_, 10);
      auto digits = [&](std::size_t from, std::size_t n) {
        for (std::size_t i = from; i < from + n; ++i)
          if (!std::isdigit(static_cast<unsigned char>(d[i]))) return false;
        return true;
      };
      if (digits(0, 4) && d[4] == '-' && digits(5, 2) && d[7] == '-' && digits(8, 2)) {
        pos_ += 10;
        return Literal(std::string(d), xsd::type("date"));
      }
    }
    std::size_t end = pos_;
    if (end < text_.size() && (text_[end] == '+' || text_[end] == '-')) ++end;
    const std::size_t int_start = end;
    while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    bool decimal = false, exponent = false;
    if (end + 1 < text_.size() && text_[end] == '.' && std::isdigit(static_cast<unsigned char>(text_[end + 1]))) {
      decimal = true;
      ++end;
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    }
    if (end == int_start) fail("expected a literal", start);
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t e = end + 1;
      if (e < text_.size() && (text_[e] == '+' || text_[e] == '-')) ++e;
      const std::size_t digits = e;
      while (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) ++e;
      if (e > digits) {
        exponent = true;
        end = e;
      }
    }
    std::string lexical(text_.substr(pos_, end - pos_));
    pos_ = end;
    const char* type = exponent ? "double" : decimal ? "decimal" : "integer";
    return Literal(std::move(lexical), xsd::type(type));
  }

  FilterExpr parse_filter() {
    expect('(');
    skip_ws();
    if (at_end() || (peek() != '?' && peek() != '$')) {
      const std::string word = peek_word();
      if (!word.empty()) unsupported("FILTER function " + word);
      fail("FILTER must compare a variable with a constant");
    }
    FilterExpr f;
    f.variable = read_variable().name;
    skip_ws();
    const std::string_view rest = text_.substr(pos_);
    if (rest.substr(0, 2) == "<=") f.op = CompareOp::le, pos_ += 2;
    else if (rest.substr(0, 2) == ">=") f.op = CompareOp::ge, pos_ += 2;
    else if (rest.substr(0, 2) == "!=") f.op = CompareOp::ne, pos_ += 2;
    else if (rest.substr(0, 1) == "<") f.op = CompareOp::lt, pos_ += 1;
    else if (rest.substr(0, 1) == ">") f.op = CompareOp::gt, pos_ += 1;
    else if (rest.substr(0, 1) == "=") f.op = CompareOp::eq, pos_ += 1;
    else if (rest.substr(0, 2) == "&&" || rest.substr(0, 2) == "||") unsupported("boolean connectives in FILTER");
    else fail("expected a comparison operator");
    skip_ws();
    if (!at_end() && (peek() == '?' || peek() == '$')) unsupported("variable-to-variable FILTER");
    if (!at_end() && peek() == '<') unsupported("IRI constants in FILTER");
    f.value = read_literal();
    skip_ws();
    if (!at_end() && peek() != ')') {
      if (text_.substr(pos_, 2) == "&&" || text_.substr(pos_, 2) == "||") unsupported("boolean connectives in FILTER");
      fail("expected ')'");
    }
    expect(')');
    return f;
  }

  std::string_view text_;
  const PrefixMap& prefixes_;
  std::size_t pos_ = 0;
};

inline std::string print_pattern_term(const PatternTerm& t) {
  if (auto v = std::get_if<Variable>(&t)) return "?" + v->name;
  if (auto u = std::get_if<Uri>(&t)) return to_ntriples(*u);
  return to_ntriples(std::get<Literal>(t));
}

inline void print_group(std::string& out, const GroupPattern& g) {
  for (const auto& tp : g.triples) {
    out += print_pattern_term(tp.subject) + " " + print_pattern_term(tp.predicate) + " " +
           print_pattern_term(tp.object) + " . ";
  }
  for (const auto& f : g.filters) {
    out += "FILTER(?" + f.variable + " " + to_string(f.op) + " " + to_ntriples(f.value) + ") ";
  }
}

}  // namespace detail

/// Parses an ASK or SELECT query. The WHERE keyword and its braces are
/// optional, so `ASK ?p <dbpo:birthDate> ?y. FILTER(?y<1961-01-01)` is valid.
inline QueryPattern parse_query(std::string_view text, const PrefixMap& prefixes = default_prefixes()) {
  return detail::QueryParser(text, prefixes).parse();
}

/// Canonical single-line form with absolute IRIs; parse_query inverts it.
inline std::string pretty_print(const QueryPattern& q) {
  std::string out = q.form == QueryForm::ask ? "ASK" : "SELECT";
  for (const auto& v : q.projection) out += " ?" + v;
  out += " WHERE { ";
  if (q.branches.size() == 1) {
    detail::print_group(out, q.branches.front());
  } else {
    for (std::size_t i = 0; i < q.branches.size(); ++i) {
      if (i) out += "UNION ";
      out += "{ ";
      detail::print_group(out, q.branches[i]);
      out += "} ";
    }
    detail::print_group(out, GroupPattern{{}, q.filters});
  }
  out += "}";
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace detail {

enum class LiteralKind { numeric, temporal, string, lang_string, other };

inline LiteralKind classify(const Literal& l) {
  if (l.language) return LiteralKind::lang_string;
  if (!l.datatype) return LiteralKind::string;
  const std::string& dt = l.datatype->str();
  if (dt.rfind(xsd::kNamespace, 0) != 0) return LiteralKind::other;
  const std::string local = dt.substr(xsd::kNamespace.size());
  static const std::set<std::string> kNumeric = {
      "integer", "decimal",          "double",          "float",           "int",           "long",
      "short",   "byte",             "nonNegativeInteger", "positiveInteger", "negativeInteger",
      "nonPositiveInteger", "unsignedInt", "unsignedLong", "unsignedShort", "unsignedByte"};
  if (kNumeric.count(local)) return LiteralKind::numeric;
  if (local == "date" || local == "dateTime" || local == "gYear" || local == "gYearMonth" || local == "time")
    return LiteralKind::temporal;
  if (local == "string") return LiteralKind::string;
  return LiteralKind::other;
}

inline std::optional<double> numeric_value(const std::string& lexical) {
  if (lexical.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(lexical.c_str(), &end);
  if (end != lexical.c_str() + lexical.size()) return std::nullopt;
  return v;
}

template <typename T>
bool apply(CompareOp op, const T& a, const T& b) {
  switch (op) {
    case CompareOp::lt: return a < b;
    case CompareOp::gt: return a > b;
    case CompareOp::le: return a <= b;
    case CompareOp::ge: return a >= b;
    case CompareOp::eq: return a == b;
    case CompareOp::ne: return a != b;
  }
  return false;
}

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// nullopt on a type error.
inline std::optional<bool> compare(const Term& lhs, CompareOp op, const Literal& rhs, std::string& why) {
  const Literal* l = as_literal(lhs);
  if (!l) {
    why = "filter operand " + to_ntriples(lhs) + " is an IRI";
    return std::nullopt;
  }
  const LiteralKind lk = classify(*l), rk = classify(rhs);
  const bool equality = op == CompareOp::eq || op == CompareOp::ne;
  if (lk != rk) {
    why = "incompatible operands " + to_ntriples(*l) + " and " + to_ntriples(rhs);
    return std::nullopt;
  }
  switch (rk) {
    case LiteralKind::numeric: {
      auto a = numeric_value(l->lexical), b = numeric_value(rhs.lexical);
      if (!a || !b) {
        why = "malformed numeric literal";
        return std::nullopt;
      }
      return apply(op, *a, *b);
    }
    case LiteralKind::temporal:
      if (l->datatype != rhs.datatype) {
        why = "incompatible temporal datatypes";
        return std::nullopt;
      }
      return apply(op, l->lexical, rhs.lexical);
    case LiteralKind::string:
      if (!equality) {
        why = "ordering comparison on plain strings";
        return std::nullopt;
      }
      return apply(op, l->lexical, rhs.lexical);
    case LiteralKind::lang_string:
      if (!equality) {
        why = "ordering comparison on language-tagged strings";
        return std::nullopt;
      }
      return apply(op, std::make_pair(l->lexical, lower(*l->language)),
                   std::make_pair(rhs.lexical, lower(*rhs.language)));
    case LiteralKind::other:
      if (!equality || l->datatype != rhs.datatype) {
        why = "unsupported comparison for datatype " + (rhs.datatype ? rhs.datatype->str() : std::string());
        return std::nullopt;
      }
      return apply(op, l->lexical, rhs.lexical);
  }
  return std::nullopt;
}

inline bool passes(const FilterExpr& f, const Binding& b, QueryDiagnostics* diagnostics) {
  auto it = b.find(f.variable);
  std::string why;
  std::optional<bool> result;
  if (it == b.end()) {
    why = "unbound variable ?" + f.variable;
  } else {
    result = compare(it->second, f.op, f.value, why);
  }
  if (!result && diagnostics) diagnostics->messages.push_back("FILTER error treated as false: " + why);
  return result.value_or(false);
}

// Resolves a pattern position under `b`: nullopt when it is an unbound variable.
inline std::optional<Term> substitute(const PatternTerm& t, const Binding& b) {
  if (auto v = std::get_if<Variable>(&t)) {
    auto it = b.find(v->name);
    if (it == b.end()) return std::nullopt;
    return it->second;
  }
  if (auto u = std::get_if<Uri>(&t)) return Term(*u);
  return Term(std::get<Literal>(t));
}

inline bool bind_term(const PatternTerm& pattern, const Term& value, Binding& b) {
  if (auto v = std::get_if<Variable>(&pattern)) {
    auto [it, inserted] = b.emplace(v->name, value);
    return inserted || it->second == value;
  }
  return true;
}

template <typename Emit>
void join(const std::vector<TriplePattern>& patterns, std::size_t index, Binding& b, const Description& d,
          Emit&& emit) {
  if (index == patterns.size()) {
    emit(b);
    return;
  }
  const TriplePattern& tp = patterns[index];
  const auto s = substitute(tp.subject, b);
  const auto p = substitute(tp.predicate, b);
  const auto o = substitute(tp.object, b);
  if ((s && !is_uri(*s)) || (p && !is_uri(*p))) return;
  const auto matches = d.match(s ? as_uri(*s) : nullptr, p ? as_uri(*p) : nullptr, o ? &*o : nullptr);
  for (const Triple* t : matches) {
    Binding next = b;
    if (bind_term(tp.subject, t->subject, next) && bind_term(tp.predicate, t->predicate, next) &&
        bind_term(tp.object, t->object, next))
      join(patterns, index + 1, next, d, emit);
  }
}

}  // namespace detail

/// Every solution (over all UNION arms) that satisfies the filters.
inline std::vector<Binding> solutions(const QueryPattern& q, const Description& d,
                                      QueryDiagnostics* diagnostics = nullptr) {
  std::vector<Binding> out;
  for (const auto& branch : q.branches) {
    Binding seed;
    detail::join(branch.triples, 0, seed, d, [&](const Binding& b) {
      for (const auto& f : branch.filters)
        if (!detail::passes(f, b, diagnostics)) return;
      for (const auto& f : q.filters)
        if (!detail::passes(f, b, diagnostics)) return;
      out.push_back(b);
    });
  }
  return out;
}

inline bool eval_ask(const QueryPattern& q, const Description& d, QueryDiagnostics* diagnostics = nullptr) {
  if (q.form != QueryForm::ask) throw Error("eval_ask requires an ASK query");
  return !solutions(q, d, diagnostics).empty();
}

/// Distinct projected bindings, ordered by the N-Triples form of their values.
inline std::vector<Binding> eval_select(const QueryPattern& q, const Description& d,
                                        QueryDiagnostics* diagnostics = nullptr) {
  if (q.form != QueryForm::select) throw Error("eval_select requires a SELECT query");
  std::map<std::vector<std::string>, Binding> ordered;
  for (const Binding& full : solutions(q, d, diagnostics)) {
    Binding projected;
    std::vector<std::string> key;
    for (const auto& v : q.projection) {
      auto it = full.find(v);
      if (it != full.end()) {
        projected.emplace(v, it->second);
        key.push_back(to_ntriples(it->second));
      } else {
        key.emplace_back();
      }
    }
    ordered.emplace(std::move(key), std::move(projected));
  }
  std::vector<Binding> out;
  out.reserve(ordered.size());
  for (auto& [_, b] : ordered) out.push_back(std::move(b));
  return out;
}

}  // namespace nautilod
