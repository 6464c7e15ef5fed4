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

// Line-oriented N-Triples reader and writer (no blank nodes).

#pragma once

#include <algorithm>
#include <cctype>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nautilod/error.hpp"
#include "nautilod/rdf.hpp"

namespace nautilod {

struct NTriplesOptions {
  // Drop triples mentioning blank nodes instead of failing. Used for live
  // data, where blank nodes are common; fixtures keep the strict default.
  bool skip_blank_nodes = false;
};

namespace detail {

inline void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class NTriplesLine {
 public:
  NTriplesLine(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  // Returns false for blank/comment-only lines.
  bool parse(std::vector<Triple>& out) {
    skip_ws();
    if (at_end() || peek() == '#') return false;
    Uri subject = parse_subject();
    skip_ws();
    Uri predicate = parse_iri();
    skip_ws();
    Term object = parse_object();
    skip_ws();
    expect('.');
    skip_ws();
    if (!at_end() && peek() != '#') fail("unexpected trailing content");
    out.push_back(Triple{std::move(subject), std::move(predicate), std::move(object)});
    return true;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw SyntaxError(message, line_, pos_ + 1); }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
  }
  void expect(char c) {
    if (at_end() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  unsigned long parse_hex(std::size_t digits) {
    if (pos_ + digits > text_.size()) fail("truncated unicode escape");
    unsigned long value = 0;
    for (std::size_t i = 0; i < digits; ++i) {
      const char c = text_[pos_++];
      value <<= 4;
      if (c >= '0' && c <= '9') value |= static_cast<unsigned long>(c - '0');
      else if (c >= 'a' && c <= 'f') value |= static_cast<unsigned long>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') value |= static_cast<unsigned long>(c - 'A' + 10);
      else fail("invalid hex digit in unicode escape");
    }
    return value;
  }

  Uri parse_subject() {
    if (text_.substr(pos_, 2) == "_:") throw BlankNodeError(line_, pos_ + 1);
    return parse_iri();
  }

  Uri parse_iri() {
    if (text_.substr(pos_, 2) == "_:") throw BlankNodeError(line_, pos_ + 1);
    expect('<');
    const std::size_t start = pos_;
    std::string value;
    while (true) {
      if (at_end()) fail("unterminated IRI");
      const char c = text_[pos_++];
      if (c == '>') break;
      if (c == '\\') {
        if (at_end()) fail("dangling escape in IRI");
        const char kind = text_[pos_++];
        if (kind == 'u') append_utf8(value, parse_hex(4));
        else if (kind == 'U') append_utf8(value, parse_hex(8));
        else fail("invalid escape in IRI");
      } else {
        value += c;
      }
    }
    try {
      return Uri(std::move(value));
    } catch (const UriError& e) {
      throw SyntaxError(e.what(), line_, start);
    }
  }

  Term parse_object() {
    if (at_end()) fail("missing object");
    if (peek() == '<') return parse_iri();
    if (peek() == '"') return parse_literal();
    if (text_.substr(pos_, 2) == "_:") throw BlankNodeError(line_, pos_ + 1);
    fail("expected IRI or literal");
  }

  Literal parse_literal() {
    expect('"');
    std::string lexical;
    while (true) {
      if (at_end()) fail("unterminated literal");
      const char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        lexical += c;
        continue;
      }
      if (at_end()) fail("dangling escape in literal");
      switch (const char e = text_[pos_++]) {
        case 't': lexical += '\t'; break;
        case 'b': lexical += '\b'; break;
        case 'n': lexical += '\n'; break;
        case 'r': lexical += '\r'; break;
        case 'f': lexical += '\f'; break;
        case '"': lexical += '"'; break;
        case '\'': lexical += '\''; break;
        case '\\': lexical += '\\'; break;
        case 'u': append_utf8(lexical, parse_hex(4)); break;
        case 'U': append_utf8(lexical, parse_hex(8)); break;
        default: fail(std::string("invalid escape '\\") + e + "' in literal");
      }
    }
    if (text_.substr(pos_, 2) == "^^") {
      pos_ += 2;
      return Literal(std::move(lexical), parse_iri());
    }
    if (!at_end() && peek() == '@') {
      ++pos_;
      const std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) ++pos_;
      if (pos_ == start) fail("empty language tag");
      return Literal(std::move(lexical), std::nullopt, std::string(text_.substr(start, pos_ - start)));
    }
    return Literal(std::move(lexical));
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses N-Triples text into a duplicate-free, sorted triple set.
inline std::vector<Triple> parse_ntriples(std::istream& in, const NTriplesOptions& options = {}) {
  std::vector<Triple> triples;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    try {
      detail::NTriplesLine(line, number).parse(triples);
    } catch (const BlankNodeError&) {
      if (!options.skip_blank_nodes) throw;
    }
  }
  std::sort(triples.begin(), triples.end());
  triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
  return triples;
}

inline std::vector<Triple> parse_ntriples(std::string_view text, const NTriplesOptions& options = {}) {
  std::istringstream in{std::string(text)};
  return parse_ntriples(in, options);
}

template <typename Range>
std::string serialize_ntriples(const Range& triples) {
  std::string out;
  for (const Triple& t : triples) {
    out += to_ntriples(t);
    out += '\n';
  }
  return out;
}

/// Parses a single N-Triples term ("<iri>" or a literal).
inline Term parse_ntriples_term(std::string_view text) {
  const std::string line = "<urn:x-nautilod:s> <urn:x-nautilod:p> " + std::string(text) + " .";
  std::vector<Triple> out;
  detail::NTriplesLine(line, 1).parse(out);
  return out.front().object;
}

}  // namespace nautilod
