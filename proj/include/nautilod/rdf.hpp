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

// Core RDF value types: URIs, literals, triples and per-URI descriptions.
// Blank nodes are deliberately absent from the model.

#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "nautilod/error.hpp"

namespace nautilod {

namespace detail {

inline char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

inline bool is_scheme_char(char c, bool first) {
  if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z')) return true;
  if (first) return false;
  return (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.';
}

// Length of the "scheme:" prefix, or 0 if the text has no scheme.
inline std::size_t scheme_length(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && is_scheme_char(text[i], i == 0)) ++i;
  if (i == 0 || i >= text.size() || text[i] != ':') return 0;
  return i + 1;
}

// [begin, end) of the host inside an authority-bearing IRI, if any.
inline std::optional<std::pair<std::size_t, std::size_t>> host_span(std::string_view iri) {
  const std::size_t scheme = scheme_length(iri);
  if (scheme == 0 || iri.substr(scheme, 2) != "//") return std::nullopt;
  const std::size_t auth_begin = scheme + 2;
  std::size_t auth_end = iri.find_first_of("/?#", auth_begin);
  if (auth_end == std::string_view::npos) auth_end = iri.size();
  std::size_t host_begin = auth_begin;
  const std::size_t at = iri.substr(auth_begin, auth_end - auth_begin).rfind('@');
  if (at != std::string_view::npos) host_begin = auth_begin + at + 1;
  std::size_t host_end = auth_end;
  if (host_begin < auth_end && iri[host_begin] == '[') {
    const std::size_t close = iri.find(']', host_begin);
    if (close == std::string_view::npos || close >= auth_end) return std::nullopt;
    host_end = close + 1;
  } else {
    const std::size_t colon = iri.substr(host_begin, auth_end - host_begin).find(':');
    if (colon != std::string_view::npos) host_end = host_begin + colon;
  }
  return std::make_pair(host_begin, host_end);
}

}  // namespace detail

/// An absolute IRI. Construction validates that a scheme is present and
/// lowercases the scheme and host; no other normalization is applied.
class Uri {
 public:
  explicit Uri(std::string value) : value_(std::move(value)) {
    const std::size_t scheme = detail::scheme_length(value_);
    if (scheme == 0 || scheme == value_.size())
      throw UriError("not an absolute IRI: '" + value_ + "'");
    for (unsigned char c : value_) {
      if (c <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' ||
          c == '^' || c == '`' || c == '\\')
        throw UriError("illegal character in IRI: '" + value_ + "'");
    }
    for (std::size_t i = 0; i + 1 < scheme; ++i) value_[i] = detail::ascii_lower(value_[i]);
    if (auto span = detail::host_span(value_)) {
      for (std::size_t i = span->first; i < span->second; ++i) value_[i] = detail::ascii_lower(value_[i]);
    }
  }

  const std::string& str() const noexcept { return value_; }

  friend bool operator==(const Uri&, const Uri&) = default;
  friend auto operator<=>(const Uri&, const Uri&) = default;

 private:
  std::string value_;
};

inline std::ostream& operator<<(std::ostream& os, const Uri& u) { return os << '<' << u.str() << '>'; }

/// Lowercased host of an authority-bearing URI ("http://DBpedia.org/x" -> "dbpedia.org").
inline std::string host_of(const Uri& u) {
  auto span = detail::host_span(u.str());
  if (!span || span->first == span->second) throw UriError("URI has no authority host: '" + u.str() + "'");
  return u.str().substr(span->first, span->second - span->first);
}

namespace xsd {
inline const std::string kNamespace = "http://www.w3.org/2001/XMLSchema#";
inline Uri type(const std::string& local) { return Uri(kNamespace + local); }
}  // namespace xsd

struct Literal {
  std::string lexical;
  std::optional<Uri> datatype;
  std::optional<std::string> language;

  Literal() = default;
  explicit Literal(std::string lex, std::optional<Uri> dt = std::nullopt,
                   std::optional<std::string> lang = std::nullopt)
      : lexical(std::move(lex)), datatype(std::move(dt)), language(std::move(lang)) {
    if (datatype && language) throw Error("a literal cannot carry both a datatype and a language tag");
  }

  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

using Term = std::variant<Uri, Literal>;

inline bool is_uri(const Term& t) { return std::holds_alternative<Uri>(t); }
inline const Uri* as_uri(const Term& t) { return std::get_if<Uri>(&t); }
inline const Literal* as_literal(const Term& t) { return std::get_if<Literal>(&t); }

struct Triple {
  Uri subject;
  Uri predicate;
  Term object;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

namespace detail {

inline void append_escaped(std::string& out, std::string_view text) {
  for (unsigned char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20 || c == 0x7f) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04X", static_cast<unsigned>(c));
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
}

}  // namespace detail

inline std::string to_ntriples(const Uri& u) { return "<" + u.str() + ">"; }

inline std::string to_ntriples(const Literal& l) {
  std::string out = "\"";
  detail::append_escaped(out, l.lexical);
  out += '"';
  if (l.datatype) out += "^^" + to_ntriples(*l.datatype);
  if (l.language) out += "@" + *l.language;
  return out;
}

inline std::string to_ntriples(const Term& t) {
  return std::visit([](const auto& v) { return to_ntriples(v); }, t);
}

inline std::string to_ntriples(const Triple& t) {
  return to_ntriples(t.subject) + " " + to_ntriples(t.predicate) + " " + to_ntriples(t.object) + " .";
}

inline std::ostream& operator<<(std::ostream& os, const Literal& l) { return os << to_ntriples(l); }
inline std::ostream& operator<<(std::ostream& os, const Term& t) { return os << to_ntriples(t); }
inline std::ostream& operator<<(std::ostream& os, const Triple& t) { return os << to_ntriples(t); }

}  // namespace nautilod

template <>
struct std::hash<nautilod::Uri> {
  std::size_t operator()(const nautilod::Uri& u) const noexcept { return std::hash<std::string>{}(u.str()); }
};

template <>
struct std::hash<nautilod::Literal> {
  std::size_t operator()(const nautilod::Literal& l) const noexcept {
    std::size_t h = std::hash<std::string>{}(l.lexical);
    if (l.datatype) h ^= std::hash<nautilod::Uri>{}(*l.datatype) * 31;
    if (l.language) h ^= std::hash<std::string>{}(*l.language) * 131;
    return h;
  }
};

template <>
struct std::hash<nautilod::Term> {
  std::size_t operator()(const nautilod::Term& t) const noexcept {
    return std::visit([](const auto& v) { return std::hash<std::decay_t<decltype(v)>>{}(v); }, t) ^ t.index();
  }
};

namespace nautilod {

/// D(u): the finite set of triples obtained by dereferencing `source`.
/// Immutable; indexed by subject, predicate and object.
class Description {
 public:
  explicit Description(Uri source, std::vector<Triple> triples = {}) : source_(std::move(source)) {
    std::sort(triples.begin(), triples.end());
    triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
    triples_ = std::move(triples);
    for (std::size_t i = 0; i < triples_.size(); ++i) {
      by_subject_[triples_[i].subject].push_back(i);
      by_predicate_[triples_[i].predicate].push_back(i);
      by_object_[triples_[i].object].push_back(i);
    }
  }

  const Uri& source() const noexcept { return source_; }
  const std::vector<Triple>& triples() const noexcept { return triples_; }
  std::size_t size() const noexcept { return triples_.size(); }
  bool empty() const noexcept { return triples_.empty(); }
  auto begin() const noexcept { return triples_.begin(); }
  auto end() const noexcept { return triples_.end(); }

  bool contains(const Triple& t) const { return std::binary_search(triples_.begin(), triples_.end(), t); }

  /// All triples matching the pattern; unset positions are wildcards.
  std::vector<const Triple*> match(const Uri* subject, const Uri* predicate, const Term* object) const {
    const std::vector<std::size_t>* candidates = nullptr;
    auto narrow = [&candidates](const auto& index, const auto& key) {
      auto it = index.find(key);
      static const std::vector<std::size_t> kNone;
      const std::vector<std::size_t>* found = it == index.end() ? &kNone : &it->second;
      if (!candidates || found->size() < candidates->size()) candidates = found;
    };
    if (subject) narrow(by_subject_, *subject);
    if (object) narrow(by_object_, *object);
    if (predicate) narrow(by_predicate_, *predicate);

    std::vector<const Triple*> out;
    auto accept = [&](const Triple& t) {
      if (subject && t.subject != *subject) return;
      if (predicate && t.predicate != *predicate) return;
      if (object && t.object != *object) return;
      out.push_back(&t);
    };
    if (candidates) {
      for (std::size_t i : *candidates) accept(triples_[i]);
    } else {
      for (const Triple& t : triples_) accept(t);
    }
    return out;
  }

  friend bool operator==(const Description& a, const Description& b) {
    return a.source_ == b.source_ && a.triples_ == b.triples_;
  }

 private:
  Uri source_;
  std::vector<Triple> triples_;
  std::unordered_map<Uri, std::vector<std::size_t>> by_subject_;
  std::unordered_map<Uri, std::vector<std::size_t>> by_predicate_;
  std::unordered_map<Term, std::vector<std::size_t>> by_object_;
};

}  // namespace nautilod
