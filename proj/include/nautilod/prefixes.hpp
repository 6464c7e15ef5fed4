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

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>

#include "nautilod/error.hpp"
#include "nautilod/rdf.hpp"

namespace nautilod {

using PrefixMap = std::map<std::string, std::string, std::less<>>;

inline PrefixMap default_prefixes() {
  return {
      {"owl", "http://www.w3.org/2002/07/owl#"},
      {"rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"},
      {"rdfs", "http://www.w3.org/2000/01/rdf-schema#"},
      {"foaf", "http://xmlns.com/foaf/0.1/"},
      {"dbpo", "http://dbpedia.org/ontology/"},
      {"dbp", "http://dbpedia.org/resource/"},
      {"xsd", "http://www.w3.org/2001/XMLSchema#"},
  };
}

/// Reads `prefix IRI` lines (also accepts `prefix: <IRI>`) on top of `base`.
inline PrefixMap load_prefix_file(const std::filesystem::path& path, PrefixMap base = default_prefixes()) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open prefix file " + path.string());
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto sep = line.find_first_of(" \t", first);
    if (sep == std::string::npos) throw SyntaxError("expected 'prefix IRI'", number, first + 1);
    std::string name = line.substr(first, sep - first);
    if (!name.empty() && name.back() == ':') name.pop_back();
    std::string iri = line.substr(sep);
    iri.erase(0, iri.find_first_not_of(" \t"));
    iri.erase(iri.find_last_not_of(" \t\r") + 1);
    if (iri.size() >= 2 && iri.front() == '<' && iri.back() == '>') iri = iri.substr(1, iri.size() - 2);
    if (name.empty() || iri.empty()) throw SyntaxError("expected 'prefix IRI'", number, first + 1);
    base[name] = iri;
  }
  return base;
}

namespace detail {

inline bool is_local_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == '%' ||
         static_cast<unsigned char>(c) >= 0x80;
}

inline bool is_prefix_char(char c, bool first) {
  if (std::isalpha(static_cast<unsigned char>(c))) return true;
  return !first && (std::isdigit(static_cast<unsigned char>(c)) || c == '_' || c == '-');
}

}  // namespace detail

/// Expands the content of an `<...>` token: `<owl:sameAs>` uses the prefix
/// map, `<http://...>` (or any `scheme://` / `urn:`) is taken verbatim.
inline Uri expand_bracketed_iri(std::string_view content, const PrefixMap& prefixes, std::size_t column) {
  const auto colon = content.find(':');
  if (colon != std::string_view::npos && colon > 0) {
    const std::string_view prefix = content.substr(0, colon);
    if (content.substr(colon + 1, 2) != "//") {
      if (auto it = prefixes.find(prefix); it != prefixes.end())
        return Uri(it->second + std::string(content.substr(colon + 1)));
    }
    if (content.find("://") != std::string_view::npos || prefix == "urn" || prefix == "mailto")
      return Uri(std::string(content));
    throw UnknownPrefixError(std::string(prefix), 1, column);
  }
  throw SyntaxError("not an absolute IRI or prefixed name: <" + std::string(content) + ">", 1, column);
}

}  // namespace nautilod
