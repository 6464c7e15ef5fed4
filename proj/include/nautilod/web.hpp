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

// Web-of-Data instances: a resolver from URIs to descriptions. A URI that
// cannot be dereferenced resolves to the empty description.

#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "nautilod/error.hpp"
#include "nautilod/ntriples.hpp"
#include "nautilod/rdf.hpp"

namespace nautilod {

enum class FetchStatus { ok, http_error, timeout, skipped_by_policy, parse_error };

inline const char* to_string(FetchStatus s) {
  switch (s) {
    case FetchStatus::ok: return "ok";
    case FetchStatus::http_error: return "httpError";
    case FetchStatus::timeout: return "timeout";
    case FetchStatus::skipped_by_policy: return "skippedByPolicy";
    case FetchStatus::parse_error: return "parseError";
  }
  return "unknown";
}

// Per-fetch limits enforced by the instance itself.
struct FetchLimits {
  std::optional<std::size_t> max_triples;
  std::optional<std::chrono::milliseconds> timeout;
};

/// Diagnostic record of one dereference. `bytes` and `triples` are zero
/// unless `status == ok`.
struct FetchRecord {
  Uri uri;
  FetchStatus status = FetchStatus::ok;
  int http_code = 0;
  std::string reason;
  std::size_t bytes = 0;
  std::size_t triples = 0;
  std::chrono::nanoseconds elapsed{0};
  bool cache_hit = false;
};

struct FetchResult {
  std::shared_ptr<const Description> description;
  FetchRecord record;
};

inline FetchResult empty_fetch(const Uri& u, FetchStatus status, std::string reason, int http_code = 0) {
  FetchRecord record{u, status, http_code, std::move(reason)};
  return {std::make_shared<const Description>(u), std::move(record)};
}

/// W = <U, D>. Implementations must be safe for concurrent callers.
class WebInstance {
 public:
  virtual ~WebInstance() = default;
  virtual FetchResult fetch(const Uri& u, const FetchLimits& limits) = 0;
};

/// D(u) with no limits.
inline std::shared_ptr<const Description> resolve(WebInstance& web, const Uri& u) {
  return web.fetch(u, {}).description;
}

/// In-memory instance backed by fixture descriptions.
class FixtureWeb : public WebInstance {
 public:
  FixtureWeb() = default;

  void add(const Uri& u, std::vector<Triple> triples) {
    auto description = std::make_shared<const Description>(u, std::move(triples));
    const std::size_t bytes = serialize_ntriples(description->triples()).size();
    std::lock_guard lock(mutex_);
    if (!entries_.emplace(u, Entry{std::move(description), bytes}).second)
      throw FixtureError("duplicate fixture entry for " + u.str());
  }

  bool contains(const Uri& u) const {
    std::lock_guard lock(mutex_);
    return entries_.count(u) != 0;
  }

  std::vector<Uri> uris() const {
    std::lock_guard lock(mutex_);
    std::vector<Uri> out;
    for (const auto& [u, _] : entries_) out.push_back(u);
    std::sort(out.begin(), out.end());
    return out;
  }

  // Every fetch sleeps this long first; lets tests exercise time limits.
  void set_latency(std::chrono::milliseconds latency) { latency_ = latency; }

  FetchResult fetch(const Uri& u, const FetchLimits& limits) override {
    const auto start = std::chrono::steady_clock::now();
    if (latency_.count() > 0) {
      if (limits.timeout && *limits.timeout < latency_) {
        std::this_thread::sleep_for(*limits.timeout);
        auto r = empty_fetch(u, FetchStatus::timeout, "timeoutDer");
        r.record.elapsed = std::chrono::steady_clock::now() - start;
        return r;
      }
      std::this_thread::sleep_for(latency_);
    }
    std::shared_ptr<const Description> description;
    std::size_t bytes = 0;
    {
      std::lock_guard lock(mutex_);
      auto it = entries_.find(u);
      if (it == entries_.end()) {
        auto& empty = missing_[u];
        if (!empty) empty = std::make_shared<const Description>(u);
        FetchRecord record{u, FetchStatus::http_error, 404, "not in fixture"};
        record.elapsed = std::chrono::steady_clock::now() - start;
        return {empty, std::move(record)};
      }
      description = it->second.description;
      bytes = it->second.bytes;
    }
    FetchRecord record{u};
    record.elapsed = std::chrono::steady_clock::now() - start;
    if (limits.max_triples && description->size() > *limits.max_triples) {
      record.status = FetchStatus::skipped_by_policy;
      record.reason = "maxDerTriples";
      return {std::make_shared<const Description>(u), std::move(record)};
    }
    record.bytes = bytes;
    record.triples = description->size();
    return {std::move(description), std::move(record)};
  }

 private:
  struct Entry {
    std::shared_ptr<const Description> description;
    std::size_t bytes;
  };

  mutable std::mutex mutex_;
  std::unordered_map<Uri, Entry> entries_;
  std::unordered_map<Uri, std::shared_ptr<const Description>> missing_;
  std::chrono::milliseconds latency_{0};
};

/// Loads a manifest of `URI <TAB> relative/path.nt` lines. Paths are
/// relative to the manifest's directory; `#` starts a comment line.
inline std::shared_ptr<FixtureWeb> load_fixture_web(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw FixtureError("cannot open fixture manifest " + manifest.string());
  auto web = std::make_shared<FixtureWeb>();
  const auto base = manifest.parent_path();
  std::map<std::filesystem::path, std::vector<Triple>> files;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const std::string where = manifest.string() + ":" + std::to_string(number);
    std::size_t sep = line.find('\t', first);
    if (sep == std::string::npos) sep = line.find(' ', first);
    if (sep == std::string::npos) throw FixtureError(where + ": expected '<URI> TAB <path>'");
    std::string uri_text = line.substr(first, sep - first);
    std::string rel = line.substr(sep);
    rel.erase(0, rel.find_first_not_of(" \t"));
    rel.erase(rel.find_last_not_of(" \t") + 1);
    if (uri_text.size() >= 2 && uri_text.front() == '<' && uri_text.back() == '>')
      uri_text = uri_text.substr(1, uri_text.size() - 2);
    if (rel.empty()) throw FixtureError(where + ": missing file path");
    std::optional<Uri> uri;
    try {
      uri.emplace(uri_text);
    } catch (const UriError& e) {
      throw FixtureError(where + ": " + e.what());
    }
    const auto path = base / rel;
    auto it = files.find(path);
    if (it == files.end()) {
      std::ifstream file(path);
      if (!file) throw FixtureError(where + ": missing file " + path.string());
      try {
        it = files.emplace(path, parse_ntriples(file)).first;
      } catch (const SyntaxError& e) {
        throw FixtureError(path.string() + ": " + e.what());
      }
    }
    try {
      web->add(*uri, it->second);
    } catch (const FixtureError& e) {
      throw FixtureError(where + ": " + e.what());
    }
  }
  return web;
}

/// Per-run snapshot over another instance: each URI is fetched at most once
/// and every later call returns the same description as a zero-byte cache
/// hit. Concurrent callers of the same URI share one in-flight fetch.
class SnapshotWeb : public WebInstance {
 public:
  explicit SnapshotWeb(std::shared_ptr<WebInstance> inner) : inner_(std::move(inner)) {}

  FetchResult fetch(const Uri& u, const FetchLimits& limits) override {
    std::shared_future<FetchResult> future;
    std::promise<FetchResult> promise;
    bool owner = false;
    {
      std::lock_guard lock(mutex_);
      auto it = cache_.find(u);
      if (it == cache_.end()) {
        future = promise.get_future().share();
        cache_.emplace(u, future);
        owner = true;
      } else {
        future = it->second;
      }
    }
    if (owner) {
      try {
        promise.set_value(inner_->fetch(u, limits));
      } catch (...) {
        promise.set_exception(std::current_exception());
      }
      return future.get();
    }
    FetchResult hit = future.get();
    hit.record.bytes = 0;
    hit.record.elapsed = std::chrono::nanoseconds{0};
    hit.record.cache_hit = true;
    return hit;
  }

  bool cached(const Uri& u) const {
    std::lock_guard lock(mutex_);
    return cache_.count(u) != 0;
  }

 private:
  std::shared_ptr<WebInstance> inner_;
  mutable std::mutex mutex_;
  std::unordered_map<Uri, std::shared_future<FetchResult>> cache_;
};

/// Persists descriptions as a fixture directory (one N-Triples file per URI
/// plus `manifest.tsv`) that `load_fixture_web` can reload.
class GraphStore {
 public:
  explicit GraphStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
    std::ofstream(manifest_path(), std::ios::trunc);
  }

  const std::filesystem::path& directory() const noexcept { return dir_; }
  std::filesystem::path manifest_path() const { return dir_ / "manifest.tsv"; }

  // Returns false when the URI was already stored.
  bool save(const Description& d) {
    std::lock_guard lock(mutex_);
    if (!saved_.insert(d.source()).second) return false;
    std::ostringstream name;
    name << std::setw(6) << std::setfill('0') << saved_.size() << ".nt";
    std::ofstream(dir_ / name.str()) << serialize_ntriples(d.triples());
    std::ofstream(manifest_path(), std::ios::app) << d.source().str() << '\t' << name.str() << '\n';
    return true;
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return saved_.size();
  }

 private:
  std::filesystem::path dir_;
  mutable std::mutex mutex_;
  std::unordered_set<Uri> saved_;
};

}  // namespace nautilod
