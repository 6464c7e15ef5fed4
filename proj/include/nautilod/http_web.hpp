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

// Live dereferencing over HTTP(S) with content negotiation and redirects.

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <httplib.h>

#include "nautilod/ntriples.hpp"
#include "nautilod/rdf.hpp"
#include "nautilod/web.hpp"

namespace nautilod {

inline constexpr const char* kAcceptHeader =
    "application/n-triples, text/plain;q=0.9, text/turtle;q=0.5, application/rdf+xml;q=0.3";

struct HttpOptions {
  int max_redirects = 5;
  std::size_t connections_per_host = 4;
  std::chrono::milliseconds default_timeout{30000};
  // host:port of an HTTP proxy; from_env() reads http_proxy and no_proxy.
  std::optional<std::pair<std::string, int>> proxy;
  std::vector<std::string> no_proxy;
  std::string user_agent = "swget/1.0";

  static HttpOptions from_env() {
    HttpOptions o;
    const char* v = std::getenv("http_proxy");
    if (!v) v = std::getenv("HTTP_PROXY");
    if (v && *v) {
      std::string p = v;
      if (auto s = p.find("://"); s != std::string::npos) p = p.substr(s + 3);
      if (auto s = p.find('/'); s != std::string::npos) p.resize(s);
      if (auto at = p.rfind('@'); at != std::string::npos) p = p.substr(at + 1);
      int port = 80;
      if (auto colon = p.rfind(':'); colon != std::string::npos) {
        port = std::atoi(p.c_str() + colon + 1);
        p.resize(colon);
      }
      if (!p.empty()) o.proxy.emplace(p, port);
    }
    const char* skip = std::getenv("no_proxy");
    if (!skip) skip = std::getenv("NO_PROXY");
    if (skip) {
      std::stringstream list(skip);
      for (std::string item; std::getline(list, item, ',');) {
        item.erase(0, item.find_first_not_of(" ."));
        item.erase(item.find_last_not_of(' ') + 1);
        if (!item.empty()) o.no_proxy.push_back(item);
      }
    }
    return o;
  }

  // Loopback is never proxied.
  bool use_proxy(const std::string& host) const {
    if (!proxy || host == "localhost" || host.rfind("127.", 0) == 0) return false;
    for (const auto& d : no_proxy)
      if (d == "*" || host == d || (host.size() > d.size() && host.ends_with("." + d))) return false;
    return true;
  }
};

namespace detail {

struct SplitUrl {
  std::string scheme;
  std::string origin;  // scheme://authority
  std::string host;    // lowercased, no port or userinfo
  std::string path;    // path and query, never empty
};

inline std::optional<SplitUrl> split_url(const std::string& url) {
  const auto sep = url.find("://");
  if (sep == std::string::npos) return std::nullopt;
  SplitUrl out;
  out.scheme = url.substr(0, sep);
  for (char& c : out.scheme) c = ascii_lower(c);
  const auto path_start = url.find_first_of("/?#", sep + 3);
  out.origin = url.substr(0, path_start);
  out.host = out.origin.substr(sep + 3);
  if (auto at = out.host.rfind('@'); at != std::string::npos) out.host.erase(0, at + 1);
  if (auto colon = out.host.rfind(':'); colon != std::string::npos && out.host.find(']') == std::string::npos)
    out.host.resize(colon);
  for (char& c : out.host) c = ascii_lower(c);
  out.path = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (auto hash = out.path.find('#'); hash != std::string::npos) out.path.resize(hash);
  if (out.path.empty() || out.path.front() != '/') out.path.insert(0, "/");
  return out;
}

inline std::string resolve_location(const SplitUrl& base, const std::string& location) {
  if (location.find("://") != std::string::npos) return location;
  if (location.rfind("//", 0) == 0) return base.scheme + ":" + location;
  if (!location.empty() && location.front() == '/') return base.origin + location;
  std::string dir = base.path.substr(0, base.path.rfind('/') + 1);
  return base.origin + dir + location;
}

class HostGate {
 public:
  explicit HostGate(std::size_t limit) : limit_(limit) {}
  void acquire(const std::string& host) {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return active_[host] < limit_; });
    ++active_[host];
  }
  void release(const std::string& host) {
    {
      std::lock_guard lock(mutex_);
      --active_[host];
    }
    cv_.notify_all();
  }

 private:
  std::size_t limit_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::map<std::string, std::size_t> active_;
};

}  // namespace detail

/// Dereferences http and https URIs. Never throws for transport problems:
/// every failure comes back as an empty description with a FetchRecord.
class HttpWeb : public WebInstance {
 public:
  explicit HttpWeb(HttpOptions options = HttpOptions::from_env())
      : options_(std::move(options)), gate_(options_.connections_per_host) {}

  FetchResult fetch(const Uri& u, const FetchLimits& limits) override {
    const auto start = std::chrono::steady_clock::now();
    auto finish = [&](FetchResult r) {
      r.record.elapsed = std::chrono::steady_clock::now() - start;
      return r;
    };
    std::string url = u.str();
    const auto timeout = limits.timeout.value_or(options_.default_timeout);
    for (int hop = 0; hop <= options_.max_redirects; ++hop) {
      const auto parts = detail::split_url(url);
      if (!parts || (parts->scheme != "http" && parts->scheme != "https"))
        return finish(empty_fetch(u, FetchStatus::skipped_by_policy, "scheme"));

      httplib::Result res = get(*parts, timeout);
      if (!res) {
        const auto err = res.error();
        const bool timed_out = err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout ||
                               std::chrono::steady_clock::now() - start > timeout;
        return finish(empty_fetch(u, timed_out ? FetchStatus::timeout : FetchStatus::http_error,
                                  httplib::to_string(err)));
      }
      if (limits.timeout && std::chrono::steady_clock::now() - start > *limits.timeout)
        return finish(empty_fetch(u, FetchStatus::timeout, "timeoutDer"));
      const int code = res->status;
      if (code == 301 || code == 302 || code == 303 || code == 307 || code == 308) {
        if (!res->has_header("Location"))
          return finish(empty_fetch(u, FetchStatus::http_error, "redirect without Location", code));
        url = detail::resolve_location(*parts, res->get_header_value("Location"));
        continue;
      }
      if (code < 200 || code >= 300) return finish(empty_fetch(u, FetchStatus::http_error, "HTTP error", code));

      std::string type = res->get_header_value("Content-Type");
      type = type.substr(0, type.find(';'));
      for (char& c : type) c = detail::ascii_lower(c);
      if (type == "text/turtle" || type == "application/rdf+xml" || type == "text/n3" || type == "text/html")
        return finish(empty_fetch(u, FetchStatus::parse_error, "unsupported format " + type, code));
      std::vector<Triple> triples;
      try {
        triples = parse_ntriples(std::string_view(res->body), NTriplesOptions{true});
      } catch (const SyntaxError& e) {
        return finish(empty_fetch(u, FetchStatus::parse_error, e.what(), code));
      }
      if (limits.max_triples && triples.size() > *limits.max_triples)
        return finish(empty_fetch(u, FetchStatus::skipped_by_policy, "maxDerTriples", code));
      FetchRecord record{u, FetchStatus::ok, code};
      record.bytes = res->body.size();
      record.triples = triples.size();
      return finish({std::make_shared<const Description>(u, std::move(triples)), std::move(record)});
    }
    return finish(empty_fetch(u, FetchStatus::http_error, "too many redirects"));
  }

 private:
  httplib::Result get(const detail::SplitUrl& parts, std::chrono::milliseconds timeout) {
    gate_.acquire(parts.origin);
    httplib::Client client(parts.origin);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    client.set_follow_location(false);
    if (options_.use_proxy(parts.host)) client.set_proxy(options_.proxy->first, options_.proxy->second);
    auto res = client.Get(parts.path, {{"Accept", kAcceptHeader}, {"User-Agent", options_.user_agent}});
    gate_.release(parts.origin);
    return res;
  }

  HttpOptions options_;
  detail::HostGate gate_;
};

}  // namespace nautilod
