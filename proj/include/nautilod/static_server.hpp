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

// Minimal static Linked Data server for tests and demos. GET /a/b serves
// <root>/a/b or <root>/a/b.nt as application/n-triples and logs the request.

#pragma once

#include <atomic>
#include <functional>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

namespace nautilod {

class StaticServer {
 public:
  StaticServer(std::string host, std::filesystem::path root, int port = 0)
      : host_(std::move(host)), root_(std::move(root)) {
    server_.Get(".*", [this](const httplib::Request& req, httplib::Response& res) { serve(req, res); });
    port_ = port == 0 ? server_.bind_to_any_port(host_) : (server_.bind_to_port(host_, port) ? port : -1);
    if (port_ <= 0) throw std::runtime_error("cannot bind " + host_);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StaticServer() { stop(); }
  StaticServer(const StaticServer&) = delete;
  StaticServer& operator=(const StaticServer&) = delete;

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const noexcept { return port_; }
  const std::string& host() const noexcept { return host_; }
  std::string origin() const { return "http://" + host_ + ":" + std::to_string(port_); }

  // `path` answers 303 See Other pointing at `location`.
  void redirect(const std::string& path, const std::string& location) {
    std::lock_guard lock(mutex_);
    redirects_[path] = location;
  }

  void set_delay(std::chrono::milliseconds delay) { delay_ms_ = delay.count(); }

  // "GET /path" entries in arrival order.
  std::vector<std::string> log() const {
    std::lock_guard lock(mutex_);
    return log_;
  }

  void clear_log() {
    std::lock_guard lock(mutex_);
    log_.clear();
  }

  // Optional hook, e.g. for printing requests from a command-line server.
  std::function<void(const std::string&)> on_request;

 private:
  void serve(const httplib::Request& req, httplib::Response& res) {
    std::string location;
    {
      std::lock_guard lock(mutex_);
      log_.push_back("GET " + req.path);
      if (auto it = redirects_.find(req.path); it != redirects_.end()) location = it->second;
    }
    if (on_request) on_request("GET " + req.path);
    if (const auto d = delay_ms_.load(); d > 0) std::this_thread::sleep_for(std::chrono::milliseconds(d));
    if (!location.empty()) {
      res.status = 303;
      res.set_header("Location", location);
      return;
    }
    if (req.path.find("..") != std::string::npos) {
      res.status = 403;
      return;
    }
    const auto rel = std::filesystem::path(req.path.substr(1));
    for (const auto& candidate : {root_ / rel, root_ / (rel.string() + ".nt")}) {
      std::error_code ec;
      if (!req.path.empty() && req.path != "/" && std::filesystem::is_regular_file(candidate, ec)) {
        std::ifstream in(candidate, std::ios::binary);
        std::ostringstream body;
        body << in.rdbuf();
        res.set_content(body.str(), "application/n-triples");
        return;
      }
    }
    res.status = 404;
  }

  std::string host_;
  std::filesystem::path root_;
  int port_ = 0;
  httplib::Server server_;
  std::thread thread_;
  mutable std::mutex mutex_;
  std::vector<std::string> log_;
  std::map<std::string, std::string> redirects_;
  std::atomic<long long> delay_ms_{0};
};

}  // namespace nautilod
