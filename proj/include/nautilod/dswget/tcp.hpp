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

// Dswget over TCP: one connection per message, the sender closes after
// writing. Addresses look like tcp://127.0.0.1:7001.

#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>

#include "nautilod/dswget/engine.hpp"
#include "nautilod/dswget/message.hpp"
#include "nautilod/dswget/network.hpp"

namespace nautilod::dswget {

struct TcpAddress {
  std::string ip;
  int port = 0;

  static TcpAddress parse(const std::string& text) {
    const std::string prefix = "tcp://";
    if (text.rfind(prefix, 0) != 0) throw ProtocolError("address must start with tcp://: " + text);
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon < prefix.size()) throw ProtocolError("address needs a port: " + text);
    TcpAddress a{text.substr(prefix.size(), colon - prefix.size()), std::atoi(text.c_str() + colon + 1)};
    if (a.ip.empty() || a.port <= 0 || a.port > 65535) throw ProtocolError("bad address " + text);
    return a;
  }

  std::string str() const { return "tcp://" + ip + ":" + std::to_string(port); }
};

namespace detail {

class Fd {
 public:
  explicit Fd(int fd = -1) : fd_(fd) {}
  ~Fd() { reset(); }
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  int get() const noexcept { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_;
};

inline sockaddr_in to_sockaddr(const TcpAddress& a) {
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(static_cast<std::uint16_t>(a.port));
  if (::inet_pton(AF_INET, a.ip.c_str(), &sa.sin_addr) != 1) throw ProtocolError("not an IPv4 address: " + a.ip);
  return sa;
}

}  // namespace detail

/// Delivers one encoded message. Returns false if the peer is unreachable.
inline bool send_message(const std::string& address, const std::string& wire) {
  if (wire.size() > kMaxMessageBytes) return false;
  TcpAddress a;
  try {
    a = TcpAddress::parse(address);
  } catch (const ProtocolError&) {
    return false;
  }
  detail::Fd fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (fd.get() < 0) return false;
  const sockaddr_in sa = detail::to_sockaddr(a);
  if (::connect(fd.get(), reinterpret_cast<const sockaddr*>(&sa), sizeof sa) != 0) return false;
  std::size_t sent = 0;
  while (sent < wire.size()) {
    const ssize_t n = ::send(fd.get(), wire.data() + sent, wire.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

/// Accepts connections and hands each complete message to `handler` on a
/// separate worker thread, so a slow handler never stalls senders.
class TcpListener {
 public:
  using Handler = std::function<void(std::string)>;

  TcpListener(const std::string& ip, int port, Handler handler) : handler_(std::move(handler)) {
    fd_ = detail::Fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (fd_.get() < 0) throw Error("socket: " + std::string(std::strerror(errno)));
    int one = 1;
    ::setsockopt(fd_.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in sa = detail::to_sockaddr({ip, port});
    if (::bind(fd_.get(), reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0)
      throw Error("bind " + ip + ":" + std::to_string(port) + ": " + std::strerror(errno));
    if (::listen(fd_.get(), 64) != 0) throw Error("listen: " + std::string(std::strerror(errno)));
    socklen_t len = sizeof sa;
    ::getsockname(fd_.get(), reinterpret_cast<sockaddr*>(&sa), &len);
    address_ = {ip, ntohs(sa.sin_port)};
    acceptor_ = std::thread([this] { accept_loop(); });
    worker_ = std::thread([this] { work_loop(); });
  }

  ~TcpListener() { stop(); }
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  const TcpAddress& address() const noexcept { return address_; }

  void stop() {
    if (stopping_.exchange(true)) return;
    cv_.notify_all();
    if (acceptor_.joinable()) acceptor_.join();
    if (worker_.joinable()) worker_.join();
    fd_.reset();
  }

  std::size_t rejected() const noexcept { return rejected_; }

 private:
  void accept_loop() {
    while (!stopping_) {
      pollfd p{fd_.get(), POLLIN, 0};
      if (::poll(&p, 1, 50) <= 0) continue;
      detail::Fd client(::accept4(fd_.get(), nullptr, nullptr, SOCK_CLOEXEC));
      if (client.get() < 0) continue;
      std::string data;
      char buf[65536];
      bool ok = true;
      while (true) {
        pollfd cp{client.get(), POLLIN, 0};
        if (::poll(&cp, 1, 5000) <= 0) {
          ok = false;
          break;
        }
        const ssize_t n = ::recv(client.get(), buf, sizeof buf, 0);
        if (n < 0 && errno == EINTR) continue;
        if (n < 0) {
          ok = false;
          break;
        }
        if (n == 0) break;
        data.append(buf, static_cast<std::size_t>(n));
        if (data.size() > kMaxMessageBytes) {
          ok = false;
          break;
        }
      }
      if (!ok || data.empty()) {
        ++rejected_;
        continue;
      }
      {
        std::lock_guard lock(mutex_);
        inbox_.push_back(std::move(data));
      }
      cv_.notify_one();
    }
  }

  void work_loop() {
    while (true) {
      std::string msg;
      {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return stopping_ || !inbox_.empty(); });
        if (inbox_.empty()) return;
        msg = std::move(inbox_.front());
        inbox_.pop_front();
      }
      handler_(std::move(msg));
    }
  }

  Handler handler_;
  detail::Fd fd_;
  TcpAddress address_;
  std::atomic<bool> stopping_{false};
  std::atomic<std::size_t> rejected_{0};
  std::thread acceptor_, worker_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<std::string> inbox_;
};

/// An engine reachable over TCP. `peers` maps hosts to engine addresses.
class TcpEngineNode {
 public:
  TcpEngineNode(std::shared_ptr<Engine> engine, const std::string& ip, int port,
                std::map<std::string, std::string> peers = {})
      : engine_(std::move(engine)), peers_(std::move(peers)) {
    engine_->set_directory([this](const std::string& host) {
      std::lock_guard lock(peers_mutex_);
      return peers_.count(host) != 0;
    });
    listener_ = std::make_unique<TcpListener>(ip, port, [this](std::string wire) { on_message(wire); });
  }

  std::string address() const { return listener_->address().str(); }
  Engine& engine() noexcept { return *engine_; }

  void set_peer(const std::string& host, const std::string& address) {
    std::lock_guard lock(peers_mutex_);
    peers_[host] = address;
  }

  void stop() { listener_->stop(); }

 private:
  std::optional<std::string> peer(const std::string& host) {
    std::lock_guard lock(peers_mutex_);
    auto it = peers_.find(host);
    if (it == peers_.end()) return std::nullopt;
    return it->second;
  }

  void on_message(const std::string& wire) {
    DswgetMessage m;
    try {
      m = decode(wire);
    } catch (const ProtocolError&) {
      return;
    }
    auto out = engine_->handle(m);
    // Delegations first: a failed one is reported as unreachable instead.
    std::vector<std::pair<std::string, std::string>> failed;  // (delegation id, host)
    for (auto& env : out) {
      if (env.to_client) continue;
      const auto address = peer(env.to);
      if (!address || !send_message(*address, encode(env.message))) failed.emplace_back(env.message.delegation, env.to);
    }
    for (auto& env : out) {
      if (!env.to_client) continue;
      if (env.message.kind == MessageKind::progress) {
        auto& spawned = env.message.spawned;
        for (const auto& [id, host] : failed) {
          spawned.erase(std::remove_if(spawned.begin(), spawned.end(), [&](const auto& p) { return p.first == id; }),
                        spawned.end());
          env.message.unreachable.push_back(host);
        }
      }
      send_message(env.to, encode(env.message));
    }
  }

  std::shared_ptr<Engine> engine_;
  std::mutex peers_mutex_;
  std::map<std::string, std::string> peers_;
  std::unique_ptr<TcpListener> listener_;
};

/// Client side over TCP: listens on `ip` for replies, sends the initial
/// delegation to the seed's engine and waits for completion or `timeout`.
inline DistributedRun tcp_client_submit(const PathExpr& e, const Uri& seed,
                                        const std::map<std::string, std::string>& peers, const std::string& ip,
                                        std::chrono::milliseconds timeout) {
  const std::string host = authority(seed);
  auto it = peers.find(host);
  if (it == peers.end()) throw Error("no engine serves the seed host '" + host + "'");

  std::mutex mutex;
  std::condition_variable cv;
  static std::atomic<std::size_t> counter{0};
  const std::string request_id = "tcp-" + std::to_string(::getpid()) + "-" + std::to_string(++counter);
  ClientTracker tracker(request_id);
  TcpListener listener(ip, 0, [&](std::string wire) {
    try {
      const DswgetMessage m = decode(wire);
      std::lock_guard lock(mutex);
      tracker.receive(m);
    } catch (const ProtocolError&) {
      return;
    }
    cv.notify_all();
  });

  DistributedRun run;
  if (!send_message(it->second, encode(initial_delegate(request_id, listener.address().str(), e, seed)))) {
    run.errors.push_back("cannot reach engine for " + host + " at " + it->second);
    run.result.mark_partial("unreachable");
    return run;
  }
  {
    std::unique_lock lock(mutex);
    cv.wait_for(lock, timeout, [&] { return tracker.complete(); });
    run.complete = tracker.complete();
    run.result = tracker.result();
    run.errors = tracker.errors();
    run.unreachable = tracker.unreachable();
    run.engines = tracker.engines();
  }
  listener.stop();
  if (!run.complete) run.result.mark_partial("timeout");
  return run;
}

}  // namespace nautilod::dswget
