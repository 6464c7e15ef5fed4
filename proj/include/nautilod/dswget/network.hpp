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
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nautilod/dswget/engine.hpp"
#include "nautilod/dswget/message.hpp"
#include "nautilod/evaluator.hpp"
#include "nautilod/web.hpp"

namespace nautilod::dswget {

inline constexpr const char* kRootDelegation = "client#0";

/// Client-side bookkeeping for one request. The request is complete once
/// every delegation anybody reported spawning has been handled and every
/// RESULT announced by a PROGRESS has arrived. Works with any arrival order.
class ClientTracker {
 public:
  explicit ClientTracker(std::string request_id) : request_id_(std::move(request_id)) { known_.insert(kRootDelegation); }

  void receive(const DswgetMessage& m) {
    if (m.request_id != request_id_) return;
    if (m.kind == MessageKind::result) {
      received_.insert(m.delegation);
      for (const Term& t : m.results) result_.add(t);
      for (const auto& a : m.actions)
        if (fired_.emplace(a.occurrence, a.target).second) result_.actions.push_back(a);
      return;
    }
    if (m.kind != MessageKind::progress || !handled_.insert(m.delegation).second) return;
    engines_.insert(m.engine);
    states_[m.engine].insert(m.states.begin(), m.states.end());
    if (m.result_sent) expected_.insert(m.delegation);
    for (const auto& [id, host] : m.spawned) known_.insert(id);
    for (const auto& host : m.unreachable) unreachable_.insert(host);
    if (!m.ok) errors_.push_back(m.engine + ": " + m.error);
  }

  bool complete() const {
    return std::includes(handled_.begin(), handled_.end(), known_.begin(), known_.end()) &&
           std::includes(received_.begin(), received_.end(), expected_.begin(), expected_.end());
  }

  const std::string& request_id() const noexcept { return request_id_; }
  const NavResult& result() const noexcept { return result_; }
  NavResult& result() noexcept { return result_; }
  const std::set<std::string>& engines() const noexcept { return engines_; }
  const std::map<std::string, std::set<State>>& states() const noexcept { return states_; }
  const std::set<std::string>& unreachable() const noexcept { return unreachable_; }
  const std::vector<std::string>& errors() const noexcept { return errors_; }
  std::size_t delegations() const noexcept { return known_.size(); }

 private:
  std::string request_id_;
  std::set<std::string> known_, handled_, expected_, received_;
  std::set<std::string> engines_, unreachable_;
  std::map<std::string, std::set<State>> states_;
  std::set<std::pair<std::size_t, Uri>> fired_;
  std::vector<std::string> errors_;
  NavResult result_;
};

inline DswgetMessage initial_delegate(const std::string& request_id, const std::string& client_id,
                                      const PathExpr& e, const Uri& seed) {
  DswgetMessage m;
  m.kind = MessageKind::delegate;
  m.request_id = request_id;
  m.client_id = client_id;
  m.expression = pretty_print(e);
  m.delegation = kRootDelegation;
  m.pairs.emplace_back(seed, NavAutomaton(e).initial());
  return m;
}

struct NetworkStats {
  std::map<MessageKind, std::size_t> messages;
  std::size_t wire_bytes = 0;
  std::size_t max_pairs_per_delegate = 0;
  // Largest number of DELEGATEs one handle call sent to a single host.
  std::size_t max_delegates_per_host_per_wave = 0;
  // DELEGATEs still queued at completion that carry a pair their engine
  // has not visited. Anything but 0 means completion was declared early.
  std::size_t delegates_pending_at_completion = 0;
  std::vector<DswgetMessage> delegates;  // every DELEGATE sent, in order
};

struct DistributedRun {
  NavResult result;
  bool complete = false;
  std::vector<std::string> errors;
  std::set<std::string> unreachable;
  std::set<std::string> engines;
};

/// In-process message bus. Every message goes through encode/decode, so the
/// wire format is exercised too. Delivery is FIFO unless `shuffle` is set,
/// and `duplicate` delivers every message twice.
class SimulatedNetwork {
 public:
  struct Options {
    bool shuffle = false;
    std::uint64_t seed = 0;
    bool duplicate = false;
    std::size_t max_deliveries = 1'000'000;
  };

  SimulatedNetwork() = default;
  explicit SimulatedNetwork(Options options) : options_(options), rng_(options.seed) {}

  // Registers an engine for all of its hosts.
  std::shared_ptr<Engine> add_engine(std::shared_ptr<Engine> engine) {
    for (const auto& h : engine->hosts())
      if (!by_host_.emplace(h, engine).second) throw Error("host " + h + " already has an engine");
    engine->set_directory([this](const std::string& h) { return by_host_.count(h) != 0; });
    engines_.push_back(engine);
    return engine;
  }

  bool has_engine(const std::string& host) const { return by_host_.count(host) != 0; }
  const std::vector<std::shared_ptr<Engine>>& engines() const noexcept { return engines_; }
  const NetworkStats& stats() const noexcept { return stats_; }

  /// Submits `e` from `seed` and delivers messages until the tracker
  /// declares completion (or nothing is left to deliver).
  DistributedRun submit(const PathExpr& e, const Uri& seed, const std::string& client_id = "client") {
    const std::string host = authority(seed);
    if (!has_engine(host)) throw Error("no engine serves the seed host '" + host + "'");
    const std::string request_id = "req-" + std::to_string(++requests_);
    ClientTracker tracker(request_id);
    queue_.clear();
    post({false, host, initial_delegate(request_id, client_id, e, seed)});

    std::size_t deliveries = 0;
    while (!queue_.empty() && !tracker.complete() && deliveries++ < options_.max_deliveries) {
      std::size_t index = 0;
      if (options_.shuffle) index = std::uniform_int_distribution<std::size_t>(0, queue_.size() - 1)(rng_);
      Pending next = std::move(queue_[index]);
      queue_.erase(queue_.begin() + static_cast<std::ptrdiff_t>(index));
      const DswgetMessage m = decode(next.wire);
      if (next.to_client) {
        tracker.receive(m);
        continue;
      }
      auto it = by_host_.find(next.to);
      if (it == by_host_.end()) continue;
      std::map<std::string, std::size_t> per_host;
      for (auto& env : it->second->handle(m)) {
        if (!env.to_client) ++per_host[env.to];
        post(std::move(env));
      }
      for (const auto& [h, n] : per_host)
        stats_.max_delegates_per_host_per_wave = std::max(stats_.max_delegates_per_host_per_wave, n);
    }
    stats_.delegates_pending_at_completion = 0;
    for (const Pending& p : queue_) {
      if (p.to_client) continue;
      const DswgetMessage m = decode(p.wire);
      auto it = by_host_.find(p.to);
      if (it == by_host_.end()) continue;
      for (const auto& pair : m.pairs)
        if (!it->second->has_visited(request_id, pair)) {
          ++stats_.delegates_pending_at_completion;
          break;
        }
    }

    DistributedRun run;
    run.complete = tracker.complete();
    run.result = std::move(tracker.result());
    if (!run.complete) run.result.mark_partial("incomplete");
    run.errors = tracker.errors();
    run.unreachable = tracker.unreachable();
    run.engines = tracker.engines();
    return run;
  }

 private:
  struct Pending {
    bool to_client;
    std::string to;
    std::string wire;
  };

  void post(Envelope env) {
    std::string wire = encode(env.message);
    ++stats_.messages[env.message.kind];
    stats_.wire_bytes += wire.size();
    if (env.message.kind == MessageKind::delegate) {
      stats_.max_pairs_per_delegate = std::max(stats_.max_pairs_per_delegate, env.message.pairs.size());
      stats_.delegates.push_back(env.message);
    }
    if (options_.duplicate) queue_.push_back({env.to_client, env.to, wire});
    queue_.push_back({env.to_client, std::move(env.to), std::move(wire)});
  }

  Options options_;
  std::mt19937_64 rng_{0};
  std::map<std::string, std::shared_ptr<Engine>> by_host_;
  std::vector<std::shared_ptr<Engine>> engines_;
  std::deque<Pending> queue_;
  NetworkStats stats_;
  std::size_t requests_ = 0;
};

inline DistributedRun client_submit(const PathExpr& e, const Uri& seed, SimulatedNetwork& network) {
  return network.submit(e, seed);
}

/// Splits a fixture web by URI host: one store per host.
inline std::map<std::string, std::shared_ptr<FixtureWeb>> partition_by_host(FixtureWeb& web) {
  std::map<std::string, std::shared_ptr<FixtureWeb>> out;
  for (const Uri& u : web.uris()) {
    auto& store = out[authority(u)];
    if (!store) store = std::make_shared<FixtureWeb>();
    store->add(u, resolve(web, u)->triples());
  }
  return out;
}

/// Reads `host=manifest` lines (paths relative to the config file) and
/// builds one engine per line.
inline void load_engines(SimulatedNetwork& network, const std::filesystem::path& config,
                         const ActionRegistry* registry = nullptr, const PrefixMap& prefixes = default_prefixes()) {
  std::ifstream in(config);
  if (!in) throw FixtureError("cannot open engine config " + config.string());
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=', first);
    if (eq == std::string::npos)
      throw FixtureError(config.string() + ":" + std::to_string(number) + ": expected host=manifest");
    std::string host = line.substr(first, eq - first);
    host.erase(host.find_last_not_of(" \t") + 1);
    std::string path = line.substr(eq + 1);
    path.erase(0, path.find_first_not_of(" \t"));
    path.erase(path.find_last_not_of(" \t") + 1);
    auto store = load_fixture_web(config.parent_path() / path);
    network.add_engine(std::make_shared<Engine>(host, std::set<std::string>{host}, store, registry,
                                                std::function<bool(const std::string&)>{}, prefixes));
  }
}

}  // namespace nautilod::dswget
