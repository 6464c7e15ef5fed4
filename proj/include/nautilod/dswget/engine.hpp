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

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "nautilod/actions.hpp"
#include "nautilod/automaton.hpp"
#include "nautilod/dswget/message.hpp"
#include "nautilod/evaluator.hpp"
#include "nautilod/expr.hpp"
#include "nautilod/web.hpp"

namespace nautilod::dswget {

/// Where a message goes: another engine (by host) or back to the client.
struct Envelope {
  bool to_client = false;
  std::string to;  // host, or the client id
  DswgetMessage message;
};

/// Authority of a URI for routing purposes; empty when it has no host.
inline std::string authority(const Uri& u) {
  try {
    return host_of(u);
  } catch (const UriError&) {
    return {};
  }
}

struct EngineCounters {
  std::size_t messages_handled = 0;
  std::size_t duplicate_delegations = 0;
  std::size_t pairs_processed = 0;
  std::size_t pairs_reprocessed = 0;  // should stay 0: the visited set prevents it
  std::size_t delegates_sent = 0;
  std::size_t results_sent = 0;
};

/// One Dswget engine. It owns the URIs of its hosts and answers from its
/// local store without dereferencing anything over the network.
class Engine {
 public:
  // `has_engine(host)` tells whether some engine serves a host.
  Engine(std::string id, std::set<std::string> hosts, std::shared_ptr<WebInstance> store,
         const ActionRegistry* registry = nullptr, std::function<bool(const std::string&)> has_engine = {},
         PrefixMap prefixes = default_prefixes())
      : id_(std::move(id)),
        hosts_(std::move(hosts)),
        store_(std::move(store)),
        registry_(registry),
        has_engine_(std::move(has_engine)),
        prefixes_(std::move(prefixes)) {
    if (hosts_.empty()) hosts_.insert(id_);
  }

  const std::string& id() const noexcept { return id_; }
  const std::set<std::string>& hosts() const noexcept { return hosts_; }
  bool owns(const Uri& u) const { return hosts_.count(authority(u)) != 0; }
  void set_directory(std::function<bool(const std::string&)> has_engine) { has_engine_ = std::move(has_engine); }

  bool has_visited(const std::string& request_id, const LookupPair& p) const {
    std::lock_guard lock(mutex_);
    auto it = requests_.find(request_id);
    return it != requests_.end() && it->second.visited.count(p) != 0;
  }

  EngineCounters counters() const {
    std::lock_guard lock(mutex_);
    return counters_;
  }

  /// Handles one DELEGATE. Returns the RESULT (if anything was found),
  /// the DELEGATEs for foreign hosts, and a PROGRESS report to the client.
  std::vector<Envelope> handle(const DswgetMessage& msg) {
    std::lock_guard lock(mutex_);
    ++counters_.messages_handled;
    Request& req = requests_[msg.request_id];

    DswgetMessage progress = reply(msg, MessageKind::progress);
    if (msg.kind != MessageKind::delegate) return error(msg, std::move(progress), "engine only accepts DELEGATE");
    if (!req.handled.insert(msg.delegation).second) {
      ++counters_.duplicate_delegations;
      return {};
    }
    for (const auto& [u, q] : msg.pairs)
      if (!owns(u)) return error(msg, std::move(progress), "pair " + to_ntriples(u) + " is not owned by " + id_);

    const NavAutomaton* a = nullptr;
    try {
      a = &automaton(msg.expression);
    } catch (const std::exception& e) {
      return error(msg, std::move(progress), std::string("cannot build automaton: ") + e.what());
    }
    for (const auto& [u, q] : msg.pairs)
      if (q >= a->state_count()) return error(msg, std::move(progress), "unknown state " + std::to_string(q));

    DswgetMessage result = reply(msg, MessageKind::result);
    std::map<std::string, std::vector<std::pair<Uri, State>>> batches;
    std::set<std::string> unreachable;
    std::deque<LookupPair> local(msg.pairs.begin(), msg.pairs.end());
    std::vector<std::pair<Term, State>> successors;
    RunMetrics scratch;

    while (!local.empty()) {
      LookupPair p = std::move(local.front());
      local.pop_front();
      if (!req.visited.insert(p).second) continue;
      if (!processed_.insert({msg.request_id, p}).second) ++counters_.pairs_reprocessed;
      ++counters_.pairs_processed;
      progress.states.insert(p.second);
      if (a->is_final(p.second)) result.results.insert(Term(p.first));
      if (!needs_description(*a, p.second)) continue;

      const auto d = resolve(*store_, p.first);
      successors.clear();
      nautilod::detail::expand_pair(*a, p, *d, scratch, successors, [&](const Transition& t, const Description& desc) {
        if (req.fired.emplace(t.label.occurrence, p.first).second)
          result.actions.push_back(run_action(registry_, t, p.first, desc, store_.get()));
      });
      for (auto& [term, state] : successors) {
        const Uri* u = as_uri(term);
        if (!u) {
          if (a->is_final(state)) result.results.insert(term);
          continue;
        }
        if (owns(*u)) {
          local.emplace_back(*u, state);
          continue;
        }
        const std::string host = authority(*u);
        if (has_engine_ && !host.empty() && has_engine_(host)) {
          if (req.forwarded.insert({*u, state}).second) batches[host].emplace_back(*u, state);
        } else {
          // No engine can expand it: report it as reached.
          if (a->is_final(state)) result.results.insert(term);
          unreachable.insert(host.empty() ? u->str() : host);
        }
      }
    }

    std::vector<Envelope> out;
    if (!result.results.empty() || !result.actions.empty()) {
      progress.result_sent = true;
      ++counters_.results_sent;
      out.push_back({true, msg.client_id, std::move(result)});
    }
    for (auto& [host, pairs] : batches) {
      DswgetMessage d;
      d.kind = MessageKind::delegate;
      d.request_id = msg.request_id;
      d.client_id = msg.client_id;
      d.expression = msg.expression;
      d.delegation = id_ + "#" + std::to_string(++next_delegation_);
      d.pairs = std::move(pairs);
      progress.spawned.emplace_back(d.delegation, host);
      ++counters_.delegates_sent;
      out.push_back({false, host, std::move(d)});
    }
    progress.unreachable.assign(unreachable.begin(), unreachable.end());
    out.push_back({true, msg.client_id, std::move(progress)});
    return out;
  }

 private:
  struct Request {
    std::unordered_set<LookupPair, LookupPairHash> visited;
    std::unordered_set<LookupPair, LookupPairHash> forwarded;
    std::set<std::pair<std::size_t, Uri>> fired;
    std::set<std::string> handled;
  };

  DswgetMessage reply(const DswgetMessage& msg, MessageKind kind) const {
    DswgetMessage r;
    r.kind = kind;
    r.request_id = msg.request_id;
    r.client_id = msg.client_id;
    r.delegation = msg.delegation;
    r.engine = id_;
    return r;
  }

  std::vector<Envelope> error(const DswgetMessage& msg, DswgetMessage progress, std::string text) {
    progress.ok = false;
    progress.error = std::move(text);
    return {Envelope{true, msg.client_id, std::move(progress)}};
  }

  const NavAutomaton& automaton(const std::string& expression) {
    auto it = automata_.find(expression);
    if (it == automata_.end()) {
      const PathExpr e = parse(expression, prefixes_);
      if (registry_) registry_->validate(e);
      it = automata_.emplace(expression, NavAutomaton(e)).first;
    }
    return it->second;
  }

  struct ProcessedHash {
    std::size_t operator()(const std::pair<std::string, LookupPair>& k) const noexcept {
      return std::hash<std::string>{}(k.first) ^ (LookupPairHash{}(k.second) << 1);
    }
  };

  std::string id_;
  std::set<std::string> hosts_;
  std::shared_ptr<WebInstance> store_;
  const ActionRegistry* registry_;
  std::function<bool(const std::string&)> has_engine_;
  PrefixMap prefixes_;

  mutable std::mutex mutex_;
  std::unordered_map<std::string, Request> requests_;
  std::unordered_map<std::string, NavAutomaton> automata_;
  std::unordered_set<std::pair<std::string, LookupPair>, ProcessedHash> processed_;
  std::size_t next_delegation_ = 0;
  EngineCounters counters_;
};

}  // namespace nautilod::dswget
