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
#include <chrono>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "nautilod/actions.hpp"
#include "nautilod/automaton.hpp"
#include "nautilod/expr.hpp"
#include "nautilod/query.hpp"
#include "nautilod/rdf.hpp"
#include "nautilod/web.hpp"

namespace nautilod {

using Millis = std::chrono::milliseconds;
using Nanos = std::chrono::nanoseconds;

inline constexpr std::size_t kBytesPerMegabyte = 1024 * 1024;

/// Controls on a navigation run. Unset fields impose no limit.
struct NetworkParams {
  std::optional<std::size_t> max_der_triples;
  bool save_graph = false;
  std::optional<std::size_t> max_size_mb;
  std::optional<Millis> timeout_der;
  std::optional<Millis> timeout;
  std::optional<std::vector<std::string>> domains;

  void validate() const {
    if (max_size_mb && *max_size_mb == 0) throw Error("maxSize must be positive");
    if (timeout_der && timeout_der->count() <= 0) throw Error("timeoutDer must be positive");
    if (timeout && timeout->count() <= 0) throw Error("timeout must be positive");
    if (domains && domains->empty()) throw Error("domains must list at least one host");
  }

  bool host_allowed(const std::string& host) const {
    if (!domains) return true;
    return std::any_of(domains->begin(), domains->end(), [&](const std::string& d) {
      return host == d || (host.size() > d.size() && host.compare(host.size() - d.size(), d.size(), d) == 0 &&
                           host[host.size() - d.size() - 1] == '.');
    });
  }
};

struct RunMetrics {
  Nanos elapsed{0};
  std::size_t uris_dereferenced = 0;
  std::size_t dereference_attempts = 0;
  std::size_t triples_retrieved = 0;
  std::size_t bytes = 0;
  std::size_t pairs_processed = 0;
  std::size_t skipped_by_policy = 0;
  Nanos time_navigation{0};
  Nanos time_tests{0};
  Nanos time_actions{0};
};

struct NavResult {
  std::set<Uri> uris;
  std::set<Literal> literals;
  std::vector<ActionRecord> actions;
  bool partial = false;
  std::set<std::string> limits_hit;

  std::set<Term> terms() const {
    std::set<Term> out(uris.begin(), uris.end());
    out.insert(literals.begin(), literals.end());
    return out;
  }

  void add(const Term& t) {
    if (const Uri* u = as_uri(t)) uris.insert(*u);
    else literals.insert(*as_literal(t));
  }

  void mark_partial(const std::string& reason) {
    partial = true;
    limits_hit.insert(reason);
  }

  /// (procedure, target) pairs, the action part of the semantics.
  std::set<std::pair<std::string, Uri>> action_set() const {
    std::set<std::pair<std::string, Uri>> out;
    for (const auto& a : actions) out.emplace(a.procedure, a.target);
    return out;
  }
};

// ---------------------------------------------------------------------------
// check_net
// ---------------------------------------------------------------------------

/// Running totals fed to check_net. The optional fields describe a single
/// candidate dereference.
struct NetTotals {
  Nanos elapsed{0};
  std::size_t bytes = 0;
  std::optional<std::string> candidate_host;
  std::optional<std::size_t> der_triples;
  std::optional<Nanos> der_elapsed;
};

enum class NetVerdict { pass, skip, stop };

struct NetCheck {
  NetVerdict verdict = NetVerdict::pass;
  std::string reason;
  bool passed() const noexcept { return verdict == NetVerdict::pass; }
};

inline NetCheck check_net(const NetworkParams& p, const NetTotals& t) {
  if (p.timeout && t.elapsed > *p.timeout) return {NetVerdict::stop, "timeout"};
  if (p.max_size_mb && t.bytes > *p.max_size_mb * kBytesPerMegabyte) return {NetVerdict::stop, "maxSize"};
  if (t.candidate_host && !p.host_allowed(*t.candidate_host)) return {NetVerdict::skip, "domains"};
  if (p.max_der_triples && t.der_triples && *t.der_triples > *p.max_der_triples)
    return {NetVerdict::skip, "maxDerTriples"};
  if (p.timeout_der && t.der_elapsed && *t.der_elapsed > *p.timeout_der) return {NetVerdict::skip, "timeoutDer"};
  return {};
}

inline FetchLimits fetch_limits(const NetworkParams& p) { return {p.max_der_triples, p.timeout_der}; }

// ---------------------------------------------------------------------------
// navigate and pair expansion
// ---------------------------------------------------------------------------

using LookupPair = std::pair<Uri, State>;

struct LookupPairHash {
  std::size_t operator()(const LookupPair& p) const noexcept {
    return std::hash<Uri>{}(p.first) * 31 + std::hash<State>{}(p.second);
  }
};

/// Follows every predicate transition out of `p.second` over `desc`.
/// Forward labels match <uri, pred, x>, inverse labels <x, pred, uri>, the
/// wildcard any <uri, _, x>. Literals only come out of forward matches.
inline std::vector<std::pair<Term, State>> navigate(const LookupPair& p, const NavAutomaton& a,
                                                    const Description& desc) {
  std::vector<std::pair<Term, State>> out;
  const Term self{p.first};
  for (const NavLabel& label : a.next_p(p.second)) {
    const auto targets = a.next_state(p.second, label);
    std::vector<const Triple*> matches;
    if (label.is_wildcard()) matches = desc.match(&p.first, nullptr, nullptr);
    else if (label.direction == Direction::forward) matches = desc.match(&p.first, &*label.predicate, nullptr);
    else matches = desc.match(nullptr, &*label.predicate, &self);
    for (const Triple* t : matches) {
      const Term reached = label.direction == Direction::inverse ? Term(t->subject) : t->object;
      for (State s : targets) out.emplace_back(reached, s);
    }
  }
  return out;
}

// True when a pair in this state could use the URI's description.
inline bool needs_description(const NavAutomaton& a, State q) {
  return !a.next_p(q).empty() || !a.tests(q).empty() || !a.actions(q).empty();
}

namespace detail {

template <typename Clock = std::chrono::steady_clock>
struct Stopwatch {
  typename Clock::time_point start = Clock::now();
  Nanos lap() const { return std::chrono::duration_cast<Nanos>(Clock::now() - start); }
};

/// One evaluation step for a pair whose description is known: crosses
/// passing tests, fires actions (through `fire`, which deduplicates), and
/// navigates predicates. Successors are appended to `out`.
template <typename Fire>
void expand_pair(const NavAutomaton& a, const LookupPair& p, const Description& d, RunMetrics& m,
                 std::vector<std::pair<Term, State>>& out, Fire&& fire, QueryDiagnostics* diagnostics = nullptr) {
  for (const Transition* t : a.tests(p.second)) {
    Stopwatch sw;
    const bool pass = eval_ask(t->label.test->query, d, diagnostics);
    m.time_tests += sw.lap();
    if (pass) out.emplace_back(p.first, t->to);
  }
  for (const Transition* t : a.actions(p.second)) {
    Stopwatch sw;
    fire(*t, d);
    m.time_actions += sw.lap();
    out.emplace_back(p.first, t->to);
  }
  Stopwatch sw;
  auto next = navigate(p, a, d);
  m.time_navigation += sw.lap();
  out.insert(out.end(), std::make_move_iterator(next.begin()), std::make_move_iterator(next.end()));
}

}  // namespace detail

/// Runs one action occurrence on `target` with parameters selected from `d`.
inline ActionRecord run_action(const ActionRegistry* registry, const Transition& t, const Uri& target,
                               const Description& d, WebInstance* web = nullptr, GraphStore* store = nullptr) {
  auto params = eval_select(t.label.action->params, d);
  if (!registry) return ActionRecord{t.label.action->procedure, t.label.occurrence, target, std::move(params)};
  return registry->invoke(t.label.occurrence, *t.label.action, target, std::move(params), web, store);
}

// ---------------------------------------------------------------------------
// Production engine
// ---------------------------------------------------------------------------

inline std::filesystem::path default_graph_dir() {
  if (const char* v = std::getenv("SWGET_GRAPH_DIR")) return v;
  return "swget-graph";
}

struct EngineOptions {
  // Concurrent dereferences of queued URIs; 1 keeps everything on the caller's thread.
  std::size_t workers = 1;
  // Where -saveGraph and getGraph persist descriptions; defaults to default_graph_dir().
  std::shared_ptr<GraphStore> store;
  std::function<void(const FetchRecord&)> on_fetch;
  QueryDiagnostics* diagnostics = nullptr;
};

struct EngineRun {
  NavResult result;
  RunMetrics metrics;
  std::vector<FetchRecord> fetches;
};

namespace detail {

class Engine {
 public:
  Engine(const PathExpr& e, WebInstance& web, const NetworkParams& params, const ActionRegistry* registry,
         EngineOptions options)
      : automaton_(e), web_(web), params_(params), registry_(registry), options_(std::move(options)) {
    params_.validate();
    if (registry_) registry_->validate(e);
    if (params_.save_graph && !options_.store) options_.store = std::make_shared<GraphStore>(default_graph_dir());
  }

  EngineRun run(const Uri& seed) {
    Stopwatch clock;
    std::deque<LookupPair> queue{{seed, automaton_.initial()}};
    std::unordered_set<LookupPair, LookupPairHash> visited;
    std::set<std::pair<std::size_t, Uri>> fired;
    std::vector<std::pair<Term, State>> successors;

    while (!queue.empty()) {
      const NetCheck net = check_net(params_, NetTotals{clock.lap(), run_.metrics.bytes});
      if (net.verdict == NetVerdict::stop) {
        run_.result.mark_partial(net.reason);
        break;
      }
      if (options_.workers > 1) prefetch(queue);
      LookupPair p = std::move(queue.front());
      queue.pop_front();
      if (!visited.insert(p).second) continue;
      ++run_.metrics.pairs_processed;
      if (automaton_.is_final(p.second)) run_.result.uris.insert(p.first);
      if (!needs_description(automaton_, p.second)) continue;

      auto d = description(p.first);
      if (!d) continue;

      successors.clear();
      expand_pair(
          automaton_, p, *d, run_.metrics, successors,
          [&](const Transition& t, const Description& desc) {
            if (!fired.emplace(t.label.occurrence, p.first).second) return;
            run_.result.actions.push_back(run_action(registry_, t, p.first, desc, &web_, options_.store.get()));
          },
          options_.diagnostics);
      for (auto& [term, state] : successors) {
        if (const Uri* u = as_uri(term)) {
          queue.emplace_back(*u, state);
        } else if (automaton_.is_final(state)) {
          run_.result.literals.insert(*as_literal(term));
        }
      }
    }
    run_.metrics.elapsed = clock.lap();
    return std::move(run_);
  }

 private:
  struct Entry {
    FetchResult fetch;
    bool accounted = false;
  };

  // nullptr when the URI is excluded by policy or its fetch was rejected.
  std::shared_ptr<const Description> description(const Uri& u) {
    if (params_.domains) {
      std::optional<std::string> host;
      try {
        host = host_of(u);
      } catch (const UriError&) {
        host = "";
      }
      if (check_net(params_, NetTotals{{}, 0, host}).verdict == NetVerdict::skip) {
        if (skipped_.insert(u).second) {
          ++run_.metrics.skipped_by_policy;
          FetchRecord record{u, FetchStatus::skipped_by_policy, 0, "domains"};
          run_.fetches.push_back(record);
          if (options_.on_fetch) options_.on_fetch(record);
        }
        return nullptr;
      }
    }
    Entry& entry = fetch(u);
    const FetchRecord& r = entry.fetch.record;
    if (!entry.accounted) {
      entry.accounted = true;
      ++run_.metrics.dereference_attempts;
      run_.metrics.time_navigation += r.elapsed;
      run_.metrics.bytes += r.bytes;
      run_.metrics.triples_retrieved += r.triples;
      if (r.status == FetchStatus::ok && !entry.fetch.description->empty()) ++run_.metrics.uris_dereferenced;
      if (r.status == FetchStatus::skipped_by_policy || r.status == FetchStatus::timeout) {
        ++run_.metrics.skipped_by_policy;
        run_.result.mark_partial(r.status == FetchStatus::timeout ? "timeoutDer" : r.reason);
      }
      if (params_.save_graph && r.status == FetchStatus::ok && !entry.fetch.description->empty())
        options_.store->save(*entry.fetch.description);
      run_.fetches.push_back(r);
      if (options_.on_fetch) options_.on_fetch(r);
    }
    if (r.status == FetchStatus::skipped_by_policy || r.status == FetchStatus::timeout) return nullptr;
    // A fetch that ran over timeoutDer but still returned is discarded too.
    if (check_net(params_, NetTotals{{}, 0, std::nullopt, std::nullopt, r.elapsed}).verdict == NetVerdict::skip) {
      run_.result.mark_partial("timeoutDer");
      return nullptr;
    }
    return entry.fetch.description;
  }

  Entry& fetch(const Uri& u) {
    auto it = cache_.find(u);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(u, Entry{web_.fetch(u, fetch_limits(params_))}).first->second;
  }

  // Dereferences up to `workers` distinct queued URIs in parallel.
  void prefetch(const std::deque<LookupPair>& queue) {
    std::vector<Uri> batch;
    for (const auto& [u, q] : queue) {
      if (batch.size() >= options_.workers) break;
      if (cache_.count(u) || std::find(batch.begin(), batch.end(), u) != batch.end()) continue;
      if (!needs_description(automaton_, q)) continue;
      if (params_.domains) {
        try {
          if (!params_.host_allowed(host_of(u))) continue;
        } catch (const UriError&) {
          continue;
        }
      }
      batch.push_back(u);
    }
    if (batch.size() < 2) return;
    std::vector<std::future<FetchResult>> futures;
    for (const Uri& u : batch)
      futures.push_back(std::async(std::launch::async, [this, u] { return web_.fetch(u, fetch_limits(params_)); }));
    for (std::size_t i = 0; i < batch.size(); ++i) cache_.emplace(batch[i], Entry{futures[i].get()});
  }

  NavAutomaton automaton_;
  WebInstance& web_;
  NetworkParams params_;
  const ActionRegistry* registry_;
  EngineOptions options_;
  EngineRun run_;
  std::unordered_map<Uri, Entry> cache_;
  std::unordered_set<Uri> skipped_;
};

}  // namespace detail

/// Frontier-driven evaluation (breadth first) with network controls,
/// action execution and metrics. A run stopped by a limit returns what it
/// had so far with `partial` set.
inline EngineRun eval_engine(const PathExpr& e, const Uri& seed, WebInstance& web, const NetworkParams& params = {},
                             const ActionRegistry* actions = nullptr, EngineOptions options = {}) {
  return detail::Engine(e, web, params, actions, std::move(options)).run(seed);
}

// ---------------------------------------------------------------------------
// Reference evaluator
// ---------------------------------------------------------------------------

namespace detail {

class Reference {
 public:
  Reference(const PathExpr& e, WebInstance& web, const ActionRegistry* registry) : web_(web), registry_(registry) {
    preorder(e, [this](const PathNode& n) {
      if (n.kind == ExprKind::test || n.kind == ExprKind::action) occurrence_.emplace(&n, occurrence_.size());
    });
  }

  std::set<Term> eval(const PathExpr& e, const Term& t) {
    auto key = std::make_pair(e.get(), t);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::set<Term> out = compute(e, t);
    memo_.emplace(std::move(key), out);
    return out;
  }

  NavResult result;

 private:
  const Description& d(const Uri& u) {
    auto it = descriptions_.find(u);
    if (it == descriptions_.end()) it = descriptions_.emplace(u, resolve(web_, u)).first;
    return *it->second;
  }

  std::set<Term> compute(const PathExpr& e, const Term& t) {
    const Uri* u = as_uri(t);
    std::set<Term> out;
    switch (e->kind) {
      case ExprKind::pred:
        if (u)
          for (const Triple* tr : d(*u).match(u, &*e->uri, nullptr)) out.insert(tr->object);
        return out;
      case ExprKind::inverse_pred:
        if (u)
          for (const Triple* tr : d(*u).match(nullptr, &*e->uri, &t)) out.insert(tr->subject);
        return out;
      case ExprKind::wildcard:
        if (u)
          for (const Triple* tr : d(*u).match(u, nullptr, nullptr)) out.insert(tr->object);
        return out;
      case ExprKind::action:
        if (u) {
          const std::size_t occurrence = occurrence_.at(e.get());
          if (fired_.emplace(occurrence, *u).second) {
            auto params = eval_select(e->action->params, d(*u));
            if (registry_)
              result.actions.push_back(registry_->invoke(occurrence, *e->action, *u, std::move(params), &web_));
            else
              result.actions.push_back(ActionRecord{e->action->procedure, occurrence, *u, std::move(params)});
          }
          out.insert(t);
        }
        return out;
      case ExprKind::concat:
        for (const Term& x : eval(e->left, t)) {
          auto r = eval(e->right, x);
          out.insert(r.begin(), r.end());
        }
        return out;
      case ExprKind::alt: {
        out = eval(e->left, t);
        auto r = eval(e->right, t);
        out.insert(r.begin(), r.end());
        return out;
      }
      case ExprKind::optional:
        out = eval(e->left, t);
        out.insert(t);
        return out;
      case ExprKind::star: return closure(e->left, {t});
      case ExprKind::plus: return closure(e->left, eval(e->left, t));
      case ExprKind::test:
        for (const Term& x : eval(e->left, t))
          if (const Uri* xu = as_uri(x); xu && eval_ask(e->test->query, d(*xu))) out.insert(x);
        return out;
    }
    return out;
  }

  // Least fixpoint of seeds ∪ inner(result).
  std::set<Term> closure(const PathExpr& inner, std::set<Term> seeds) {
    std::set<Term> reached = seeds;
    std::vector<Term> frontier(seeds.begin(), seeds.end());
    while (!frontier.empty()) {
      const Term x = std::move(frontier.back());
      frontier.pop_back();
      for (const Term& y : eval(inner, x))
        if (reached.insert(y).second) frontier.push_back(y);
    }
    return reached;
  }

  WebInstance& web_;
  const ActionRegistry* registry_;
  std::map<std::pair<const PathNode*, Term>, std::set<Term>> memo_;
  std::unordered_map<Uri, std::shared_ptr<const Description>> descriptions_;
  std::unordered_map<const PathNode*, std::size_t> occurrence_;
  std::set<std::pair<std::size_t, Uri>> fired_;
};

}  // namespace detail

/// Direct recursive evaluation of the semantics, memoized per (node, term).
/// Single threaded and without network controls; used as the test oracle.
inline NavResult eval_reference(const PathExpr& e, const Uri& seed, WebInstance& web,
                                const ActionRegistry* actions = nullptr) {
  detail::Reference ref(e, web, actions);
  for (const Term& t : ref.eval(e, Term(seed))) ref.result.add(t);
  return std::move(ref.result);
}

}  // namespace nautilod
