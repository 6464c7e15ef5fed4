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

// Navigation automaton. A Thompson-style epsilon-NFA is built from the
// expression and its epsilon transitions are eliminated straight away, so
// the exposed automaton only has predicate, wildcard, test and action labels.

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "nautilod/error.hpp"
#include "nautilod/expr.hpp"
#include "nautilod/rdf.hpp"

namespace nautilod {

using State = std::size_t;

enum class Direction { forward, inverse };

/// A predicate label as returned by next_p. An empty `predicate` is the
/// wildcard, which is always forward.
struct NavLabel {
  std::optional<Uri> predicate;
  Direction direction = Direction::forward;

  bool is_wildcard() const noexcept { return !predicate; }
  friend bool operator==(const NavLabel&, const NavLabel&) = default;
  friend auto operator<=>(const NavLabel&, const NavLabel&) = default;
};

enum class LabelKind { pred, wildcard, test, action, epsilon };

struct Label {
  LabelKind kind = LabelKind::epsilon;
  std::optional<Uri> predicate;
  Direction direction = Direction::forward;
  std::shared_ptr<const TestSpec> test;
  std::shared_ptr<const ActionSpec> action;
  std::size_t occurrence = 0;  // tests and actions: pre-order index in the expression

  NavLabel nav() const { return {predicate, direction}; }
};

struct Transition {
  State from;
  Label label;
  State to;
};

/// The epsilon-NFA before elimination; kept for size checks and debugging.
struct ThompsonNfa {
  std::size_t states = 0;
  State initial = 0;
  State final = 0;
  std::vector<Transition> transitions;

  std::size_t epsilon_count() const {
    return static_cast<std::size_t>(std::count_if(transitions.begin(), transitions.end(),
                                                  [](const Transition& t) { return t.label.kind == LabelKind::epsilon; }));
  }
};

namespace detail {

class ThompsonBuilder {
 public:
  explicit ThompsonBuilder(const PathExpr& e) {
    preorder(e, [this](const PathNode& n) {
      if (n.kind == ExprKind::test || n.kind == ExprKind::action) occurrence_.emplace(&n, occurrence_.size());
    });
    const auto [s, f] = build(e);
    nfa_.initial = s;
    nfa_.final = f;
  }

  ThompsonNfa take() { return std::move(nfa_); }

 private:
  struct Fragment {
    State start, end;
  };

  State fresh() { return nfa_.states++; }
  void edge(State from, Label label, State to) { nfa_.transitions.push_back({from, std::move(label), to}); }
  void eps(State from, State to) { edge(from, Label{}, to); }

  Fragment atom(Label label) {
    const State s = fresh(), f = fresh();
    edge(s, std::move(label), f);
    return {s, f};
  }

  Fragment build(const PathExpr& e) {
    switch (e->kind) {
      case ExprKind::pred: return atom(Label{LabelKind::pred, e->uri, Direction::forward, {}, {}, 0});
      case ExprKind::inverse_pred: return atom(Label{LabelKind::pred, e->uri, Direction::inverse, {}, {}, 0});
      case ExprKind::wildcard: return atom(Label{LabelKind::wildcard, {}, Direction::forward, {}, {}, 0});
      case ExprKind::action:
        return atom(Label{LabelKind::action, {}, Direction::forward, {}, e->action, occurrence_.at(e.get())});
      case ExprKind::test: {
        const Fragment inner = build(e->left);
        const State t = fresh();
        edge(inner.end, Label{LabelKind::test, {}, Direction::forward, e->test, {}, occurrence_.at(e.get())}, t);
        return {inner.start, t};
      }
      case ExprKind::concat: {
        const Fragment l = build(e->left);
        const Fragment r = build(e->right);
        eps(l.end, r.start);
        return {l.start, r.end};
      }
      case ExprKind::alt: {
        const State s = fresh();
        const Fragment l = build(e->left);
        const Fragment r = build(e->right);
        const State f = fresh();
        eps(s, l.start);
        eps(s, r.start);
        eps(l.end, f);
        eps(r.end, f);
        return {s, f};
      }
      case ExprKind::star:
      case ExprKind::optional:
      case ExprKind::plus: {
        const State s = fresh();
        const Fragment inner = build(e->left);
        const State f = fresh();
        eps(s, inner.start);
        eps(inner.end, f);
        if (e->kind != ExprKind::plus) eps(s, f);
        if (e->kind != ExprKind::optional) eps(inner.end, inner.start);
        return {s, f};
      }
    }
    throw AutomatonError("unknown expression node");
  }

  ThompsonNfa nfa_;
  std::unordered_map<const PathNode*, std::size_t> occurrence_;
};

}  // namespace detail

inline ThompsonNfa build_thompson(const PathExpr& e) { return detail::ThompsonBuilder(e).take(); }

/// Epsilon-free navigation automaton with dense state ids; the initial
/// state is 0. Immutable once built.
class NavAutomaton {
 public:
  explicit NavAutomaton(const ThompsonNfa& nfa) : thompson_states_(nfa.states) {
    std::vector<std::vector<const Transition*>> out(nfa.states);
    for (const auto& t : nfa.transitions) out[t.from].push_back(&t);

    // Kept states: the initial one plus every target of a labelled edge.
    std::set<State> kept{nfa.initial};
    for (const auto& t : nfa.transitions)
      if (t.label.kind != LabelKind::epsilon) kept.insert(t.to);
    std::map<State, State> rename;
    rename[nfa.initial] = 0;
    for (State q : kept)
      if (q != nfa.initial) rename.emplace(q, rename.size());
    original_.resize(rename.size());
    for (const auto& [old_id, new_id] : rename) original_[new_id] = old_id;

    out_.resize(rename.size());
    final_.assign(rename.size(), false);
    for (const auto& [old_id, new_id] : rename) {
      std::vector<State> stack{old_id};
      std::set<State> closure{old_id};
      while (!stack.empty()) {
        const State q = stack.back();
        stack.pop_back();
        for (const Transition* t : out[q]) {
          if (t->label.kind == LabelKind::epsilon && closure.insert(t->to).second) stack.push_back(t->to);
        }
      }
      if (closure.count(nfa.final)) final_[new_id] = true;
      for (State q : closure)
        for (const Transition* t : out[q])
          if (t->label.kind != LabelKind::epsilon) {
            out_[new_id].push_back(transitions_.size());
            transitions_.push_back({new_id, t->label, rename.at(t->to)});
          }
    }
  }

  explicit NavAutomaton(const PathExpr& e) : NavAutomaton(build_thompson(e)) {}

  State initial() const noexcept { return 0; }
  std::size_t state_count() const noexcept { return out_.size(); }
  std::size_t thompson_state_count() const noexcept { return thompson_states_; }
  const std::vector<Transition>& transitions() const noexcept { return transitions_; }
  // Thompson id a state was derived from; useful in DOT output and tests.
  State origin(State q) const { return original_.at(check(q)); }

  bool is_final(State q) const { return final_[check(q)]; }

  std::vector<State> finals() const {
    std::vector<State> out;
    for (State q = 0; q < final_.size(); ++q)
      if (final_[q]) out.push_back(q);
    return out;
  }

  /// Predicate and wildcard labels leaving q, sorted and unique.
  std::vector<NavLabel> next_p(State q) const {
    std::set<NavLabel> labels;
    for (std::size_t i : out_[check(q)]) {
      const Label& l = transitions_[i].label;
      if (l.kind == LabelKind::pred || l.kind == LabelKind::wildcard) labels.insert(l.nav());
    }
    return {labels.begin(), labels.end()};
  }

  /// Targets reached from q over `label`. The automaton is not
  /// deterministic, so there may be several.
  std::vector<State> next_state(State q, const NavLabel& label) const {
    std::set<State> targets;
    for (std::size_t i : out_[check(q)]) {
      const Label& l = transitions_[i].label;
      if ((l.kind == LabelKind::pred || l.kind == LabelKind::wildcard) && l.nav() == label)
        targets.insert(transitions_[i].to);
    }
    if (targets.empty()) throw AutomatonError("no transition on the given label from state " + std::to_string(q));
    return {targets.begin(), targets.end()};
  }

  /// Test transitions leaving q.
  std::vector<const Transition*> tests(State q) const { return of_kind(q, LabelKind::test); }
  /// Action transitions leaving q.
  std::vector<const Transition*> actions(State q) const { return of_kind(q, LabelKind::action); }

  std::optional<TestSpec> get_test(State q) const {
    const auto t = tests(q);
    if (t.empty()) return std::nullopt;
    return *t.front()->label.test;
  }

  std::optional<ActionSpec> get_action(State q) const {
    const auto a = actions(q);
    if (a.empty()) return std::nullopt;
    return *a.front()->label.action;
  }

  /// Word acceptance over concrete (predicate, direction) symbols. Tests and
  /// actions are crossed without consuming input.
  bool accepts(const std::vector<NavLabel>& word) const {
    std::set<State> current = free_closure({initial()});
    for (const NavLabel& symbol : word) {
      std::set<State> next;
      for (State q : current)
        for (std::size_t i : out_[q]) {
          const Label& l = transitions_[i].label;
          const bool match = (l.kind == LabelKind::pred && l.nav() == symbol) ||
                             (l.kind == LabelKind::wildcard && symbol.direction == Direction::forward);
          if (match) next.insert(transitions_[i].to);
        }
      current = free_closure(std::move(next));
      if (current.empty()) return false;
    }
    return std::any_of(current.begin(), current.end(), [this](State q) { return final_[q]; });
  }

 private:
  State check(State q) const {
    if (q >= out_.size()) throw AutomatonError("unknown state " + std::to_string(q));
    return q;
  }

  std::vector<const Transition*> of_kind(State q, LabelKind kind) const {
    std::vector<const Transition*> out;
    for (std::size_t i : out_[check(q)])
      if (transitions_[i].label.kind == kind) out.push_back(&transitions_[i]);
    return out;
  }

  std::set<State> free_closure(std::set<State> states) const {
    std::vector<State> stack(states.begin(), states.end());
    while (!stack.empty()) {
      const State q = stack.back();
      stack.pop_back();
      for (std::size_t i : out_[q]) {
        const auto kind = transitions_[i].label.kind;
        if ((kind == LabelKind::test || kind == LabelKind::action) && states.insert(transitions_[i].to).second)
          stack.push_back(transitions_[i].to);
      }
    }
    return states;
  }

  std::size_t thompson_states_;
  std::vector<Transition> transitions_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<bool> final_;
  std::vector<State> original_;
};

inline NavAutomaton build_automaton(const PathExpr& e) { return NavAutomaton(e); }

inline std::string label_text(const Label& l) {
  switch (l.kind) {
    case LabelKind::pred: return (l.direction == Direction::inverse ? "^" : "") + to_ntriples(*l.predicate);
    case LabelKind::wildcard: return "<_>";
    case LabelKind::test: return "[" + pretty_print(l.test->query) + "]";
    case LabelKind::action: return "{" + l.action->procedure + "}";
    case LabelKind::epsilon: return "eps";
  }
  return "?";
}

/// Graphviz rendering of the automaton.
inline std::string to_dot(const NavAutomaton& a) {
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  };
  std::ostringstream os;
  os << "digraph nav {\n  rankdir=LR;\n  start [shape=point];\n";
  for (State q = 0; q < a.state_count(); ++q)
    os << "  q" << q << " [shape=" << (a.is_final(q) ? "doublecircle" : "circle") << "];\n";
  os << "  start -> q" << a.initial() << ";\n";
  for (const auto& t : a.transitions())
    os << "  q" << t.from << " -> q" << t.to << " [label=" << quote(label_text(t.label)) << "];\n";
  os << "}\n";
  return os.str();
}

}  // namespace nautilod
