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

#include <gtest/gtest.h>

#include <random>

#include "nautilod/automaton.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace nautilod;
using namespace nautilod::testing;

namespace {

const Uri kP("http://e/p"), kQ("http://e/q");
const NavLabel kFwdP{kP, Direction::forward}, kFwdQ{kQ, Direction::forward};
const NavLabel kInvP{kP, Direction::inverse}, kInvQ{kQ, Direction::inverse};
const NavLabel kAny{std::nullopt, Direction::forward};

std::size_t count_kind(const NavAutomaton& a, LabelKind kind) {
  std::size_t n = 0;
  for (const auto& t : a.transitions()) n += t.label.kind == kind;
  return n;
}

State only_state_with(const NavAutomaton& a, LabelKind kind) {
  std::optional<State> found;
  for (State q = 0; q < a.state_count(); ++q)
    if ((kind == LabelKind::test ? a.tests(q) : a.actions(q)).size()) {
      EXPECT_FALSE(found) << "more than one state carries the label";
      found = q;
    }
  EXPECT_TRUE(found);
  return found.value_or(0);
}

}  // namespace

TEST(Automaton, SinglePredicate) {
  const NavAutomaton a(expr::pred(kP));
  EXPECT_EQ(a.state_count(), 2u);
  ASSERT_EQ(a.transitions().size(), 1u);
  EXPECT_FALSE(a.is_final(a.initial()));
  EXPECT_EQ(a.next_p(a.initial()), std::vector<NavLabel>{kFwdP});
  const auto to = a.next_state(a.initial(), kFwdP);
  ASSERT_EQ(to.size(), 1u);
  EXPECT_TRUE(a.is_final(to[0]));
  EXPECT_EQ(a.finals(), to);
  EXPECT_FALSE(a.get_test(a.initial()));
  EXPECT_FALSE(a.get_action(a.initial()));
  EXPECT_THROW(a.next_state(a.initial(), kFwdQ), AutomatonError);
  EXPECT_THROW(a.is_final(7), AutomatonError);
}

TEST(Automaton, StarLoopsOnItsInitialState) {
  const NavAutomaton a(expr::star(expr::pred(kP)));
  EXPECT_TRUE(a.is_final(a.initial()));
  EXPECT_EQ(a.next_p(a.initial()), std::vector<NavLabel>{kFwdP});
  const State q = a.next_state(a.initial(), kFwdP).front();
  EXPECT_EQ(a.next_p(q), std::vector<NavLabel>{kFwdP});
  EXPECT_TRUE(a.is_final(q));
  EXPECT_TRUE(a.accepts({}));
  EXPECT_TRUE(a.accepts({kFwdP, kFwdP, kFwdP}));
  EXPECT_FALSE(a.accepts({kFwdQ}));
}

TEST(Automaton, AlternationOffersBothLabels) {
  const NavAutomaton a(expr::alt(expr::pred(kP), expr::inverse(kQ)));
  EXPECT_EQ(a.next_p(a.initial()), (std::vector<NavLabel>{kFwdP, kInvQ}));
}

TEST(Automaton, SameAsStarThenWildcard) {
  const NavAutomaton a(expression_file("kubrick/sameas_any.nlod"));
  const NavLabel same{curie("owl:sameAs"), Direction::forward};
  // hand closure: q0 and the state after sameAs both offer sameAs and <_>;
  // the state after <_> is the only final one
  EXPECT_EQ(a.thompson_state_count(), 6u);
  EXPECT_EQ(a.state_count(), 3u);
  EXPECT_EQ(a.next_p(a.initial()), (std::vector<NavLabel>{kAny, same}));
  const State after_same = a.next_state(a.initial(), same).front();
  const State after_any = a.next_state(a.initial(), kAny).front();
  EXPECT_EQ(a.next_p(after_same), (std::vector<NavLabel>{kAny, same}));
  EXPECT_TRUE(a.next_p(after_any).empty());
  EXPECT_EQ(a.finals(), std::vector<State>{after_any});
}

TEST(Automaton, InfluenceChainMatchesHandConstruction) {
  const auto e = expression_file("kubrick/influenced_email.nlod");
  // Thompson: influenced 2 + plus 2 + test 1 + action 2 + director 2 + sameAs 2 + optional 2
  const auto nfa = build_thompson(e);
  EXPECT_EQ(nfa.states, 13u);
  EXPECT_EQ(nfa.transitions.size() - nfa.epsilon_count(), 5u);
  EXPECT_EQ(nfa.epsilon_count(), 9u);

  const NavAutomaton a(nfa);
  // kept: initial + the five labelled targets
  EXPECT_EQ(a.state_count(), 6u);
  EXPECT_EQ(a.transitions().size(), 6u);
  EXPECT_EQ(a.finals().size(), 2u);
  EXPECT_EQ(count_kind(a, LabelKind::test), 1u);
  EXPECT_EQ(count_kind(a, LabelKind::action), 1u);

  const NavLabel influenced{curie("dbpo:influenced"), Direction::forward};
  const NavLabel director{curie("dbpo:director"), Direction::forward};
  const NavLabel same{curie("owl:sameAs"), Direction::forward};
  const State after_plus = a.next_state(a.initial(), influenced).front();
  EXPECT_EQ(a.next_p(after_plus), std::vector<NavLabel>{influenced});
  ASSERT_TRUE(a.get_test(after_plus));
  EXPECT_EQ(a.get_test(after_plus)->query.form, QueryForm::ask);
  EXPECT_EQ(only_state_with(a, LabelKind::test), after_plus);

  const State tested = a.tests(after_plus).front()->to;
  ASSERT_TRUE(a.get_action(tested));
  EXPECT_EQ(a.get_action(tested)->procedure, "sendEmail");
  EXPECT_TRUE(a.next_p(tested).empty());
  const State acted = a.actions(tested).front()->to;
  EXPECT_EQ(a.next_p(acted), std::vector<NavLabel>{director});
  const State directed = a.next_state(acted, director).front();
  EXPECT_TRUE(a.is_final(directed));
  const State aliased = a.next_state(directed, same).front();
  EXPECT_TRUE(a.is_final(aliased));
  EXPECT_EQ(a.finals(), (std::vector<State>{std::min(directed, aliased), std::max(directed, aliased)}));
}

TEST(Automaton, EveryTestAndActionOnExactlyOneTransition) {
  std::mt19937_64 rng(5);
  ExprShape shape;
  shape.depth = 4;
  for (int i = 0; i < 300; ++i) {
    const auto e = random_expr(rng, shape);
    std::size_t nodes = 0;
    preorder(e, [&](const PathNode& n) { nodes += n.kind == ExprKind::test || n.kind == ExprKind::action; });
    const auto nfa = build_thompson(e);
    std::set<std::size_t> occurrences;
    std::size_t labelled = 0;
    for (const auto& t : nfa.transitions)
      if (t.label.kind == LabelKind::test || t.label.kind == LabelKind::action) {
        ++labelled;
        occurrences.insert(t.label.occurrence);
      }
    EXPECT_EQ(labelled, nodes) << pretty_print(e);
    EXPECT_EQ(occurrences.size(), nodes) << pretty_print(e);
  }
}

TEST(Automaton, ThompsonBound) {
  std::mt19937_64 rng(17);
  ExprShape shape;
  shape.depth = 6;
  for (int i = 0; i < 1000; ++i) {
    const auto e = random_expr(rng, shape);
    const auto nfa = build_thompson(e);
    EXPECT_LE(nfa.states, 2 * node_count(e)) << pretty_print(e);
    const NavAutomaton a(nfa);
    EXPECT_LE(a.state_count(), nfa.states);
  }
}

TEST(Automaton, LanguageMatchesDerivativesExhaustively) {
  const std::vector<PathExpr> leaves{expr::pred(kP), expr::pred(kQ), expr::inverse(kP), expr::inverse(kQ),
                                     expr::wildcard()};
  const std::vector<NavLabel> alphabet{kFwdP, kFwdQ, kInvP, kInvQ};
  const auto all = enumerate_exprs(leaves, 3);
  EXPECT_EQ(all.size(), 10015u);
  std::vector<LanguageMismatch> mismatches;
  std::size_t words = 0;
  for (const auto& e : all) words += compare_languages(e, alphabet, 4, mismatches);
  EXPECT_EQ(words, all.size() * 341);
  for (std::size_t i = 0; i < std::min<std::size_t>(mismatches.size(), 5); ++i)
    ADD_FAILURE() << mismatches[i].expression << " on a word of length " << mismatches[i].word.size();
}

TEST(Automaton, SubsetConstructionAgreesOnRandomWords) {
  std::mt19937_64 rng(23);
  ExprShape shape;
  shape.depth = 5;
  shape.predicates = 2;
  const std::vector<NavLabel> alphabet{{pred_uri(0), Direction::forward}, {pred_uri(1), Direction::forward},
                                       {pred_uri(0), Direction::inverse}, {pred_uri(1), Direction::inverse}};
  std::uniform_int_distribution<std::size_t> symbol(0, alphabet.size() - 1), length(0, 8);
  for (int i = 0; i < 300; ++i) {
    const auto e = random_expr(rng, shape);
    const NavAutomaton a(e);
    const SubsetDfa dfa(a, alphabet);
    for (int w = 0; w < 50; ++w) {
      std::vector<NavLabel> word(length(rng));
      for (auto& s : word) s = alphabet[symbol(rng)];
      EXPECT_EQ(dfa.accepts(word), a.accepts(word)) << pretty_print(e);
    }
  }
}

TEST(Automaton, DotExport) {
  const auto dot = to_dot(NavAutomaton(expression_file("kubrick/influenced_email.nlod")));
  EXPECT_EQ(dot.rfind("digraph", 0), 0u);
  EXPECT_NE(dot.find("sendEmail"), std::string::npos);
  EXPECT_NE(dot.find("doublecircle"), std::string::npos);
}
