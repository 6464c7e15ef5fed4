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

// Random webs and expressions for property tests.

#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "nautilod/expr.hpp"
#include "nautilod/query.hpp"
#include "nautilod/rdf.hpp"
#include "nautilod/web.hpp"

namespace nautilod::testing {

inline Uri pred_uri(int i) { return Uri("http://example.org/p" + std::to_string(i)); }

struct WebShape {
  int uris = 30;
  int max_triples = 8;
  int hosts = 3;
  int predicates = 3;
  double literal_ratio = 0.15;
  double backlink_ratio = 0.25;
  double missing_ratio = 0.1;  // URIs without a description
};

inline Uri node_uri(int i, int hosts) {
  return Uri("http://h" + std::to_string(i % hosts) + ".example/r" + std::to_string(i));
}

/// A random fixture web: each listed URI gets up to `max_triples` triples
/// about itself, some of them pointing back at it.
inline std::shared_ptr<FixtureWeb> random_web(std::mt19937_64& rng, const WebShape& shape = {}) {
  auto web = std::make_shared<FixtureWeb>();
  std::uniform_int_distribution<int> node(0, shape.uris - 1);
  std::uniform_int_distribution<int> pred(0, shape.predicates - 1);
  std::uniform_int_distribution<int> count(0, shape.max_triples);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int i = 0; i < shape.uris; ++i) {
    if (coin(rng) < shape.missing_ratio) continue;
    const Uri self = node_uri(i, shape.hosts);
    std::vector<Triple> triples;
    const int n = count(rng);
    for (int k = 0; k < n; ++k) {
      const Uri p = pred_uri(pred(rng));
      if (coin(rng) < shape.literal_ratio) {
        triples.push_back({self, p, Literal(std::to_string(node(rng)), xsd::type("integer"))});
      } else if (coin(rng) < shape.backlink_ratio) {
        triples.push_back({node_uri(node(rng), shape.hosts), p, self});
      } else {
        triples.push_back({self, p, node_uri(node(rng), shape.hosts)});
      }
    }
    web->add(self, std::move(triples));
  }
  return web;
}

struct ExprShape {
  int depth = 3;
  int predicates = 3;
  bool tests = true;
  bool actions = true;
  bool inverse = true;
  bool wildcard = true;
  int uris = 30;
  int hosts = 3;
};

namespace detail {

inline QueryPattern random_ask(std::mt19937_64& rng, const ExprShape& s) {
  std::uniform_int_distribution<int> pick(0, 3);
  const std::string p = "<" + pred_uri(std::uniform_int_distribution<int>(0, s.predicates - 1)(rng)).str() + ">";
  const int node = std::uniform_int_distribution<int>(0, s.uris - 1)(rng);
  switch (pick(rng)) {
    case 0: return parse_query("ASK { ?s " + p + " ?o }");
    case 1: return parse_query("ASK { ?s " + p + " <" + node_uri(node, s.hosts).str() + "> }");
    case 2: return parse_query("ASK { ?s " + p + " ?o . FILTER(?o < " + std::to_string(node) + ") }");
    default: return parse_query("ASK { <" + node_uri(node, s.hosts).str() + "> ?p ?o }");
  }
}

inline ActionSpec random_action(std::mt19937_64& rng, const ExprShape& s) {
  const std::string p = "<" + pred_uri(std::uniform_int_distribution<int>(0, s.predicates - 1)(rng)).str() + ">";
  return ActionSpec{"collect", {"o"}, parse_query("SELECT ?o WHERE { ?s " + p + " ?o }")};
}

inline PathExpr random_leaf(std::mt19937_64& rng, const ExprShape& s) {
  std::vector<int> kinds{0, 0, 0};
  if (s.inverse) kinds.push_back(1);
  if (s.wildcard) kinds.push_back(2);
  if (s.actions) kinds.push_back(3);
  const int kind = kinds[std::uniform_int_distribution<std::size_t>(0, kinds.size() - 1)(rng)];
  const Uri p = pred_uri(std::uniform_int_distribution<int>(0, s.predicates - 1)(rng));
  switch (kind) {
    case 1: return expr::inverse(p);
    case 2: return expr::wildcard();
    case 3: return expr::action(random_action(rng, s));
    default: return expr::pred(p);
  }
}

}  // namespace detail

/// Random expression with AST depth at most `shape.depth`.
inline PathExpr random_expr(std::mt19937_64& rng, const ExprShape& shape, int depth = -1) {
  if (depth < 0) depth = shape.depth;
  if (depth <= 1 || std::uniform_int_distribution<int>(0, 3)(rng) == 0) return detail::random_leaf(rng, shape);
  const int ops = shape.tests ? 6 : 5;
  switch (std::uniform_int_distribution<int>(0, ops - 1)(rng)) {
    case 0: return expr::concat(random_expr(rng, shape, depth - 1), random_expr(rng, shape, depth - 1));
    case 1: return expr::alt(random_expr(rng, shape, depth - 1), random_expr(rng, shape, depth - 1));
    case 2: return expr::star(random_expr(rng, shape, depth - 1));
    case 3: return expr::plus(random_expr(rng, shape, depth - 1));
    case 4: return expr::optional(random_expr(rng, shape, depth - 1));
    default: return expr::test(random_expr(rng, shape, depth - 1), TestSpec{detail::random_ask(rng, shape)});
  }
}

}  // namespace nautilod::testing
