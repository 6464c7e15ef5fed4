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

#include "nautilod/dswget/engine.hpp"
#include "nautilod/dswget/message.hpp"
#include "nautilod/dswget/network.hpp"
#include "nautilod/dswget/tcp.hpp"
#include "nautilod/evaluator.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace nautilod;
using namespace nautilod::dswget;
using namespace nautilod::testing;
using namespace std::chrono_literals;

namespace {

std::set<Term> terms(std::initializer_list<const char*> curies) {
  std::set<Term> out;
  for (const char* c : curies) out.insert(Term(curie(c)));
  return out;
}

PathExpr musician_town() { return expression_file("hometown/musician_town.nlod"); }

void expect_same(const DswgetMessage& a, const DswgetMessage& b) {
  EXPECT_EQ(a.kind, b.kind);
  EXPECT_EQ(a.request_id, b.request_id);
  EXPECT_EQ(a.client_id, b.client_id);
  EXPECT_EQ(a.expression, b.expression);
  EXPECT_EQ(a.delegation, b.delegation);
  EXPECT_EQ(a.engine, b.engine);
  EXPECT_EQ(a.pairs, b.pairs);
  EXPECT_EQ(a.results, b.results);
  ASSERT_EQ(a.actions.size(), b.actions.size());
  for (std::size_t i = 0; i < a.actions.size(); ++i) {
    EXPECT_EQ(a.actions[i].procedure, b.actions[i].procedure);
    EXPECT_EQ(a.actions[i].occurrence, b.actions[i].occurrence);
    EXPECT_EQ(a.actions[i].target, b.actions[i].target);
    EXPECT_EQ(a.actions[i].params, b.actions[i].params);
    EXPECT_EQ(a.actions[i].ok, b.actions[i].ok);
    EXPECT_EQ(a.actions[i].failure, b.actions[i].failure);
  }
  EXPECT_EQ(a.spawned, b.spawned);
  EXPECT_EQ(a.unreachable, b.unreachable);
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.result_sent, b.result_sent);
  EXPECT_EQ(a.ok, b.ok);
  EXPECT_EQ(a.error, b.error);
}

// Engines for `web`, host i going to engine i % n. Hosts listed in `skip` get no engine.
void add_partitioned(SimulatedNetwork& net, FixtureWeb& web, std::size_t n, const std::set<std::string>& skip = {}) {
  std::vector<std::set<std::string>> hosts(n);
  std::vector<std::shared_ptr<FixtureWeb>> stores(n);
  auto parts = partition_by_host(web);
  // hosts that publish nothing still get an owner, which answers with empty descriptions
  for (const Uri& u : web.uris())
    for (const Triple& t : resolve(web, u)->triples())
      if (const Uri* o = as_uri(t.object)) parts.try_emplace(authority(*o), std::make_shared<FixtureWeb>());
  std::size_t i = 0;
  for (const auto& [host, part] : parts) {
    if (skip.count(host)) continue;
    const std::size_t k = i++ % n;
    hosts[k].insert(host);
    if (!stores[k]) stores[k] = std::make_shared<FixtureWeb>();
    for (const Uri& u : part->uris()) stores[k]->add(u, resolve(*part, u)->triples());
  }
  static const ActionRegistry registry = [] {
    ActionRegistry r;
    r.register_action("collect", [](const ActionContext&) {});
    return r;
  }();
  for (std::size_t k = 0; k < n; ++k)
    if (!hosts[k].empty())
      net.add_engine(std::make_shared<Engine>("engine" + std::to_string(k), hosts[k], stores[k], &registry));
}

}  // namespace

// ---- wire format ------------------------------------------------------------------

TEST(Wire, RoundTripsEveryField) {
  DswgetMessage m;
  m.kind = MessageKind::progress;
  m.request_id = "req-1";
  m.client_id = "tcp://127.0.0.1:4000";
  m.expression = "(<http://e/p>)*";
  m.delegation = "e1#3";
  m.engine = "e1";
  m.pairs = {{Uri("http://e/a"), 0}, {Uri("http://e/b"), 7}};
  m.results = {Term(Uri("http://e/a")), Term(Literal("tab\there\nnewline", std::nullopt, "en")),
               Term(Literal("4", xsd::type("integer")))};
  ActionRecord a{"sendEmail", 2, Uri("http://e/a"), {{{"p", Term(Uri("http://e/page"))}}, {}}};
  a.ok = false;
  a.failure = "smtp\tdown\\";
  m.actions = {a};
  m.spawned = {{"e1#4", "h1.example"}, {"e1#5", "h2.example"}};
  m.unreachable = {"nowhere.example"};
  m.states = {0, 3, 4};
  m.result_sent = true;
  m.ok = false;
  m.error = "line one\nline two";
  const std::string wire = encode(m);
  EXPECT_EQ(wire.rfind("DSWGET/1 PROGRESS req-1 tcp://127.0.0.1:4000\n", 0), 0u) << wire;
  EXPECT_TRUE(wire.ends_with("END\n"));
  expect_same(decode(wire), m);
}

TEST(Wire, RejectsMalformedInput) {
  DswgetMessage m;
  m.request_id = "r";
  m.client_id = "c";
  m.delegation = "client#0";
  m.pairs = {{Uri("http://e/a"), 0}};
  const std::string good = encode(m);
  EXPECT_NO_THROW(decode(good));
  for (const std::string& bad :
       {std::string(""), std::string("HELLO\n"), good.substr(0, good.size() - 4), "DSWGET/2" + good.substr(8),
        std::string("DSWGET/1 DELEGATE r c\nexpr\nPAIR\tx\t<http://e/a>\nEND\n"),
        std::string("DSWGET/1 DELEGATE r c\nexpr\nBOGUS\t1\nEND\n"),
        std::string("DSWGET/1 DELEGATE r c\nexpr\nPAIR\t0\t<http://e/a>\nEND\ntrailing\n"),
        std::string("DSWGET/1 DELEGATE r\nexpr\nEND\n")})
    EXPECT_THROW(decode(bad), ProtocolError) << bad;
  EXPECT_THROW(decode(std::string(kMaxMessageBytes + 1, 'x')), ProtocolError);
}

// ---- the hometown scenario -----------------------------------------------------

TEST(Hometown, FourEnginesDeliverSolaroloTwice) {
  SimulatedNetwork net;
  load_engines(net, fixture("hometown/engines.conf"), nullptr, prefixes());
  EXPECT_EQ(net.engines().size(), 4u);
  const auto run = client_submit(musician_town(), curie("dbp:Rome"), net);
  EXPECT_TRUE(run.complete);
  EXPECT_TRUE(run.errors.empty());
  EXPECT_EQ(run.result.terms(), terms({"geo:Solarolo", "yago:Solarolo"}));
  EXPECT_EQ(run.engines, (std::set<std::string>{"dbpedia.org", "rdf.freebase.com", "sws.geonames.org",
                                                "yago-knowledge.org"}));
  // root, dbpedia->freebase (EnricoRava), dbpedia->geonames (Paris),
  // freebase->geonames (Solarolo), geonames->yago
  EXPECT_EQ(net.stats().delegates.size(), 5u);
  EXPECT_EQ(net.stats().delegates_pending_at_completion, 0u);
  for (const auto& e : net.engines()) EXPECT_EQ(e->counters().pairs_reprocessed, 0u);
}

TEST(Hometown, GeonamesAndYagoReportTheirOwnResults) {
  auto geo_store = load_fixture_web(fixture("hometown/geonames.tsv"));
  Engine geo("sws.geonames.org", {"sws.geonames.org"}, geo_store, nullptr,
             [](const std::string& h) { return h == "yago-knowledge.org"; });
  const auto e = musician_town();
  const NavAutomaton a(e);
  // the state freebase reaches after crossing birthPlace
  const State q0 = a.initial();
  const NavLabel hometown{curie("dbpo:hometown"), Direction::inverse};
  const State after_hometown = a.next_state(q0, hometown).front();
  const State tested = a.tests(after_hometown).front()->to;
  const State after_birth = a.next_state(tested, {curie("dbpo:birthPlace"), Direction::forward}).front();

  DswgetMessage d;
  d.request_id = "r";
  d.client_id = "client";
  d.expression = pretty_print(e);
  d.delegation = "rdf.freebase.com#1";
  d.pairs = {{curie("geo:Solarolo"), after_birth}};
  const auto out = geo.handle(d);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_TRUE(out[0].to_client);
  EXPECT_EQ(out[0].message.kind, MessageKind::result);
  EXPECT_EQ(out[0].message.results, terms({"geo:Solarolo"}));
  EXPECT_FALSE(out[1].to_client);
  EXPECT_EQ(out[1].to, "yago-knowledge.org");
  EXPECT_EQ(out[1].message.pairs.size(), 1u);
  EXPECT_EQ(out[2].message.kind, MessageKind::progress);
  EXPECT_TRUE(out[2].message.result_sent);

  auto yago_store = load_fixture_web(fixture("hometown/yago.tsv"));
  Engine yago("yago-knowledge.org", {"yago-knowledge.org"}, yago_store);
  const auto last = yago.handle(out[1].message);
  ASSERT_EQ(last.size(), 2u);
  EXPECT_EQ(last[0].message.results, terms({"yago:Solarolo"}));
  EXPECT_EQ(last[1].message.kind, MessageKind::progress);
  EXPECT_TRUE(last[1].message.spawned.empty());
}

TEST(Hometown, MatchesCentralizedRun) {
  auto all = load_fixture_web(fixture("hometown/all.tsv"));
  const auto central = eval_engine(musician_town(), curie("dbp:Rome"), *all);
  SimulatedNetwork net;
  load_engines(net, fixture("hometown/engines.conf"), nullptr, prefixes());
  EXPECT_EQ(client_submit(musician_town(), curie("dbp:Rome"), net).result.terms(), central.result.terms());
}

TEST(Hometown, ArrivalOrderDoesNotMatter) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SimulatedNetwork::Options options;
    options.shuffle = true;
    options.duplicate = seed % 2 == 1;
    options.seed = seed;
    SimulatedNetwork net(options);
    load_engines(net, fixture("hometown/engines.conf"), nullptr, prefixes());
    const auto run = client_submit(musician_town(), curie("dbp:Rome"), net);
    ASSERT_TRUE(run.complete) << seed;
    EXPECT_EQ(run.result.terms(), terms({"geo:Solarolo", "yago:Solarolo"})) << seed;
    EXPECT_EQ(net.stats().delegates_pending_at_completion, 0u) << seed;
    for (const auto& e : net.engines()) EXPECT_EQ(e->counters().pairs_reprocessed, 0u);
  }
}

// ---- engine behaviour ------------------------------------------------------------

TEST(EngineHandle, BatchesPairsPerHost) {
  const Uri u("http://a.example/u"), p("http://e/p");
  auto store = std::make_shared<FixtureWeb>();
  store->add(u, {{u, p, Uri("http://b.example/x")}, {u, p, Uri("http://b.example/y")}, {u, p, Uri("http://c.example/z")}});
  Engine a("a", {"a.example"}, store, nullptr, [](const std::string&) { return true; });
  DswgetMessage d = initial_delegate("r", "client", parse("<http://e/p>/<http://e/p>"), u);
  const auto out = a.handle(d);
  std::map<std::string, std::size_t> per_host;
  std::size_t delegates = 0;
  for (const auto& env : out)
    if (!env.to_client) {
      ++delegates;
      per_host[env.to] = env.message.pairs.size();
    }
  EXPECT_EQ(delegates, 2u);
  EXPECT_EQ(per_host, (std::map<std::string, std::size_t>{{"b.example", 2}, {"c.example", 1}}));
  // nothing final yet, so no RESULT
  EXPECT_EQ(out.size(), 3u);
  EXPECT_EQ(out.back().message.spawned.size(), 2u);
}

TEST(EngineHandle, NothingToForwardMeansNoDelegate) {
  const Uri u("http://a.example/u");
  auto store = std::make_shared<FixtureWeb>();
  store->add(u, {{u, Uri("http://e/p"), Uri("http://a.example/v")}});
  Engine a("a", {"a.example"}, store, nullptr, [](const std::string&) { return true; });
  const auto out = a.handle(initial_delegate("r", "client", parse("<http://e/q>"), u));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].message.kind, MessageKind::progress);
  EXPECT_FALSE(out[0].message.result_sent);
}

TEST(EngineHandle, VisitedPairsAreNotExpandedAgain) {
  const Uri u("http://a.example/u");
  auto store = std::make_shared<FixtureWeb>();
  store->add(u, {{u, Uri("http://e/p"), Uri("http://b.example/v")}});
  Engine a("a", {"a.example"}, store, nullptr, [](const std::string&) { return true; });
  auto d = initial_delegate("r", "client", parse("(<http://e/p>)*"), u);
  EXPECT_EQ(a.handle(d).size(), 3u);  // RESULT{u}, DELEGATE to b, PROGRESS
  // the very same delegation again: ignored outright
  EXPECT_TRUE(a.handle(d).empty());
  EXPECT_EQ(a.counters().duplicate_delegations, 1u);
  // same pair under a new delegation id: acknowledged, nothing else
  d.delegation = "other#1";
  const auto again = a.handle(d);
  ASSERT_EQ(again.size(), 1u);
  EXPECT_EQ(again[0].message.kind, MessageKind::progress);
  EXPECT_FALSE(again[0].message.result_sent);
  EXPECT_TRUE(again[0].message.spawned.empty());
  EXPECT_EQ(a.counters().pairs_processed, 1u);
}

TEST(EngineHandle, UnreachableHostIsReported) {
  const Uri u("http://a.example/u"), far("http://nowhere.example/x");
  auto store = std::make_shared<FixtureWeb>();
  store->add(u, {{u, Uri("http://e/p"), far}});
  Engine a("a", {"a.example"}, store, nullptr, [](const std::string&) { return false; });
  const auto out = a.handle(initial_delegate("r", "client", parse("<http://e/p>"), u));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].message.results, std::set<Term>{Term(far)});
  EXPECT_EQ(out[1].message.unreachable, std::vector<std::string>{"nowhere.example"});
}

TEST(EngineHandle, ProtocolErrorsGoBackToTheClient) {
  auto store = std::make_shared<FixtureWeb>();
  Engine a("a", {"a.example"}, store);
  auto foreign = initial_delegate("r", "client", parse("<http://e/p>"), Uri("http://b.example/u"));
  auto out = a.handle(foreign);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_FALSE(out[0].message.ok);
  EXPECT_NE(out[0].message.error.find("not owned"), std::string::npos);

  auto garbled = initial_delegate("r2", "client", parse("<http://e/p>"), Uri("http://a.example/u"));
  garbled.expression = "(((";
  out = a.handle(garbled);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_FALSE(out[0].message.ok);

  auto bad_state = initial_delegate("r3", "client", parse("<http://e/p>"), Uri("http://a.example/u"));
  bad_state.pairs[0].second = 99;
  EXPECT_FALSE(a.handle(bad_state)[0].message.ok);
}

TEST(Client, UnknownSeedHostFailsImmediately) {
  SimulatedNetwork net;
  load_engines(net, fixture("hometown/engines.conf"), nullptr, prefixes());
  EXPECT_THROW(client_submit(musician_town(), Uri("http://elsewhere.example/x"), net), Error);
}

TEST(Client, TrackerWaitsForAnnouncedWork) {
  ClientTracker t("r");
  EXPECT_FALSE(t.complete());
  DswgetMessage progress;
  progress.kind = MessageKind::progress;
  progress.request_id = "r";
  progress.delegation = kRootDelegation;
  progress.engine = "a";
  progress.result_sent = true;
  progress.spawned = {{"a#1", "b"}};
  t.receive(progress);
  EXPECT_FALSE(t.complete());
  DswgetMessage result;
  result.kind = MessageKind::result;
  result.request_id = "r";
  result.delegation = kRootDelegation;
  result.results = {Term(Uri("http://a/x"))};
  t.receive(result);
  t.receive(result);
  EXPECT_FALSE(t.complete());
  DswgetMessage done = progress;
  done.delegation = "a#1";
  done.result_sent = false;
  done.spawned.clear();
  t.receive(done);
  EXPECT_TRUE(t.complete());
  EXPECT_EQ(t.result().terms().size(), 1u);
  DswgetMessage other = done;
  other.request_id = "someone-else";
  other.spawned = {{"x#1", "c"}};
  t.receive(other);
  EXPECT_TRUE(t.complete());
}

TEST(Config, BadLinesAreReported) {
  TempDir dir;
  dir.write("noeq.conf", "dbpedia.org\n");
  dir.write("missing.conf", "dbpedia.org=absent.tsv\n");
  SimulatedNetwork net;
  EXPECT_THROW(load_engines(net, dir / "noeq.conf"), FixtureError);
  EXPECT_THROW(load_engines(net, dir / "missing.conf"), FixtureError);
  EXPECT_THROW(load_engines(net, dir / "absent.conf"), FixtureError);
}

// ---- random equivalence -------------------------------------------------------------

TEST(Distributed, RandomWebsMatchCentralized) {
  std::mt19937_64 rng(211);
  for (int i = 0; i < 100; ++i) {
    WebShape w;
    w.uris = std::uniform_int_distribution<int>(1, 30)(rng);
    w.hosts = 4;
    auto web = random_web(rng, w);
    ExprShape shape;
    shape.uris = w.uris;
    shape.hosts = w.hosts;
    const auto e = random_expr(rng, shape);
    const Uri seed = node_uri(0, w.hosts);
    const auto central = eval_engine(e, seed, *web);
    for (std::size_t n = 1; n <= 4; ++n) {
      SimulatedNetwork net;
      add_partitioned(net, *web, n);
      if (!net.has_engine(authority(seed))) continue;  // seed host has no description at all
      const auto run = client_submit(e, seed, net);
      ASSERT_TRUE(run.complete) << pretty_print(e);
      ASSERT_EQ(run.result.terms(), central.result.terms()) << n << " engines: " << pretty_print(e);
      ASSERT_EQ(run.result.action_set(), central.result.action_set());
      EXPECT_EQ(net.stats().delegates_pending_at_completion, 0u);
      EXPECT_LE(net.stats().max_delegates_per_host_per_wave, 1u);
      const std::size_t bound = NavAutomaton(e).state_count() * (web->uris().size() + 1 + w.uris);
      std::size_t processed = 0;
      for (const auto& engine : net.engines()) {
        EXPECT_EQ(engine->counters().pairs_reprocessed, 0u);
        processed += engine->counters().pairs_processed;
      }
      EXPECT_LE(processed, bound);
      EXPECT_LE(net.stats().delegates.size(), bound);
    }
  }
}

TEST(Distributed, OwnerWithoutDescriptionsStillRunsActions) {
  FixtureWeb web;
  const Uri r0("http://h0.example/r0"), r1("http://h1.example/r1"), r2("http://h2.example/r2");
  const Uri p0 = pred_uri(0), p1 = pred_uri(1), p2 = pred_uri(2);
  web.add(r0, {{r0, p0, r1}, {r0, p2, r0}, {r0, p2, r2}});
  web.add(r2, {{r2, p0, r2}, {r2, p1, r2}, {r2, p2, r1}});
  const auto e = parse("({collect(?o)[SELECT ?o WHERE { ?s <" + p1.str() + "> ?o . }]}/<" + p2.str() + ">)+");
  ActionRegistry registry;
  registry.register_action("collect", [](const ActionContext&) {});
  const auto central = eval_engine(e, r0, web, {}, &registry);
  ASSERT_EQ(central.result.action_set().size(), 3u);  // r1 included, over its empty description

  SimulatedNetwork net;
  add_partitioned(net, web, 3);
  EXPECT_TRUE(net.has_engine("h1.example"));
  const auto run = client_submit(e, r0, net);
  EXPECT_TRUE(run.complete);
  EXPECT_EQ(run.result.terms(), central.result.terms());
  EXPECT_EQ(run.result.action_set(), central.result.action_set());
}

TEST(Distributed, MissingEnginesBehaveLikeADomainsFilter) {
  std::mt19937_64 rng(223);
  for (int i = 0; i < 100; ++i) {
    WebShape w;
    w.hosts = 3;
    auto web = random_web(rng, w);
    ExprShape shape;
    const auto e = random_expr(rng, shape);
    const Uri seed = node_uri(0, w.hosts);
    SimulatedNetwork net;
    add_partitioned(net, *web, 2, {"h2.example"});
    if (!net.has_engine(authority(seed))) continue;
    NetworkParams params;
    params.domains = std::vector<std::string>{"h0.example", "h1.example"};
    const auto central = eval_engine(e, seed, *web, params);
    const auto run = client_submit(e, seed, net);
    ASSERT_TRUE(run.complete);
    ASSERT_EQ(run.result.terms(), central.result.terms()) << pretty_print(e);
  }
}

TEST(Distributed, ShuffledAndDuplicatedDelivery) {
  std::mt19937_64 rng(227);
  for (int i = 0; i < 60; ++i) {
    WebShape w;
    auto web = random_web(rng, w);
    const auto e = random_expr(rng, {});
    const Uri seed = node_uri(0, w.hosts);
    const auto central = eval_engine(e, seed, *web);
    SimulatedNetwork::Options options;
    options.shuffle = true;
    options.duplicate = i % 2 == 0;
    options.seed = static_cast<std::uint64_t>(i);
    SimulatedNetwork net(options);
    add_partitioned(net, *web, 3);
    if (!net.has_engine(authority(seed))) continue;
    const auto run = client_submit(e, seed, net);
    ASSERT_TRUE(run.complete);
    ASSERT_EQ(run.result.terms(), central.result.terms()) << pretty_print(e);
    EXPECT_EQ(net.stats().delegates_pending_at_completion, 0u);
  }
}

TEST(Distributed, CrossEngineCycleTerminates) {
  auto web = std::make_shared<FixtureWeb>();
  const Uri same("http://www.w3.org/2002/07/owl#sameAs");
  std::vector<Uri> ring;
  for (int i = 0; i < 6; ++i) ring.emplace_back("http://h" + std::to_string(i % 3) + ".example/n" + std::to_string(i));
  for (int i = 0; i < 6; ++i) web->add(ring[i], {{ring[i], same, ring[(i + 1) % 6]}});
  SimulatedNetwork net;
  add_partitioned(net, *web, 3);
  const auto run = client_submit(parse("(<owl:sameAs>)*"), ring[0], net);
  EXPECT_TRUE(run.complete);
  EXPECT_EQ(run.result.uris, std::set<Uri>(ring.begin(), ring.end()));
  // root, five hops, and the hop closing the ring, which lands on a visited pair
  EXPECT_EQ(net.stats().delegates.size(), 7u);
  // n0 as the seed, n3, and n0 again once the ring closes in the loop state
  EXPECT_EQ(net.engines()[0]->counters().pairs_processed, 3u);
}

// ---- TCP -----------------------------------------------------------------------------

TEST(Tcp, HometownOverLoopback) {
  const std::vector<std::pair<std::string, std::string>> layout{{"dbpedia.org", "dbpedia.tsv"},
                                                                {"rdf.freebase.com", "freebase.tsv"},
                                                                {"sws.geonames.org", "geonames.tsv"},
                                                                {"yago-knowledge.org", "yago.tsv"}};
  std::vector<std::unique_ptr<TcpEngineNode>> nodes;
  std::map<std::string, std::string> peers;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    auto engine = std::make_shared<Engine>(layout[i].first, std::set<std::string>{layout[i].first},
                                           load_fixture_web(fixture("hometown/" + layout[i].second)));
    nodes.push_back(std::make_unique<TcpEngineNode>(engine, "127.0.0." + std::to_string(i + 1), 0));
    peers[layout[i].first] = nodes.back()->address();
  }
  for (auto& node : nodes)
    for (const auto& [host, address] : peers) node->set_peer(host, address);
  const auto run = tcp_client_submit(musician_town(), curie("dbp:Rome"), peers, "127.0.0.1", 10s);
  EXPECT_TRUE(run.complete);
  EXPECT_EQ(run.result.terms(), terms({"geo:Solarolo", "yago:Solarolo"}));
  EXPECT_EQ(run.engines.size(), 4u);

  // an engine going away shows up as an unreachable host, not a hang
  nodes[3]->stop();
  const auto partial = tcp_client_submit(musician_town(), curie("dbp:Rome"), peers, "127.0.0.1", 10s);
  EXPECT_TRUE(partial.complete);
  EXPECT_EQ(partial.unreachable, std::set<std::string>{"yago-knowledge.org"});
  EXPECT_EQ(partial.result.terms(), terms({"geo:Solarolo"}));
  for (auto& node : nodes) node->stop();
}

TEST(Tcp, AddressParsing) {
  const auto a = TcpAddress::parse("tcp://127.0.0.2:8123");
  EXPECT_EQ(a.ip, "127.0.0.2");
  EXPECT_EQ(a.port, 8123);
  EXPECT_EQ(a.str(), "tcp://127.0.0.2:8123");
  EXPECT_THROW(TcpAddress::parse("http://127.0.0.2:8123"), ProtocolError);
  EXPECT_THROW(TcpAddress::parse("tcp://127.0.0.2"), ProtocolError);
}
