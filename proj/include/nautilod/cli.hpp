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

// The swget command line.

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nautilod/actions.hpp"
#include "nautilod/automaton.hpp"
#include "nautilod/dswget/network.hpp"
#include "nautilod/dswget/tcp.hpp"
#include "nautilod/evaluator.hpp"
#include "nautilod/expr.hpp"
#include "nautilod/http_web.hpp"
#include "nautilod/prefixes.hpp"
#include "nautilod/web.hpp"

namespace nautilod::cli {

enum ExitCode { kComplete = 0, kUsage = 1, kParse = 2, kPartial = 3 };

inline constexpr const char* kUsageText =
    "usage: swget <seed-uri> <expression | @file> [options]\n"
    "  -maxDerTriples <n>   skip descriptions with more than n triples\n"
    "  -saveGraph           store every fetched description (SWGET_GRAPH_DIR, default swget-graph/)\n"
    "  -maxSize <MB>        stop after this many megabytes have been transferred\n"
    "  -timeoutDer <ms>     give up on a single dereference after ms\n"
    "  -timeout <ms>        stop the whole navigation after ms\n"
    "  -domains {h1,h2}     only dereference URIs on these hosts\n"
    "  -fixture <manifest>  navigate a fixture web instead of the live web\n"
    "  -dswget <config>     distributed run; config lines are host=manifest or host=tcp://ip:port\n"
    "  -prefixes <file>     extra 'prefix IRI' lines\n"
    "  -o <file>            write results to file instead of stdout\n"
    "  -dot <file>          write the navigation automaton in DOT format\n"
    "  -workers <n>         parallel dereferences (default 1)\n";

struct Invocation {
  std::string seed;
  std::string expression;
  NetworkParams params;
  std::optional<std::string> fixture;
  std::optional<std::string> dswget;
  std::optional<std::string> prefix_file;
  std::optional<std::string> output;
  std::optional<std::string> dot;
  std::size_t workers = 1;
};

struct UsageError : Error {
  using Error::Error;
};

namespace detail {

inline std::size_t positive(const std::string& flag, const std::string& value) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || v <= 0) throw UsageError(flag + " expects a positive integer, got '" + value + "'");
  return static_cast<std::size_t>(v);
}

inline std::size_t non_negative(const std::string& flag, const std::string& value) {
  if (value == "0") return 0;
  return positive(flag, value);
}

inline bool looks_like_host(const std::string& s) {
  if (s.empty() || s[0] == '-' || s[0] == '@' || s[0] == '<' || s[0] == '(' || s[0] == '^') return false;
  return s.find_first_of(":/<>()[]{}|*?") == std::string::npos || (s.front() == '{' || s.back() == '}');
}

inline std::vector<std::string> split_domains(std::string text) {
  std::vector<std::string> out;
  std::replace(text.begin(), text.end(), '{', ' ');
  std::replace(text.begin(), text.end(), '}', ' ');
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  for (std::string h; in >> h;) {
    for (char& c : h) c = nautilod::detail::ascii_lower(c);
    out.push_back(h);
  }
  return out;
}

inline std::string ms(Nanos d) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << std::chrono::duration<double, std::milli>(d).count();
  return os.str();
}

}  // namespace detail

inline Invocation parse_args(const std::vector<std::string>& args) {
  Invocation inv;
  std::vector<std::string> positional;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    auto value = [&]() -> const std::string& {
      if (i + 1 >= args.size()) throw UsageError(a + " needs a value");
      return args[++i];
    };
    if (a == "-maxDerTriples") inv.params.max_der_triples = detail::non_negative(a, value());
    else if (a == "-saveGraph") inv.params.save_graph = true;
    else if (a == "-maxSize") inv.params.max_size_mb = detail::positive(a, value());
    else if (a == "-timeoutDer") inv.params.timeout_der = Millis(detail::positive(a, value()));
    else if (a == "-timeout") inv.params.timeout = Millis(detail::positive(a, value()));
    else if (a == "-domains") {
      // Accepts "{a,b}" as one argument and the shell's brace expansion "a b".
      std::vector<std::string> hosts = detail::split_domains(value());
      while (i + 1 < args.size() && detail::looks_like_host(args[i + 1])) {
        auto more = detail::split_domains(args[++i]);
        hosts.insert(hosts.end(), more.begin(), more.end());
      }
      if (hosts.empty()) throw UsageError("-domains needs at least one host");
      inv.params.domains = hosts;
    } else if (a == "-fixture") inv.fixture = value();
    else if (a == "-dswget") inv.dswget = value();
    else if (a == "-prefixes") inv.prefix_file = value();
    else if (a == "-o") inv.output = value();
    else if (a == "-dot") inv.dot = value();
    else if (a == "-workers") inv.workers = detail::positive(a, value());
    else if (a.size() > 1 && a[0] == '-') throw UsageError("unknown option " + a);
    else positional.push_back(a);
  }
  if (positional.size() != 2) throw UsageError("expected a seed URI and an expression");
  if (inv.fixture && inv.dswget) throw UsageError("-fixture and -dswget are mutually exclusive");
  inv.seed = positional[0];
  inv.expression = positional[1];
  return inv;
}

inline std::string load_expression(const std::string& arg) {
  if (arg.empty() || arg[0] != '@') return arg;
  std::ifstream in(arg.substr(1));
  if (!in) throw UsageError("cannot read expression file " + arg.substr(1));
  std::ostringstream os;
  os << in.rdbuf();
  return expression_file_text(os.str());
}

inline Uri expand_seed(const std::string& text, const PrefixMap& prefixes) {
  std::string s = text;
  if (s.size() >= 2 && s.front() == '<' && s.back() == '>') s = s.substr(1, s.size() - 2);
  if (s.find("://") == std::string::npos) {
    const auto colon = s.find(':');
    if (colon != std::string::npos)
      if (auto it = prefixes.find(s.substr(0, colon)); it != prefixes.end()) return Uri(it->second + s.substr(colon + 1));
  }
  return Uri(s);
}

inline void write_params(std::ostream& err, const Invocation& inv) {
  const auto& p = inv.params;
  err << "param.maxDerTriples=" << (p.max_der_triples ? std::to_string(*p.max_der_triples) : "none") << '\n';
  err << "param.saveGraph=" << (p.save_graph ? "true" : "false") << '\n';
  err << "param.maxSize=" << (p.max_size_mb ? std::to_string(*p.max_size_mb) : "none") << '\n';
  err << "param.timeoutDer=" << (p.timeout_der ? std::to_string(p.timeout_der->count()) : "none") << '\n';
  err << "param.timeout=" << (p.timeout ? std::to_string(p.timeout->count()) : "none") << '\n';
  err << "param.domains=";
  if (p.domains) {
    for (std::size_t i = 0; i < p.domains->size(); ++i) err << (i ? "," : "") << (*p.domains)[i];
  } else {
    err << "none";
  }
  err << '\n';
}

inline void write_results(std::ostream& out, const NavResult& r) {
  std::vector<std::string> lines;
  for (const Term& t : r.terms()) lines.push_back(to_ntriples(t));
  std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) out << l << '\n';
}

inline void write_actions(std::ostream& err, const NavResult& r) {
  for (std::size_t i = 0; i < r.actions.size(); ++i) {
    const auto& a = r.actions[i];
    err << "action." << i << '=' << a.procedure << ' ' << to_ntriples(a.target) << ' '
        << (a.ok ? "ok" : "failed: " + a.failure) << '\n';
  }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Invocation inv;
  try {
    if (args.empty()) throw UsageError("no arguments");
    if (args.size() == 1 && (args[0] == "-h" || args[0] == "--help")) {
      out << kUsageText;
      return kComplete;
    }
    inv = parse_args(args);
    inv.params.validate();
  } catch (const Error& e) {
    err << "swget: " << e.what() << '\n' << kUsageText;
    return kUsage;
  }

  PrefixMap prefixes;
  PathExpr expression;
  Uri seed("urn:x-nautilod:unset");
  ActionRegistry actions = builtin_actions();
  try {
    prefixes = inv.prefix_file ? load_prefix_file(*inv.prefix_file) : default_prefixes();
    inv.expression = load_expression(inv.expression);
    seed = expand_seed(inv.seed, prefixes);
  } catch (const Error& e) {
    err << "swget: " << e.what() << '\n';
    return kUsage;
  }
  try {
    expression = parse(inv.expression, prefixes);
    actions.validate(expression);
  } catch (const Error& e) {
    err << "swget: " << e.what() << '\n';
    return kParse;
  }

  if (inv.dot) {
    std::ofstream dot(*inv.dot);
    if (!dot) {
      err << "swget: cannot write " << *inv.dot << '\n';
      return kUsage;
    }
    dot << to_dot(build_automaton(expression));
  }

  NavResult result;
  std::ostringstream metrics;
  try {
    if (inv.dswget) {
      // Engines either run in process (host=manifest) or are remote (host=tcp://...).
      std::ifstream probe(*inv.dswget);
      if (!probe) throw FixtureError("cannot open engine config " + *inv.dswget);
      std::map<std::string, std::string> remote;
      for (std::string line; std::getline(probe, line);) {
        const auto eq = line.find('=');
        if (eq != std::string::npos && line.find("tcp://", eq) != std::string::npos) {
          std::string host = line.substr(0, eq), addr = line.substr(eq + 1);
          host.erase(0, host.find_first_not_of(" \t"));
          host.erase(host.find_last_not_of(" \t") + 1);
          addr.erase(0, addr.find_first_not_of(" \t"));
          addr.erase(addr.find_last_not_of(" \t\r") + 1);
          remote[host] = addr;
        }
      }
      const auto start = std::chrono::steady_clock::now();
      dswget::DistributedRun run;
      if (!remote.empty()) {
        run = dswget::tcp_client_submit(expression, seed, remote, "127.0.0.1",
                                        inv.params.timeout.value_or(Millis(60000)));
      } else {
        dswget::SimulatedNetwork network;
        dswget::load_engines(network, *inv.dswget, &actions, prefixes);
        run = network.submit(expression, seed);
        metrics << "delegates=" << network.stats().delegates.size() << '\n';
      }
      metrics << "engines=" << run.engines.size() << '\n';
      for (const auto& h : run.unreachable) metrics << "unreachable=" << h << '\n';
      for (const auto& e : run.errors) metrics << "engine_error=" << e << '\n';
      metrics << "elapsed_ms=" << detail::ms(std::chrono::steady_clock::now() - start) << '\n';
      result = std::move(run.result);
    } else {
      std::shared_ptr<WebInstance> web;
      if (inv.fixture) web = load_fixture_web(*inv.fixture);
      else web = std::make_shared<HttpWeb>();
      EngineOptions options;
      options.workers = inv.workers;
      EngineRun run = eval_engine(expression, seed, *web, inv.params, &actions, options);
      const auto& m = run.metrics;
      metrics << "elapsed_ms=" << detail::ms(m.elapsed) << '\n'
              << "time_navigation_ms=" << detail::ms(m.time_navigation) << '\n'
              << "time_tests_ms=" << detail::ms(m.time_tests) << '\n'
              << "time_actions_ms=" << detail::ms(m.time_actions) << '\n'
              << "uris_dereferenced=" << m.uris_dereferenced << '\n'
              << "dereference_attempts=" << m.dereference_attempts << '\n'
              << "triples_retrieved=" << m.triples_retrieved << '\n'
              << "bytes=" << m.bytes << '\n'
              << "pairs_processed=" << m.pairs_processed << '\n'
              << "skipped_by_policy=" << m.skipped_by_policy << '\n';
      for (const auto& f : run.fetches)
        if (f.status != FetchStatus::ok)
          metrics << "fetch=" << to_string(f.status) << ' ' << to_ntriples(f.uri) << ' '
                  << (f.http_code ? std::to_string(f.http_code) + " " : "") << f.reason << '\n';
      result = std::move(run.result);
    }
  } catch (const FixtureError& e) {
    err << "swget: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "swget: " << e.what() << '\n';
    return kUsage;
  }

  if (inv.output) {
    std::ofstream file(*inv.output);
    if (!file) {
      err << "swget: cannot write " << *inv.output << '\n';
      return kUsage;
    }
    write_results(file, result);
  } else {
    write_results(out, result);
  }

  err << "status=" << (result.partial ? "partial" : "complete") << '\n';
  if (result.partial) {
    err << "limits=";
    bool first = true;
    for (const auto& l : result.limits_hit) err << (std::exchange(first, false) ? "" : ",") << l;
    err << '\n';
  }
  err << "results=" << result.uris.size() + result.literals.size() << '\n';
  err << "actions=" << result.actions.size() << '\n';
  err << metrics.str();
  write_params(err, inv);
  write_actions(err, result);
  return result.partial ? kPartial : kComplete;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace nautilod::cli
