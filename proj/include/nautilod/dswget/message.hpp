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

// Dswget messages and their textual wire envelope:
//
//   DSWGET/1 <KIND> <requestId> <clientId>\n
//   <expression>\n
//   <FIELD>\t<value>...\n        zero or more
//   END\n
//
// See docs/dswget-protocol.md for the field list.

#pragma once

#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nautilod/actions.hpp"
#include "nautilod/automaton.hpp"
#include "nautilod/error.hpp"
#include "nautilod/ntriples.hpp"
#include "nautilod/rdf.hpp"

namespace nautilod::dswget {

inline constexpr std::size_t kMaxMessageBytes = 4 * 1024 * 1024;

enum class MessageKind { delegate, result, progress };

inline const char* to_string(MessageKind k) {
  switch (k) {
    case MessageKind::delegate: return "DELEGATE";
    case MessageKind::result: return "RESULT";
    case MessageKind::progress: return "PROGRESS";
  }
  return "?";
}

struct DswgetMessage {
  MessageKind kind = MessageKind::delegate;
  std::string request_id;
  std::string client_id;
  std::string expression;  // canonical form; empty on RESULT and PROGRESS

  // DELEGATE: id of this delegation. RESULT/PROGRESS: the delegation handled.
  std::string delegation;
  std::string engine;  // RESULT/PROGRESS: sender

  std::vector<std::pair<Uri, State>> pairs;  // DELEGATE
  std::set<Term> results;                    // RESULT
  std::vector<ActionRecord> actions;         // RESULT

  // PROGRESS
  std::vector<std::pair<std::string, std::string>> spawned;  // (delegation id, destination host)
  std::vector<std::string> unreachable;
  std::set<State> states;
  bool result_sent = false;
  bool ok = true;
  std::string error;
};

namespace detail {

inline std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '\\') out += "\\\\";
    else if (c == '\t') out += "\\t";
    else if (c == '\n') out += "\\n";
    else if (c == '\r') out += "\\r";
    else out += c;
  }
  return out;
}

inline std::string unescape(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out += s[i];
      continue;
    }
    const char c = s[++i];
    out += c == 't' ? '\t' : c == 'n' ? '\n' : c == 'r' ? '\r' : c;
  }
  return out;
}

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) return out;
    start = tab + 1;
  }
}

inline std::size_t to_size(std::string_view s, const std::string& what) {
  if (s.empty()) throw ProtocolError("empty " + what);
  std::size_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw ProtocolError("bad " + what + ": " + std::string(s));
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  return v;
}

inline bool is_token(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') return false;
  return true;
}

}  // namespace detail

inline std::string encode(const DswgetMessage& m) {
  if (!detail::is_token(m.request_id) || !detail::is_token(m.client_id))
    throw ProtocolError("request and client ids must be non-empty and contain no whitespace");
  if (m.expression.find('\n') != std::string::npos) throw ProtocolError("expression must be a single line");
  std::ostringstream os;
  os << "DSWGET/1 " << to_string(m.kind) << ' ' << m.request_id << ' ' << m.client_id << '\n' << m.expression << '\n';
  if (!m.delegation.empty()) os << "DELEGATION\t" << detail::escape(m.delegation) << '\n';
  if (!m.engine.empty()) os << "ENGINE\t" << detail::escape(m.engine) << '\n';
  for (const auto& [u, q] : m.pairs) os << "PAIR\t" << q << '\t' << to_ntriples(u) << '\n';
  for (const auto& t : m.results) os << "TERM\t" << to_ntriples(t) << '\n';
  for (const auto& a : m.actions) {
    os << "ACTION\t" << a.occurrence << '\t' << detail::escape(a.procedure) << '\t' << to_ntriples(a.target) << '\t'
       << (a.ok ? "ok" : "failed") << '\t' << detail::escape(a.failure) << '\t' << a.params.size() << '\n';
    for (std::size_t i = 0; i < a.params.size(); ++i)
      for (const auto& [var, value] : a.params[i])
        os << "PARAM\t" << i << '\t' << detail::escape(var) << '\t' << to_ntriples(value) << '\n';
  }
  for (const auto& [id, host] : m.spawned) os << "SPAWNED\t" << detail::escape(id) << '\t' << detail::escape(host) << '\n';
  for (const auto& host : m.unreachable) os << "UNREACHABLE\t" << detail::escape(host) << '\n';
  if (m.kind == MessageKind::progress) {
    os << "STATES";
    for (State q : m.states) os << '\t' << q;
    os << '\n';
    os << "RESULTS\t" << (m.result_sent ? 1 : 0) << '\n';
    os << "STATUS\t" << (m.ok ? "done" : "error") << '\n';
  }
  if (!m.error.empty()) os << "ERROR\t" << detail::escape(m.error) << '\n';
  os << "END\n";
  std::string out = os.str();
  if (out.size() > kMaxMessageBytes) throw ProtocolError("message exceeds the size limit");
  return out;
}

inline DswgetMessage decode(std::string_view text) {
  if (text.size() > kMaxMessageBytes) throw ProtocolError("message exceeds the size limit");
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) throw ProtocolError("unterminated line");
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  if (lines.size() < 3 || lines.back() != "END") throw ProtocolError("missing END");

  DswgetMessage m;
  {
    std::istringstream header{std::string(lines[0])};
    std::string magic, kind, extra;
    header >> magic >> kind >> m.request_id >> m.client_id;
    if (magic != "DSWGET/1") throw ProtocolError("bad magic '" + magic + "'");
    if (m.client_id.empty() || (header >> extra)) throw ProtocolError("malformed header");
    if (kind == "DELEGATE") m.kind = MessageKind::delegate;
    else if (kind == "RESULT") m.kind = MessageKind::result;
    else if (kind == "PROGRESS") m.kind = MessageKind::progress;
    else throw ProtocolError("unknown message kind '" + kind + "'");
  }
  m.expression = std::string(lines[1]);

  for (std::size_t i = 2; i + 1 < lines.size(); ++i) {
    const auto f = detail::split_tabs(lines[i]);
    const std::string_view field = f[0];
    auto need = [&](std::size_t n) {
      if (f.size() != n) throw ProtocolError("wrong arity for " + std::string(field));
    };
    try {
      if (field == "DELEGATION") {
        need(2);
        m.delegation = detail::unescape(f[1]);
      } else if (field == "ENGINE") {
        need(2);
        m.engine = detail::unescape(f[1]);
      } else if (field == "PAIR") {
        need(3);
        const Term t = parse_ntriples_term(f[2]);
        if (!is_uri(t)) throw ProtocolError("PAIR needs a URI");
        m.pairs.emplace_back(*as_uri(t), detail::to_size(f[1], "state"));
      } else if (field == "TERM") {
        need(2);
        m.results.insert(parse_ntriples_term(f[1]));
      } else if (field == "ACTION") {
        need(7);
        const Term target = parse_ntriples_term(f[3]);
        if (!is_uri(target)) throw ProtocolError("ACTION target must be a URI");
        ActionRecord a{detail::unescape(f[2]), detail::to_size(f[1], "occurrence"), *as_uri(target)};
        a.ok = f[4] == "ok";
        a.failure = detail::unescape(f[5]);
        a.params.resize(detail::to_size(f[6], "binding count"));
        m.actions.push_back(std::move(a));
      } else if (field == "PARAM") {
        need(4);
        if (m.actions.empty()) throw ProtocolError("PARAM before ACTION");
        auto& params = m.actions.back().params;
        const std::size_t index = detail::to_size(f[1], "binding index");
        if (index >= params.size()) throw ProtocolError("PARAM binding index out of range");
        params[index].emplace(detail::unescape(f[2]), parse_ntriples_term(f[3]));
      } else if (field == "SPAWNED") {
        need(3);
        m.spawned.emplace_back(detail::unescape(f[1]), detail::unescape(f[2]));
      } else if (field == "UNREACHABLE") {
        need(2);
        m.unreachable.push_back(detail::unescape(f[1]));
      } else if (field == "STATES") {
        for (std::size_t k = 1; k < f.size(); ++k) m.states.insert(detail::to_size(f[k], "state"));
      } else if (field == "RESULTS") {
        need(2);
        m.result_sent = f[1] == "1";
      } else if (field == "STATUS") {
        need(2);
        m.ok = f[1] == "done";
      } else if (field == "ERROR") {
        need(2);
        m.error = detail::unescape(f[1]);
      } else {
        throw ProtocolError("unknown field '" + std::string(field) + "'");
      }
    } catch (const SyntaxError& e) {
      throw ProtocolError("line " + std::to_string(i + 1) + ": " + e.what());
    } catch (const UriError& e) {
      throw ProtocolError("line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return m;
}

}  // namespace nautilod::dswget
