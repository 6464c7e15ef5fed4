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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "nautilod/error.hpp"
#include "nautilod/expr.hpp"
#include "nautilod/query.hpp"
#include "nautilod/rdf.hpp"
#include "nautilod/web.hpp"

namespace nautilod {

struct ActionRecord {
  std::string procedure;
  std::size_t occurrence = 0;
  Uri target;
  std::vector<Binding> params;
  bool ok = true;
  std::string failure;
};

/// What an action implementation sees. There is deliberately no handle on
/// the navigation frontier.
struct ActionContext {
  const Uri& target;
  const ActionSpec& spec;
  const std::vector<Binding>& params;
  WebInstance* web = nullptr;
  GraphStore* store = nullptr;
};

using ActionFn = std::function<void(const ActionContext&)>;

class ActionRegistry {
 public:
  void register_action(const std::string& name, ActionFn fn) {
    if (name.empty()) throw ActionError("action name must not be empty");
    if (!actions_.emplace(name, std::move(fn)).second) throw ActionError("action '" + name + "' already registered");
  }

  bool contains(const std::string& name) const { return actions_.count(name) != 0; }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [n, _] : actions_) out.push_back(n);
    return out;
  }

  // Throws ActionError naming the first unregistered procedure in `e`.
  void validate(const PathExpr& e) const {
    preorder(e, [this](const PathNode& n) {
      if (n.kind == ExprKind::action && !contains(n.action->procedure))
        throw ActionError("unknown action '" + n.action->procedure + "'");
    });
  }

  // Failures are reported through the returned record, never thrown.
  ActionRecord invoke(std::size_t occurrence, const ActionSpec& spec, const Uri& target, std::vector<Binding> params,
                      WebInstance* web = nullptr, GraphStore* store = nullptr) const {
    ActionRecord record{spec.procedure, occurrence, target, std::move(params)};
    auto it = actions_.find(spec.procedure);
    if (it == actions_.end()) {
      record.ok = false;
      record.failure = "unknown action";
      return record;
    }
    try {
      it->second(ActionContext{target, spec, record.params, web, store});
    } catch (const std::exception& e) {
      record.ok = false;
      record.failure = e.what();
    }
    return record;
  }

 private:
  std::map<std::string, ActionFn> actions_;
};

/// Output locations of the built-in actions.
struct ActionSinks {
  std::filesystem::path outbox = "swget-outbox.txt";
  std::filesystem::path save_file = "swget-saved.nt";

  static ActionSinks from_env() {
    ActionSinks s;
    if (const char* v = std::getenv("SWGET_OUTBOX")) s.outbox = v;
    if (const char* v = std::getenv("SWGET_SAVE_FILE")) s.save_file = v;
    return s;
  }
};

inline const std::string kBindingPredicateBase = "urn:x-nautilod:binding:";

namespace detail {

inline std::vector<std::string> argument_names(const ActionContext& ctx) {
  return ctx.spec.arguments.empty() ? ctx.spec.params.projection : ctx.spec.arguments;
}

inline void append_line(std::mutex& m, const std::filesystem::path& path, const std::string& text) {
  std::lock_guard lock(m);
  std::ofstream out(path, std::ios::app);
  if (!out) throw ActionError("cannot write " + path.string());
  out << text;
}

}  // namespace detail

/// collect, save, outboxNotify (alias sendEmail) and getGraph.
inline ActionRegistry builtin_actions(const ActionSinks& sinks = ActionSinks::from_env()) {
  ActionRegistry r;
  auto lock = std::make_shared<std::mutex>();

  r.register_action("collect", [](const ActionContext&) {});

  r.register_action("save", [lock, path = sinks.save_file](const ActionContext& ctx) {
    std::string text;
    for (const auto& b : ctx.params)
      for (const auto& name : detail::argument_names(ctx))
        if (auto it = b.find(name); it != b.end())
          text += to_ntriples(ctx.target) + " <" + kBindingPredicateBase + name + "> " + to_ntriples(it->second) + " .\n";
    detail::append_line(*lock, path, text);
  });

  auto notify = [lock, path = sinks.outbox](const ActionContext& ctx) {
    std::string text;
    for (const auto& b : ctx.params) {
      text += ctx.spec.procedure + "\t" + to_ntriples(ctx.target);
      for (const auto& name : detail::argument_names(ctx)) {
        auto it = b.find(name);
        text += "\t?" + name + "=" + (it == b.end() ? std::string() : to_ntriples(it->second));
      }
      text += "\n";
    }
    detail::append_line(*lock, path, text);
  };
  r.register_action("outboxNotify", notify);
  r.register_action("sendEmail", notify);

  r.register_action("getGraph", [](const ActionContext& ctx) {
    if (!ctx.store || !ctx.web) throw ActionError("getGraph needs -saveGraph");
    for (const auto& b : ctx.params)
      for (const auto& name : detail::argument_names(ctx))
        if (auto it = b.find(name); it != b.end())
          if (const Uri* u = as_uri(it->second)) ctx.store->save(*resolve(*ctx.web, *u));
  });
  return r;
}

}  // namespace nautilod
