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

// A Dswget engine listening on TCP and serving one fixture store.

#include <csignal>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nautilod/actions.hpp"
#include "nautilod/dswget/tcp.hpp"
#include "nautilod/prefixes.hpp"
#include "nautilod/web.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Dswget engine"};
  std::vector<std::string> hosts;
  std::string listen = "127.0.0.1:0";
  std::string fixture;
  std::vector<std::string> peers;
  std::string prefix_file;
  app.add_option("--host", hosts, "host this engine owns (repeatable)")->required();
  app.add_option("--listen", listen, "ip:port to listen on");
  app.add_option("--fixture", fixture, "fixture manifest with the local descriptions")->required();
  app.add_option("--peer", peers, "host=tcp://ip:port of another engine (repeatable)");
  app.add_option("--prefixes", prefix_file, "extra prefix file");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto colon = listen.rfind(':');
    if (colon == std::string::npos) throw nautilod::Error("--listen expects ip:port");
    std::map<std::string, std::string> peer_map;
    for (const auto& p : peers) {
      const auto eq = p.find('=');
      if (eq == std::string::npos) throw nautilod::Error("--peer expects host=tcp://ip:port");
      peer_map[p.substr(0, eq)] = p.substr(eq + 1);
    }
    const auto prefixes =
        prefix_file.empty() ? nautilod::default_prefixes() : nautilod::load_prefix_file(prefix_file);
    static const auto actions = nautilod::builtin_actions();
    auto engine = std::make_shared<nautilod::dswget::Engine>(
        hosts.front(), std::set<std::string>(hosts.begin(), hosts.end()), nautilod::load_fixture_web(fixture),
        &actions, std::function<bool(const std::string&)>{}, prefixes);

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    nautilod::dswget::TcpEngineNode node(engine, listen.substr(0, colon), std::stoi(listen.substr(colon + 1)),
                                         peer_map);
    for (const auto& h : hosts) node.set_peer(h, node.address());
    std::cout << node.address() << std::endl;

    int sig = 0;
    sigwait(&signals, &sig);
    node.stop();
    const auto c = engine->counters();
    std::cerr << "messages=" << c.messages_handled << " pairs=" << c.pairs_processed
              << " delegates=" << c.delegates_sent << " results=" << c.results_sent << '\n';
  } catch (const std::exception& e) {
    std::cerr << "dswget_engine: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
