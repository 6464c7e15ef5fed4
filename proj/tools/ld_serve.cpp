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

// Serves a directory of N-Triples files as Linked Data: GET /x returns x or x.nt.

#include <csignal>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nautilod/static_server.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Static Linked Data server"};
  std::string host = "127.0.0.1";
  int port = 0;
  std::string root = ".";
  int delay = 0;
  app.add_option("--host", host, "address to bind");
  app.add_option("--port", port, "port (0 picks one)");
  app.add_option("--root", root, "directory to serve")->check(CLI::ExistingDirectory);
  app.add_option("--delay", delay, "milliseconds to wait before each response");
  CLI11_PARSE(app, argc, argv);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  try {
    nautilod::StaticServer server(host, root, port);
    server.set_delay(std::chrono::milliseconds(delay));
    server.on_request = [](const std::string& line) { std::cerr << line << std::endl; };
    std::cout << server.origin() << std::endl;
    int sig = 0;
    sigwait(&signals, &sig);
  } catch (const std::exception& e) {
    std::cerr << "ld_serve: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
