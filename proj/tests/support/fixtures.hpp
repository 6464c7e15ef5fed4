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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "nautilod/expr.hpp"
#include "nautilod/prefixes.hpp"
#include "nautilod/web.hpp"

#ifndef NAUTILOD_FIXTURE_DIR
#error "NAUTILOD_FIXTURE_DIR must point at the fixtures directory"
#endif

namespace nautilod::testing {

inline std::filesystem::path fixture(const std::string& rel) { return std::filesystem::path(NAUTILOD_FIXTURE_DIR) / rel; }

inline const PrefixMap& prefixes() {
  static const PrefixMap map = load_prefix_file(fixture("prefixes.txt"));
  return map;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline PathExpr expression_file(const std::string& rel) {
  return parse(expression_file_text(read_file(fixture(rel))), prefixes());
}

inline Uri curie(const std::string& text) {
  const auto colon = text.find(':');
  return Uri(prefixes().at(text.substr(0, colon)) + text.substr(colon + 1));
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("nautilod-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

  void write(const std::string& rel, const std::string& text) const {
    std::filesystem::create_directories((path_ / rel).parent_path());
    std::ofstream(path_ / rel) << text;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace nautilod::testing
