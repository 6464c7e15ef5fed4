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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nautilod {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Syntax errors carry a 1-based line and column (line is 1 for single-line
// inputs such as expressions and queries; column is the character offset).
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t line, std::size_t column)
      : Error(format(message, line, column)), message_(message), line_(line), column_(column) {}

  const std::string& message() const noexcept { return message_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& message, std::size_t line, std::size_t column) {
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
  }

  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

class BlankNodeError : public SyntaxError {
 public:
  BlankNodeError(std::size_t line, std::size_t column)
      : SyntaxError("blank nodes are not supported", line, column) {}
};

class UnknownPrefixError : public SyntaxError {
 public:
  UnknownPrefixError(const std::string& prefix, std::size_t line, std::size_t column)
      : SyntaxError("unknown prefix '" + prefix + ":'", line, column), prefix_(prefix) {}
  const std::string& prefix() const noexcept { return prefix_; }

 private:
  std::string prefix_;
};

class UnsupportedFeatureError : public SyntaxError {
 public:
  UnsupportedFeatureError(const std::string& feature, std::size_t line, std::size_t column)
      : SyntaxError("unsupported SPARQL feature: " + feature, line, column), feature_(feature) {}
  const std::string& feature() const noexcept { return feature_; }

 private:
  std::string feature_;
};

class UriError : public Error {
 public:
  using Error::Error;
};

class FixtureError : public Error {
 public:
  using Error::Error;
};

class AutomatonError : public Error {
 public:
  using Error::Error;
};

class ActionError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace nautilod
