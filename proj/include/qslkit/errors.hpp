// Copyright 2026 The qslkit Authors
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

namespace qslkit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands whose shapes do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A scalar argument outside its admissible range (lambda, theta, N, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Integration blow-up, non-convergence or another numerical failure.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A malformed model, state or report file.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Operator-expression syntax or evaluation error, with the offending source span.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t begin, std::size_t end)
      : Error(message + " at column " + std::to_string(begin + 1)),
        begin_(begin),
        end_(end) {}

  std::size_t begin() const noexcept { return begin_; }
  std::size_t end() const noexcept { return end_; }

 private:
  std::size_t begin_;
  std::size_t end_;
};

}  // namespace qslkit
