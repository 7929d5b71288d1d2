// Copyright 2026 The VocabLeak Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VOCABLEAK_ERRORS_H_
#define VOCABLEAK_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vocableak {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument or precondition violation.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. `line()` is 1-based, 0 when not line-specific.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& what)
      : Error(source + (line > 0 ? ":" + std::to_string(line) : "") + ": " +
              what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptyCorpusError : public Error {
 public:
  using Error::Error;
};

// Not enough data for an estimator (power-law fit, token overlap).
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// An estimator produced an invalid parameter (e.g. a non-positive exponent).
class FitError : public Error {
 public:
  using Error::Error;
};

// A target dataset fell into every shadow or into none of them.
class DegeneratePartitionError : public Error {
 public:
  using Error::Error;
};

}  // namespace vocableak

#endif  // VOCABLEAK_ERRORS_H_
