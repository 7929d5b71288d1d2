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

#ifndef VOCABLEAK_UTIL_H_
#define VOCABLEAK_UTIL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>

namespace vocableak {

// Counter-based seed derivation: the stream for (seed, purpose, index) does
// not depend on how many other streams were drawn before it.
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view purpose,
                         std::uint64_t index = 0);

inline std::mt19937_64 MakeRng(std::uint64_t seed, std::string_view purpose,
                               std::uint64_t index = 0) {
  return std::mt19937_64(DeriveSeed(seed, purpose, index));
}

std::string Base64Encode(std::string_view bytes);
// Returns nullopt on malformed input.
std::optional<std::string> Base64Decode(std::string_view text);

// Lowercase hex SHA-256.
std::string Sha256Hex(std::string_view bytes);

// Incremental SHA-256; fields are length-prefixed so that concatenation
// boundaries are part of the digest.
class Hasher {
 public:
  Hasher();
  ~Hasher();
  Hasher(const Hasher&) = delete;
  Hasher& operator=(const Hasher&) = delete;

  Hasher& Add(std::string_view field);
  Hasher& Add(std::uint64_t value);
  std::string HexDigest();

 private:
  void* ctx_;
};

std::string ReadFile(const std::filesystem::path& path);
// Writes via a temporary file and rename so readers never see partial output.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view contents);

// Shortest round-trippable decimal rendering of a double.
std::string FormatDouble(double value);

// Runs `body(i)` for i in [0, n) on up to `threads` workers. Each index runs
// exactly once; the first exception is rethrown after all workers join.
void ParallelFor(std::size_t n, unsigned threads,
                 const std::function<void(std::size_t)>& body);

unsigned DefaultThreadCount();

}  // namespace vocableak

#endif  // VOCABLEAK_UTIL_H_
