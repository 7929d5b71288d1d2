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

// Byte-level BPE: training, encoding and the on-disk vocabulary format.
//
// Token ids are 0-based; the merge index (vocabulary position) of a token is
// id + 1. Ids 0..255 are the single bytes in byte order and id 256 + k is the
// output of the k-th merge (0-based k).

#ifndef VOCABLEAK_BPE_H_
#define VOCABLEAK_BPE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vocableak/corpus.h"

namespace vocableak {

using TokenId = std::uint32_t;
using Encoding = std::vector<TokenId>;

inline constexpr std::size_t kByteAlphabetSize = 256;

struct MergePair {
  TokenId left;
  TokenId right;

  friend bool operator==(const MergePair&, const MergePair&) = default;
};

class Vocabulary {
 public:
  // The 256-byte alphabet with no merges.
  Vocabulary();

  std::size_t size() const { return tokens_.size(); }
  std::size_t num_merges() const { return merges_.size(); }

  const std::string& token(TokenId id) const { return tokens_[id]; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::vector<MergePair>& merges() const { return merges_; }

  static std::size_t position(TokenId id) { return std::size_t{id} + 1; }
  static bool is_merged(TokenId id) { return id >= kByteAlphabetSize; }

  std::optional<TokenId> find(std::string_view bytes) const;
  bool contains(std::string_view bytes) const { return find(bytes).has_value(); }

  // 0-based merge rank of the pair, if it is a merge rule.
  std::optional<std::size_t> merge_rank(TokenId left, TokenId right) const;

  // Appends the merge (left, right) and returns the new token's id. Throws
  // ArgumentError if either id is unknown or the concatenation is already a
  // token.
  TokenId AddMerge(TokenId left, TokenId right);

  // Set by the trainer when no pair was left to merge before reaching the
  // requested size. Not persisted.
  bool exhausted() const { return exhausted_; }
  void set_exhausted(bool value) { exhausted_ = value; }

  // Structural equality: same tokens and merges in the same order.
  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_ && a.merges_ == b.merges_;
  }

 private:
  static std::uint64_t PairKey(TokenId l, TokenId r) {
    return (std::uint64_t{l} << 32) | r;
  }

  std::vector<std::string> tokens_;
  std::vector<MergePair> merges_;
  std::unordered_map<std::string, TokenId> index_;
  std::unordered_map<std::uint64_t, std::uint32_t> rank_;
  bool exhausted_ = false;
};

// Splits a document into chunks; pairs never straddle chunk boundaries. The
// default (empty function) treats each document as a single chunk.
using Pretokenizer =
    std::function<std::vector<std::string_view>(std::string_view)>;

struct TrainOptions {
  Pretokenizer pretokenizer;
};

// Trains a vocabulary of `vocab_size` tokens. Each iteration merges the most
// frequent adjacent pair (counted within documents, overlapping occurrences
// included); ties go to the lexicographically smallest (left id, right id).
// A pair whose concatenation is already a token is never merged. If pairs run
// out early the shorter vocabulary is returned with exhausted() set.
Vocabulary TrainBpe(std::span<const Dataset* const> datasets,
                    std::size_t vocab_size, const TrainOptions& options = {});
Vocabulary TrainBpe(const std::vector<Dataset>& datasets,
                    std::size_t vocab_size, const TrainOptions& options = {});

// Starts from single bytes and repeatedly applies the applicable merge with
// the smallest rank (leftmost first among equal ranks).
Encoding Encode(const Vocabulary& vocab, std::string_view text,
                const Pretokenizer& pretokenizer = {});

std::string Decode(const Vocabulary& vocab, std::span<const TokenId> ids);

// UTF-8 bytes over emitted tokens. Throws ArgumentError on empty text.
double BytesPerToken(const Vocabulary& vocab, std::string_view text);

// Native format: one base64 token per line in position order, and a sibling
// "<path>.merges" file with "base64(left) base64(right)" per merge.
void SaveVocabulary(const Vocabulary& vocab, const std::filesystem::path& path);
Vocabulary LoadVocabulary(const std::filesystem::path& path);
std::filesystem::path MergesPath(const std::filesystem::path& vocab_path);

// Canonical digest of the token list and merges.
std::string VocabularyFingerprint(const Vocabulary& vocab);

}  // namespace vocableak

#endif  // VOCABLEAK_BPE_H_
