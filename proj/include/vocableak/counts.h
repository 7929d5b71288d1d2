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

#ifndef VOCABLEAK_COUNTS_H_
#define VOCABLEAK_COUNTS_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "vocableak/bpe.h"
#include "vocableak/corpus.h"

namespace vocableak {

// Token occurrence counts under one vocabulary, indexed by token id.
class TokenCounts {
 public:
  TokenCounts() = default;
  explicit TokenCounts(std::size_t vocab_size) : counts_(vocab_size, 0) {}

  // Zero for ids the encoding never emitted (and for ids past the end).
  std::int64_t operator[](TokenId id) const {
    return id < counts_.size() ? counts_[id] : 0;
  }
  std::int64_t count(const Vocabulary& vocab, std::string_view token) const;

  void Add(TokenId id, std::int64_t n = 1) { counts_[id] += n; }
  TokenCounts& operator+=(const TokenCounts& other);

  std::size_t size() const { return counts_.size(); }
  std::int64_t total() const;
  std::span<const std::int64_t> values() const { return counts_; }

  friend bool operator==(const TokenCounts&, const TokenCounts&) = default;

 private:
  std::vector<std::int64_t> counts_;
};

// Counts the tokens emitted when each document of `dataset` is encoded.
TokenCounts CountTokens(const Dataset& dataset, const Vocabulary& vocab);

// Adds to every token the occurrences of tokens built from it, so that a
// token counts once per appearance anywhere in the merge trees of the
// encoding. Every merged token of a vocabulary has a non-zero constituent
// count on its own training data.
TokenCounts WithConstituents(const TokenCounts& emitted,
                             const Vocabulary& vocab);

// Lazily computed, shareable per-dataset counts for one (vocabulary, corpus)
// pair. Safe for concurrent readers.
class CountTable {
 public:
  CountTable(const Vocabulary& vocab, const Corpus& corpus);

  const Vocabulary& vocabulary() const { return *vocab_; }
  const Corpus& corpus() const { return *corpus_; }

  const TokenCounts& counts(std::size_t dataset_index) const;
  const TokenCounts& counts(std::string_view dataset_id) const {
    return counts(corpus_->index_of(dataset_id));
  }

  // Sum over a set of datasets.
  TokenCounts Sum(const IdSet& ids) const;

  // Fills the cache for all datasets using up to `threads` workers.
  void Precompute(unsigned threads) const;

 private:
  struct Slot {
    std::once_flag once;
    std::optional<TokenCounts> value;
  };

  const Vocabulary* vocab_;
  const Corpus* corpus_;
  std::unique_ptr<Slot[]> slots_;
};

}  // namespace vocableak

#endif  // VOCABLEAK_COUNTS_H_
