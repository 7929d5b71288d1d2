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

#include "vocableak/counts.h"

#include <numeric>

#include "vocableak/util.h"

namespace vocableak {

std::int64_t TokenCounts::count(const Vocabulary& vocab,
                                std::string_view token) const {
  auto id = vocab.find(token);
  return id ? (*this)[*id] : 0;
}

TokenCounts& TokenCounts::operator+=(const TokenCounts& other) {
  if (other.counts_.size() > counts_.size()) counts_.resize(other.counts_.size(), 0);
  for (std::size_t i = 0; i < other.counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

std::int64_t TokenCounts::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

TokenCounts CountTokens(const Dataset& dataset, const Vocabulary& vocab) {
  TokenCounts out(vocab.size());
  for (const auto& doc : dataset.documents) {
    for (TokenId id : Encode(vocab, doc)) out.Add(id);
  }
  return out;
}

TokenCounts WithConstituents(const TokenCounts& emitted,
                             const Vocabulary& vocab) {
  TokenCounts out(vocab.size());
  out += emitted;
  // Children always have smaller ids than their parent.
  for (std::size_t id = vocab.size(); id-- > kByteAlphabetSize;) {
    const std::int64_t n = out[static_cast<TokenId>(id)];
    if (n == 0) continue;
    const MergePair& m = vocab.merges()[id - kByteAlphabetSize];
    out.Add(m.left, n);
    out.Add(m.right, n);
  }
  return out;
}

CountTable::CountTable(const Vocabulary& vocab, const Corpus& corpus)
    : vocab_(&vocab),
      corpus_(&corpus),
      slots_(std::make_unique<Slot[]>(corpus.size())) {}

const TokenCounts& CountTable::counts(std::size_t dataset_index) const {
  Slot& slot = slots_[dataset_index];
  std::call_once(slot.once, [&] {
    slot.value = CountTokens((*corpus_)[dataset_index], *vocab_);
  });
  return *slot.value;
}

TokenCounts CountTable::Sum(const IdSet& ids) const {
  TokenCounts out(vocab_->size());
  for (const auto& id : ids) out += counts(id);
  return out;
}

void CountTable::Precompute(unsigned threads) const {
  ParallelFor(corpus_->size(), threads, [&](std::size_t i) { counts(i); });
}

}  // namespace vocableak
