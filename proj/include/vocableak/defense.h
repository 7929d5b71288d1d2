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

// Min count mechanism: drop merged tokens whose count in the defender's own
// training data is below n_min before publishing the vocabulary.

#ifndef VOCABLEAK_DEFENSE_H_
#define VOCABLEAK_DEFENSE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "vocableak/bpe.h"
#include "vocableak/corpus.h"
#include "vocableak/counts.h"

namespace vocableak {

struct DefenseConfig {
  std::int64_t n_min = 1;
};

struct DefenseResult {
  Vocabulary vocabulary;
  std::int64_t n_min = 1;
  std::size_t removed_count = 0;
};

// Training-data counts of every token of `vocab`, where an emitted token also
// counts toward the two tokens it was merged from (recursively). Every merged
// token of a vocabulary trained on `datasets` gets a count of at least 1.
TokenCounts MemberCounts(const Vocabulary& vocab,
                         std::span<const Dataset* const> datasets);

// Keeps the byte alphabet and the merged tokens with count >= n_min, in their
// original relative order. A token whose merge inputs were dropped is dropped
// too, so encoding falls back to finer tokens. Throws ArgumentError for
// n_min < 1.
DefenseResult MinCountFilter(const Vocabulary& vocab,
                             const TokenCounts& member_counts,
                             const DefenseConfig& config);

// "<vocab>.defense.json" with {n_min, removed_count}.
std::filesystem::path DefenseSidecarPath(const std::filesystem::path& vocab_path);
void SaveDefenseResult(const DefenseResult& result,
                       const std::filesystem::path& vocab_path);

}  // namespace vocableak

#endif  // VOCABLEAK_DEFENSE_H_
