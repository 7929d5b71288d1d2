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

#include "vocableak/defense.h"

#include "json.hpp"
#include "vocableak/errors.h"
#include "vocableak/util.h"

namespace vocableak {
TokenCounts MemberCounts(const Vocabulary& vocab,
                         std::span<const Dataset* const> datasets) {
  TokenCounts emitted(vocab.size());
  for (const Dataset* d : datasets) emitted += CountTokens(*d, vocab);
  return WithConstituents(emitted, vocab);
}

DefenseResult MinCountFilter(const Vocabulary& vocab,
                             const TokenCounts& member_counts,
                             const DefenseConfig& config) {
  if (config.n_min < 1) throw ArgumentError("n_min must be at least 1");
  DefenseResult result;
  result.n_min = config.n_min;
  Vocabulary& out = result.vocabulary;
  for (std::size_t id = kByteAlphabetSize; id < vocab.size(); ++id) {
    const auto t = static_cast<TokenId>(id);
    if (member_counts[t] < config.n_min) {
      ++result.removed_count;
      continue;
    }
    const MergePair& m = vocab.merges()[id - kByteAlphabetSize];
    auto l = out.find(vocab.token(m.left));
    auto r = out.find(vocab.token(m.right));
    if (!l || !r) {
      ++result.removed_count;
      continue;
    }
    out.AddMerge(*l, *r);
  }
  return result;
}

std::filesystem::path DefenseSidecarPath(const std::filesystem::path& vocab_path) {
  std::filesystem::path p = vocab_path;
  p += ".defense.json";
  return p;
}

void SaveDefenseResult(const DefenseResult& result,
                       const std::filesystem::path& vocab_path) {
  SaveVocabulary(result.vocabulary, vocab_path);
  nlohmann::json j = {{"n_min", result.n_min},
                      {"removed_count", result.removed_count}};
  WriteFileAtomic(DefenseSidecarPath(vocab_path), j.dump(2) + "\n");
}

}  // namespace vocableak
