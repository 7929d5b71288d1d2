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

// Comparing published vocabularies: Jaccard similarity and mean absolute
// merge-index difference over the first `limit` tokens of each.

#ifndef VOCABLEAK_FORENSICS_H_
#define VOCABLEAK_FORENSICS_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vocableak/bpe.h"

namespace vocableak {

struct ExternalVocab {
  std::string name;
  // Position i (0-based) has merge index i + 1.
  std::vector<std::string> tokens;

  friend bool operator==(const ExternalVocab&, const ExternalVocab&) = default;
};

enum class VocabFormat {
  kBase64Lines,     // one base64 token per line, in rank order
  kTokenRankPairs,  // "<base64 token> <rank>" per line, ranks increasing
};

// "base64_lines" or "token_rank_pairs". Throws ArgumentError otherwise.
VocabFormat ParseVocabFormat(std::string_view name);

// Name defaults to the file stem. Throws ParseError naming the line on bad
// base64, a duplicate token or a rank that does not increase.
ExternalVocab ImportExternal(const std::filesystem::path& path, VocabFormat format,
                             std::string name = {});
ExternalVocab ParseExternal(std::string_view contents, VocabFormat format,
                            std::string name);

ExternalVocab FromVocabulary(const Vocabulary& vocab, std::string name);

double JaccardSimilarity(const ExternalVocab& a, const ExternalVocab& b,
                         std::size_t limit);

// Throws InsufficientDataError when the truncated vocabularies share nothing.
double MergeIndexDivergence(const ExternalVocab& a, const ExternalVocab& b,
                            std::size_t limit);

struct ComparisonMatrices {
  std::vector<std::string> names;
  std::vector<std::vector<double>> jaccard;
  // NaN where the pair shares no token.
  std::vector<std::vector<double>> divergence;
};

ComparisonMatrices CompareAll(const std::vector<ExternalVocab>& vocabs,
                              std::size_t limit, unsigned threads = 1);

// Square tab-separated matrix with a header row and a name column.
std::string MatrixTsv(const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& values);

}  // namespace vocableak

#endif  // VOCABLEAK_FORENSICS_H_
