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

// Dataset-level membership signals against a published vocabulary.
//
// Shadow-based:
//   merge_similarity    1/2 + mean_in rho/4 - mean_out rho/4, rho = Spearman
//                       correlation of merge indices over shared tokens.
//   vocabulary_overlap  1/2 + mean_in J/2 - mean_out J/2, J = Jaccard index
//                       after removing tokens present in both the IN union
//                       and the OUT union.
// Count-based (auxiliary datasets only):
//   frequency_estimation  sigmoid(max_i RTF(D, t_i) * SI_lb(i)), i > x_min.
//   naive_bayes           1 - prod_{k latest merges} (1 - RTF(D, t)).
//   compression_rate      bytes per token of D under the target.

#ifndef VOCABLEAK_ATTACKS_H_
#define VOCABLEAK_ATTACKS_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "vocableak/bpe.h"
#include "vocableak/corpus.h"
#include "vocableak/counts.h"
#include "vocableak/powerlaw.h"
#include "vocableak/shadow.h"

namespace vocableak {

enum class AttackMethod {
  kMergeSimilarity,
  kVocabularyOverlap,
  kFrequencyEstimation,
  kNaiveBayes,
  kCompressionRate,
};

inline constexpr AttackMethod kAllMethods[] = {
    AttackMethod::kMergeSimilarity, AttackMethod::kVocabularyOverlap,
    AttackMethod::kFrequencyEstimation, AttackMethod::kNaiveBayes,
    AttackMethod::kCompressionRate};

std::string_view MethodName(AttackMethod method);
// Throws ArgumentError for unknown names.
AttackMethod ParseMethod(std::string_view name);

struct AttackSignal {
  DatasetId dataset_id;
  AttackMethod method;
  double score = 0.0;
  std::optional<bool> label;
};

using TokenSet = std::set<std::string>;

TokenSet TokensOf(const Vocabulary& vocab);

// --- Merge similarity -------------------------------------------------------

// Pearson correlation of average ranks. Throws ArgumentError on size mismatch
// or fewer than 2 points; returns 0 when either side is constant.
double SpearmanRho(std::span<const double> x, std::span<const double> y);

// Spearman correlation between the merge indices of the tokens shared by
// `shadow` and `target`. Throws InsufficientDataError below 3 shared tokens.
double MergeOrderCorrelation(const Vocabulary& shadow, const Vocabulary& target);

double MergeSimilarityFromRhos(std::span<const double> in_rhos,
                               std::span<const double> out_rhos);

double MergeSimilaritySignal(const Vocabulary& target,
                             const InOutPartition& part);

// --- Vocabulary overlap -----------------------------------------------------

// |A n B| / |A u B|, with J(empty, X) = 0 for every X.
double Jaccard(const TokenSet& a, const TokenSet& b);

// (union of IN vocabularies) n (union of OUT vocabularies).
TokenSet NondistinctiveTokens(std::span<const TokenSet> v_in,
                              std::span<const TokenSet> v_out);
TokenSet NondistinctiveTokens(const InOutPartition& part);

double VocabularyOverlapSignal(const TokenSet& target,
                               std::span<const TokenSet> v_in,
                               std::span<const TokenSet> v_out);
double VocabularyOverlapSignal(const Vocabulary& target,
                               const InOutPartition& part);

// Bitset form of the overlap and merge-similarity signals for scoring every
// dataset against one ensemble. Agrees exactly with the set-based functions.
class EnsembleScorer {
 public:
  EnsembleScorer(const Vocabulary& target, const ShadowEnsemble& ensemble);

  // Throws DegeneratePartitionError like PartitionInOut.
  double VocabularyOverlap(const DatasetId& dataset_id) const;
  double MergeSimilarity(const DatasetId& dataset_id) const;

  // Per-shadow Spearman correlation with the target.
  const std::vector<double>& rhos() const { return rhos_; }

 private:
  using Bits = boost::dynamic_bitset<std::uint64_t>;

  void Split(const DatasetId& id, std::vector<std::size_t>& in,
             std::vector<std::size_t>& out) const;

  const ShadowEnsemble* ensemble_;
  Bits target_;
  std::vector<Bits> shadows_;
  std::vector<double> rhos_;
};

// --- Count-based attacks ----------------------------------------------------

// Precomputes aux totals for one target vocabulary. `counts` must be a
// CountTable over the target vocabulary.
class FrequencyScorer {
 public:
  FrequencyScorer(const CountTable& counts, const AuxCollection& aux,
                  const PowerLawFit& fit);

  double Score(const DatasetId& dataset_id) const;
  double Score(const TokenCounts& dataset_counts, bool dataset_in_aux) const;

 private:
  const CountTable* counts_;
  IdSet aux_ids_;
  TokenCounts aux_total_;
  std::size_t first_candidate_;  // token id
  std::vector<double> si_;       // indexed by token id
};

class NaiveBayesScorer {
 public:
  // Throws ArgumentError if k is 0 or exceeds the number of merged tokens.
  NaiveBayesScorer(const CountTable& counts, const AuxCollection& aux,
                   std::size_t k);

  double Score(const DatasetId& dataset_id) const;
  double Score(const TokenCounts& dataset_counts, bool dataset_in_aux) const;

 private:
  const CountTable* counts_;
  IdSet aux_ids_;
  TokenCounts aux_total_;
  std::size_t first_rare_;  // token id
};

double FrequencyEstimationSignal(const Vocabulary& target, const Dataset& d,
                                 const AuxCollection& aux,
                                 const PowerLawFit& fit,
                                 const CountTable& counts);

double NaiveBayesSignal(const Vocabulary& target, const Dataset& d,
                        const AuxCollection& aux, std::size_t k,
                        const CountTable& counts);

// Documents are encoded independently; bytes and tokens are summed.
double CompressionRateSignal(const Vocabulary& target, const Dataset& d);

double Sigmoid(double x);

// --- Signals file -----------------------------------------------------------

// Tab-separated with a header row: dataset_id, method, score, label (0/1 or
// empty).
void WriteSignals(const std::vector<AttackSignal>& signals,
                  const std::filesystem::path& path);
std::vector<AttackSignal> ReadSignals(const std::filesystem::path& path);

}  // namespace vocableak

#endif  // VOCABLEAK_ATTACKS_H_
