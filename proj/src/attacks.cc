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

#include "vocableak/attacks.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "vocableak/errors.h"
#include "vocableak/util.h"

namespace vocableak {
namespace {

// 1/2 + sum_in / (scale |in|) - sum_out / (scale |out|).
double CenteredContrast(double sum_in, std::size_t n_in, double sum_out,
                        std::size_t n_out, double scale) {
  return 0.5 + sum_in / (scale * static_cast<double>(n_in)) -
         sum_out / (scale * static_cast<double>(n_out));
}

std::vector<double> AverageRanks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

void RequireNonDegenerate(std::size_t n_in, std::size_t n_out) {
  if (n_in == 0 || n_out == 0) {
    throw DegeneratePartitionError("IN and OUT shadow sets must be non-empty");
  }
}

std::vector<TokenSet> ToSets(const std::vector<const Vocabulary*>& vocabs) {
  std::vector<TokenSet> out;
  out.reserve(vocabs.size());
  for (const Vocabulary* v : vocabs) out.push_back(TokensOf(*v));
  return out;
}

}  // namespace

std::string_view MethodName(AttackMethod method) {
  switch (method) {
    case AttackMethod::kMergeSimilarity: return "merge_similarity";
    case AttackMethod::kVocabularyOverlap: return "vocabulary_overlap";
    case AttackMethod::kFrequencyEstimation: return "frequency_estimation";
    case AttackMethod::kNaiveBayes: return "naive_bayes";
    case AttackMethod::kCompressionRate: return "compression_rate";
  }
  return "unknown";
}

AttackMethod ParseMethod(std::string_view name) {
  for (AttackMethod m : kAllMethods) {
    if (MethodName(m) == name) return m;
  }
  throw ArgumentError("unknown attack method '" + std::string(name) + "'");
}

TokenSet TokensOf(const Vocabulary& vocab) {
  return TokenSet(vocab.tokens().begin(), vocab.tokens().end());
}

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// --- Merge similarity -------------------------------------------------------

double SpearmanRho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("rank vectors differ in length");
  if (x.size() < 2) throw ArgumentError("Spearman needs at least 2 points");
  const auto rx = AverageRanks(x);
  const auto ry = AverageRanks(y);
  const double mean = (static_cast<double>(x.size()) + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double MergeOrderCorrelation(const Vocabulary& shadow, const Vocabulary& target) {
  std::vector<double> a, b;
  for (std::size_t id = 0; id < shadow.size(); ++id) {
    if (auto t = target.find(shadow.token(static_cast<TokenId>(id)))) {
      a.push_back(static_cast<double>(Vocabulary::position(static_cast<TokenId>(id))));
      b.push_back(static_cast<double>(Vocabulary::position(*t)));
    }
  }
  if (a.size() < 3) {
    throw InsufficientDataError("shadow shares " + std::to_string(a.size()) +
                                " tokens with the target; need 3");
  }
  return SpearmanRho(a, b);
}

double MergeSimilarityFromRhos(std::span<const double> in_rhos,
                               std::span<const double> out_rhos) {
  RequireNonDegenerate(in_rhos.size(), out_rhos.size());
  double sum_in = 0.0, sum_out = 0.0;
  for (double r : in_rhos) sum_in += r;
  for (double r : out_rhos) sum_out += r;
  return CenteredContrast(sum_in, in_rhos.size(), sum_out, out_rhos.size(), 4.0);
}

double MergeSimilaritySignal(const Vocabulary& target,
                             const InOutPartition& part) {
  std::vector<double> in, out;
  for (const Vocabulary* v : part.v_in) in.push_back(MergeOrderCorrelation(*v, target));
  for (const Vocabulary* v : part.v_out) out.push_back(MergeOrderCorrelation(*v, target));
  return MergeSimilarityFromRhos(in, out);
}

// --- Vocabulary overlap -----------------------------------------------------

double Jaccard(const TokenSet& a, const TokenSet& b) {
  if (a.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& t : a) inter += b.count(t);
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

TokenSet NondistinctiveTokens(std::span<const TokenSet> v_in,
                              std::span<const TokenSet> v_out) {
  TokenSet in_union, out_union;
  for (const auto& s : v_in) in_union.insert(s.begin(), s.end());
  for (const auto& s : v_out) out_union.insert(s.begin(), s.end());
  TokenSet out;
  std::set_intersection(in_union.begin(), in_union.end(), out_union.begin(),
                        out_union.end(), std::inserter(out, out.end()));
  return out;
}

TokenSet NondistinctiveTokens(const InOutPartition& part) {
  const auto in = ToSets(part.v_in);
  const auto out = ToSets(part.v_out);
  return NondistinctiveTokens(in, out);
}

double VocabularyOverlapSignal(const TokenSet& target,
                               std::span<const TokenSet> v_in,
                               std::span<const TokenSet> v_out) {
  RequireNonDegenerate(v_in.size(), v_out.size());
  const TokenSet non = NondistinctiveTokens(v_in, v_out);
  auto residue = [&](const TokenSet& s) {
    TokenSet r;
    std::set_difference(s.begin(), s.end(), non.begin(), non.end(),
                        std::inserter(r, r.end()));
    return r;
  };
  const TokenSet target_residue = residue(target);
  double sum_in = 0.0, sum_out = 0.0;
  for (const auto& s : v_in) sum_in += Jaccard(residue(s), target_residue);
  for (const auto& s : v_out) sum_out += Jaccard(residue(s), target_residue);
  return CenteredContrast(sum_in, v_in.size(), sum_out, v_out.size(), 2.0);
}

double VocabularyOverlapSignal(const Vocabulary& target,
                               const InOutPartition& part) {
  const auto in = ToSets(part.v_in);
  const auto out = ToSets(part.v_out);
  return VocabularyOverlapSignal(TokensOf(target), in, out);
}

EnsembleScorer::EnsembleScorer(const Vocabulary& target,
                               const ShadowEnsemble& ensemble)
    : ensemble_(&ensemble) {
  std::unordered_map<std::string, std::size_t> universe;
  auto intern_all = [&](const Vocabulary& v) {
    for (const auto& t : v.tokens()) universe.emplace(t, universe.size());
  };
  intern_all(target);
  for (const auto& s : ensemble.shadows) intern_all(s.vocabulary);
  auto bits_of = [&](const Vocabulary& v) {
    Bits b(universe.size());
    for (const auto& t : v.tokens()) b.set(universe.at(t));
    return b;
  };
  target_ = bits_of(target);
  for (const auto& s : ensemble.shadows) {
    shadows_.push_back(bits_of(s.vocabulary));
    rhos_.push_back(MergeOrderCorrelation(s.vocabulary, target));
  }
}

void EnsembleScorer::Split(const DatasetId& id, std::vector<std::size_t>& in,
                           std::vector<std::size_t>& out) const {
  for (std::size_t k = 0; k < ensemble_->size(); ++k) {
    (ensemble_->shadows[k].trained_on.count(id) ? in : out).push_back(k);
  }
  if (in.empty() || out.empty()) {
    throw DegeneratePartitionError(
        "dataset '" + id + "' is in " + std::to_string(in.size()) + " of " +
        std::to_string(ensemble_->size()) + " shadows");
  }
}

double EnsembleScorer::VocabularyOverlap(const DatasetId& dataset_id) const {
  std::vector<std::size_t> in, out;
  Split(dataset_id, in, out);
  Bits in_union(target_.size()), out_union(target_.size());
  for (std::size_t k : in) in_union |= shadows_[k];
  for (std::size_t k : out) out_union |= shadows_[k];
  const Bits keep = ~(in_union & out_union);
  const Bits target_residue = target_ & keep;
  auto jaccard = [&](std::size_t k) {
    const Bits residue = shadows_[k] & keep;
    if (residue.none()) return 0.0;
    const auto inter = (residue & target_residue).count();
    const auto uni = (residue | target_residue).count();
    return static_cast<double>(inter) / static_cast<double>(uni);
  };
  double sum_in = 0.0, sum_out = 0.0;
  for (std::size_t k : in) sum_in += jaccard(k);
  for (std::size_t k : out) sum_out += jaccard(k);
  return CenteredContrast(sum_in, in.size(), sum_out, out.size(), 2.0);
}

double EnsembleScorer::MergeSimilarity(const DatasetId& dataset_id) const {
  std::vector<std::size_t> in, out;
  Split(dataset_id, in, out);
  std::vector<double> in_rhos, out_rhos;
  for (std::size_t k : in) in_rhos.push_back(rhos_[k]);
  for (std::size_t k : out) out_rhos.push_back(rhos_[k]);
  return MergeSimilarityFromRhos(in_rhos, out_rhos);
}

// --- Count-based attacks ----------------------------------------------------

FrequencyScorer::FrequencyScorer(const CountTable& counts,
                                 const AuxCollection& aux,
                                 const PowerLawFit& fit)
    : counts_(&counts), aux_ids_(aux.Union()) {
  if (aux_ids_.empty()) throw ArgumentError("auxiliary collection is empty");
  if (!(fit.alpha > 0.0) || fit.x_min < 1) {
    throw ArgumentError("invalid power-law fit");
  }
  aux_total_ = counts.Sum(aux_ids_);
  const std::size_t vocab_size = counts.vocabulary().size();
  // Candidates are tokens with merge index > x_min, i.e. id >= x_min.
  first_candidate_ = std::min(fit.x_min, vocab_size);
  si_.assign(vocab_size, 0.0);
  if (first_candidate_ < vocab_size) {
    SiBoundTable table(fit, vocab_size);
    for (std::size_t id = first_candidate_; id < vocab_size; ++id) {
      si_[id] = table(Vocabulary::position(static_cast<TokenId>(id)));
    }
  }
}

double FrequencyScorer::Score(const DatasetId& dataset_id) const {
  return Score(counts_->counts(dataset_id), aux_ids_.count(dataset_id) > 0);
}

double FrequencyScorer::Score(const TokenCounts& dataset_counts,
                              bool dataset_in_aux) const {
  double best = 0.0;
  for (std::size_t id = first_candidate_; id < si_.size(); ++id) {
    const auto t = static_cast<TokenId>(id);
    const std::int64_t own = dataset_counts[t];
    if (own == 0) continue;
    const std::int64_t total = aux_total_[t] + (dataset_in_aux ? 0 : own);
    if (total == 0) continue;
    const double rtf = static_cast<double>(own) / static_cast<double>(total);
    best = std::max(best, rtf * si_[id]);
  }
  return Sigmoid(best);
}

NaiveBayesScorer::NaiveBayesScorer(const CountTable& counts,
                                   const AuxCollection& aux, std::size_t k)
    : counts_(&counts), aux_ids_(aux.Union()) {
  if (aux_ids_.empty()) throw ArgumentError("auxiliary collection is empty");
  const std::size_t merged = counts.vocabulary().num_merges();
  if (k == 0 || k > merged) {
    throw ArgumentError("k=" + std::to_string(k) + " must lie in [1, " +
                        std::to_string(merged) + "]");
  }
  aux_total_ = counts.Sum(aux_ids_);
  first_rare_ = counts.vocabulary().size() - k;
}

double NaiveBayesScorer::Score(const DatasetId& dataset_id) const {
  return Score(counts_->counts(dataset_id), aux_ids_.count(dataset_id) > 0);
}

double NaiveBayesScorer::Score(const TokenCounts& dataset_counts,
                               bool dataset_in_aux) const {
  double none_from_d = 1.0;
  for (std::size_t id = first_rare_; id < aux_total_.size(); ++id) {
    const auto t = static_cast<TokenId>(id);
    const std::int64_t own = dataset_counts[t];
    if (own == 0) continue;
    const std::int64_t total = aux_total_[t] + (dataset_in_aux ? 0 : own);
    none_from_d *= 1.0 - static_cast<double>(own) / static_cast<double>(total);
  }
  return 1.0 - none_from_d;
}

namespace {

TokenCounts CountsFor(const CountTable& counts, const Dataset& d) {
  if (counts.corpus().contains(d.id)) return counts.counts(d.id);
  return CountTokens(d, counts.vocabulary());
}

void RequireSameVocabulary(const Vocabulary& target, const CountTable& counts) {
  if (!(counts.vocabulary() == target)) {
    throw ArgumentError("count table was built for a different vocabulary");
  }
}

}  // namespace

double FrequencyEstimationSignal(const Vocabulary& target, const Dataset& d,
                                 const AuxCollection& aux,
                                 const PowerLawFit& fit,
                                 const CountTable& counts) {
  RequireSameVocabulary(target, counts);
  FrequencyScorer scorer(counts, aux, fit);
  return scorer.Score(CountsFor(counts, d), aux.Union().count(d.id) > 0);
}

double NaiveBayesSignal(const Vocabulary& target, const Dataset& d,
                        const AuxCollection& aux, std::size_t k,
                        const CountTable& counts) {
  RequireSameVocabulary(target, counts);
  NaiveBayesScorer scorer(counts, aux, k);
  return scorer.Score(CountsFor(counts, d), aux.Union().count(d.id) > 0);
}

double CompressionRateSignal(const Vocabulary& target, const Dataset& d) {
  std::size_t bytes = 0, tokens = 0;
  for (const auto& doc : d.documents) {
    bytes += doc.size();
    tokens += Encode(target, doc).size();
  }
  if (tokens == 0) throw ArgumentError("dataset '" + d.id + "' is empty");
  return static_cast<double>(bytes) / static_cast<double>(tokens);
}

// --- Signals file -----------------------------------------------------------

void WriteSignals(const std::vector<AttackSignal>& signals,
                  const std::filesystem::path& path) {
  std::string out = "dataset_id\tmethod\tscore\tlabel\n";
  for (const auto& s : signals) {
    out += s.dataset_id;
    out += '\t';
    out += MethodName(s.method);
    out += '\t';
    out += FormatDouble(s.score);
    out += '\t';
    if (s.label) out += *s.label ? "1" : "0";
    out += '\n';
  }
  WriteFileAtomic(path, out);
}

std::vector<AttackSignal> ReadSignals(const std::filesystem::path& path) {
  const std::string text = ReadFile(path);
  const std::string source = path.string();
  std::vector<AttackSignal> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    if (++line_no == 1 || line.empty()) continue;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == '\t') {
        fields.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (fields.size() != 4) throw ParseError(source, line_no, "expected 4 columns");
    AttackSignal s;
    s.dataset_id = std::string(fields[0]);
    try {
      s.method = ParseMethod(fields[1]);
      s.score = std::stod(std::string(fields[2]));
    } catch (const std::exception& e) {
      throw ParseError(source, line_no, e.what());
    }
    if (fields[3] == "1") s.label = true;
    else if (fields[3] == "0") s.label = false;
    else if (!fields[3].empty()) throw ParseError(source, line_no, "bad label");
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace vocableak
