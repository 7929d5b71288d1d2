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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "oracles.h"
#include "vocableak/errors.h"
#include "vocableak/synthetic.h"
#include "vocableak/util.h"

namespace vocableak {
namespace {

std::filesystem::path TempPath(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "vocableak_attacks_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

Vocabulary VocabWithMerges(
    const std::vector<std::pair<std::string, std::string>>& merges) {
  Vocabulary v;
  for (const auto& [l, r] : merges) v.AddMerge(*v.find(l), *v.find(r));
  return v;
}

Corpus RandomCorpus(std::size_t n, std::uint64_t seed, int alphabet = 5) {
  std::mt19937_64 rng(seed);
  std::vector<Dataset> ds;
  for (std::size_t i = 0; i < n; ++i) {
    Dataset d{"d" + std::to_string(i), {}};
    const int docs = 1 + static_cast<int>(i % 4);
    for (int j = 0; j < docs; ++j) {
      std::string s = testing::RandomBytes(rng, 60, alphabet);
      for (auto& c : s) c = static_cast<char>('a' + c);
      d.documents.push_back(s);
    }
    ds.push_back(std::move(d));
  }
  return Corpus(std::move(ds));
}

TEST(MethodNameTest, RoundTrip) {
  for (AttackMethod m : kAllMethods) EXPECT_EQ(ParseMethod(MethodName(m)), m);
  EXPECT_EQ(MethodName(AttackMethod::kVocabularyOverlap), "vocabulary_overlap");
  EXPECT_THROW(ParseMethod("lira"), ArgumentError);
}

// --- Merge similarity -------------------------------------------------------

TEST(SpearmanTest, HandComputedSwap) {
  const std::vector<double> x = {1, 2, 3}, y = {2, 1, 3};
  EXPECT_NEAR(SpearmanRho(x, y), 0.5, 1e-12);
}

TEST(SpearmanTest, PerfectAndReversed) {
  const std::vector<double> x = {10, 20, 30, 40}, y = {1, 5, 7, 100};
  const std::vector<double> r = {4, 3, 2, 1};
  EXPECT_NEAR(SpearmanRho(x, y), 1.0, 1e-12);
  EXPECT_NEAR(SpearmanRho(x, r), -1.0, 1e-12);
}

TEST(SpearmanTest, TiesGetAverageRanks) {
  // Ranks of y: (1.5, 1.5, 3); Pearson with (1, 2, 3) is sqrt(3)/2.
  const std::vector<double> x = {1, 2, 3}, y = {5, 5, 9};
  EXPECT_NEAR(SpearmanRho(x, y), std::sqrt(3.0) / 2.0, 1e-12);
  const std::vector<double> flat = {2, 2, 2};
  EXPECT_EQ(SpearmanRho(x, flat), 0.0);
  EXPECT_THROW(SpearmanRho(std::vector<double>{1.0}, std::vector<double>{1.0}),
               ArgumentError);
  EXPECT_THROW(SpearmanRho(x, std::vector<double>{1.0, 2.0}), ArgumentError);
}

TEST(MergeSimilarityTest, FormulaExamples) {
  const std::vector<double> ones = {1.0, 1.0};
  EXPECT_DOUBLE_EQ(MergeSimilarityFromRhos(ones, ones), 0.5);
  EXPECT_DOUBLE_EQ(MergeSimilarityFromRhos(std::vector<double>{1.0},
                                           std::vector<double>{-1.0}),
                   1.0);
}

TEST(MergeSimilarityTest, CorrelationOverSharedTokens) {
  Vocabulary a = VocabWithMerges({{"a", "b"}, {"c", "d"}, {"e", "f"}});
  Vocabulary b = VocabWithMerges({{"c", "d"}, {"a", "b"}, {"e", "f"}});
  EXPECT_NEAR(MergeOrderCorrelation(a, a), 1.0, 1e-12);
  const double rho = MergeOrderCorrelation(a, b);
  EXPECT_LT(rho, 1.0);
  EXPECT_GT(rho, 0.99);
  EXPECT_NEAR(rho, MergeOrderCorrelation(b, a), 1e-12);
}

TEST(MergeSimilarityTest, SymmetryNull) {
  Corpus c = RandomCorpus(6, 1);
  Vocabulary target = TrainBpe(c.datasets(), 300);
  Vocabulary s1 = TrainBpe(c.select({"d0", "d1", "d2"}), 300);
  Vocabulary s2 = TrainBpe(c.select({"d3", "d4"}), 300);
  InOutPartition p{{&s1, &s2}, {&s2, &s1}};
  EXPECT_DOUBLE_EQ(MergeSimilaritySignal(target, p), 0.5);
  EXPECT_DOUBLE_EQ(VocabularyOverlapSignal(target, p), 0.5);
}

// --- Vocabulary overlap -----------------------------------------------------

TEST(JaccardTest, SetArithmetic) {
  EXPECT_NEAR(Jaccard({"a", "b"}, {"b", "c"}), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(Jaccard({}, {"x"}), 0.0);
  EXPECT_EQ(Jaccard({"x"}, {}), 0.0);
  EXPECT_EQ(Jaccard({}, {}), 0.0);
  EXPECT_EQ(Jaccard({"x"}, {"x"}), 1.0);
}

TEST(NondistinctiveTest, Definition) {
  std::vector<TokenSet> in = {{"a", "b", "x"}};
  std::vector<TokenSet> out = {{"a", "b"}};
  EXPECT_EQ(NondistinctiveTokens(in, out), (TokenSet{"a", "b"}));
  std::vector<TokenSet> same = {{"a", "q"}, {"b"}};
  EXPECT_EQ(NondistinctiveTokens(same, same), (TokenSet{"a", "b", "q"}));
  std::vector<TokenSet> left = {{"a"}}, right = {{"b"}};
  EXPECT_TRUE(NondistinctiveTokens(left, right).empty());
}

TEST(VocabularyOverlapTest, HandEvaluatedExamples) {
  std::vector<TokenSet> in = {{"a", "b", "x"}};
  std::vector<TokenSet> out = {{"a", "b"}};
  EXPECT_DOUBLE_EQ(VocabularyOverlapSignal(TokenSet{"a", "b", "x"}, in, out), 1.0);
  EXPECT_DOUBLE_EQ(VocabularyOverlapSignal(TokenSet{"a", "b"}, in, out), 0.5);
  std::vector<TokenSet> in2 = {{"a", "y"}};
  std::vector<TokenSet> out2 = {{"a", "x"}};
  EXPECT_DOUBLE_EQ(VocabularyOverlapSignal(TokenSet{"a", "x"}, in2, out2), 0.0);
}

TEST(VocabularyOverlapTest, RangeAndMonotonicityOnRandomSets) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> tok(0, 30);
  std::uniform_int_distribution<int> count(1, 4);
  auto random_set = [&](int n) {
    TokenSet s;
    for (int k = 0; k < n; ++k) s.insert("t" + std::to_string(tok(rng)));
    return s;
  };
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<TokenSet> in, out;
    for (int k = count(rng); k > 0; --k) in.push_back(random_set(12));
    for (int k = count(rng); k > 0; --k) out.push_back(random_set(12));
    TokenSet target = random_set(15);
    const double base = VocabularyOverlapSignal(target, in, out);
    ASSERT_GE(base, 0.0);
    ASSERT_LE(base, 1.0);
    // A token in every IN vocabulary and no OUT vocabulary raises each IN
    // term and lowers each OUT term.
    TokenSet out_union;
    for (const auto& s : out) out_union.insert(s.begin(), s.end());
    for (const auto& t : in.front()) {
      if (out_union.count(t) || target.count(t)) continue;
      if (!std::all_of(in.begin(), in.end(), [&](const TokenSet& s) { return s.count(t) > 0; })) {
        continue;
      }
      TokenSet more = target;
      more.insert(t);
      EXPECT_GE(VocabularyOverlapSignal(more, in, out), base) << "trial " << trial << " token " << t;
    }
  }
}

TEST(VocabularyOverlapTest, TokenInOnlySomeInShadowsCanLowerTheSignal) {
  // IN = [{x}, {x}, {z}], OUT = [{}]. With target {x} the IN terms are
  // 1, 1, 0; adding z makes them 1/2, 1/2, 1/2.
  std::vector<TokenSet> in = {{"x"}, {"x"}, {"z"}};
  std::vector<TokenSet> out = {{}};
  EXPECT_DOUBLE_EQ(VocabularyOverlapSignal(TokenSet{"x"}, in, out), 0.5 + 2.0 / 6.0);
  EXPECT_DOUBLE_EQ(VocabularyOverlapSignal(TokenSet{"x", "z"}, in, out), 0.75);
}

TEST(EnsembleScorerTest, AgreesWithSetFormulas) {
  Corpus c = RandomCorpus(12, 3, 6);
  Vocabulary target = TrainBpe(c.select({"d0", "d2", "d4", "d6", "d8", "d10"}), 400);
  EnsembleOptions o;
  o.n_shadows = 6;
  o.vocab_size = 400;
  o.seed = 2;
  ShadowEnsemble e = TrainEnsemble(c, o);
  EnsembleScorer scorer(target, e);
  ASSERT_EQ(scorer.rhos().size(), 6u);
  int checked = 0;
  for (const auto& id : c.ids()) {
    InOutPartition p;
    try {
      p = PartitionInOut(e, id);
    } catch (const DegeneratePartitionError&) {
      EXPECT_THROW(scorer.VocabularyOverlap(id), DegeneratePartitionError);
      continue;
    }
    EXPECT_DOUBLE_EQ(scorer.VocabularyOverlap(id), VocabularyOverlapSignal(target, p));
    EXPECT_DOUBLE_EQ(scorer.MergeSimilarity(id), MergeSimilaritySignal(target, p));
    ++checked;
  }
  EXPECT_GT(checked, 6);
}

// --- Count-based attacks ----------------------------------------------------

// Straight from the definitions, one dataset at a time.
double OracleFrequencyEstimation(const Vocabulary& v, const Corpus& c,
                                 const Dataset& d, const IdSet& aux,
                                 const PowerLawFit& fit) {
  IdSet universe = aux;
  std::vector<const Dataset*> members;
  for (const auto& id : universe) members.push_back(&c.at(id));
  if (!universe.count(d.id)) members.push_back(&d);
  const TokenCounts own = CountTokens(d, v);
  std::vector<TokenCounts> all;
  for (const Dataset* m : members) all.push_back(CountTokens(*m, v));
  double best = 0.0;
  for (std::size_t id = 0; id < v.size(); ++id) {
    const std::size_t i = id + 1;
    if (i <= fit.x_min) continue;
    const auto t = static_cast<TokenId>(id);
    std::int64_t total = 0;
    for (const auto& tc : all) total += tc[t];
    if (total == 0) continue;
    const double rtf = static_cast<double>(own[t]) / static_cast<double>(total);
    const double si = testing::DirectSiLowerBound(fit.alpha, static_cast<long>(fit.x_min),
                                                  static_cast<long>(i),
                                                  static_cast<long>(v.size()));
    best = std::max(best, rtf * si);
  }
  return 1.0 / (1.0 + std::exp(-best));
}

double OracleNaiveBayes(const Vocabulary& v, const Corpus& c, const Dataset& d,
                        const IdSet& aux, std::size_t k) {
  std::vector<const Dataset*> members;
  for (const auto& id : aux) members.push_back(&c.at(id));
  if (!aux.count(d.id)) members.push_back(&d);
  const TokenCounts own = CountTokens(d, v);
  double product = 1.0;
  for (std::size_t id = v.size() - k; id < v.size(); ++id) {
    const auto t = static_cast<TokenId>(id);
    std::int64_t total = 0;
    for (const Dataset* m : members) total += CountTokens(*m, v)[t];
    if (total == 0) continue;
    product *= 1.0 - static_cast<double>(own[t]) / static_cast<double>(total);
  }
  return 1.0 - product;
}

class CountAttackTest : public ::testing::Test {
 protected:
  CountAttackTest()
      : corpus_(RandomCorpus(16, 5, 6)),
        target_(TrainBpe(corpus_.select({"d0", "d1", "d2", "d3", "d4", "d5", "d6", "d7"}), 450)),
        table_(target_, corpus_) {
    aux_.samples = {{"d1", "d9", "d12"}, {"d9", "d13", "d15"}};
    fit_.alpha = 1.1;
    fit_.x_min = 300;
  }

  Corpus corpus_;
  Vocabulary target_;
  CountTable table_;
  AuxCollection aux_;
  PowerLawFit fit_;
};

TEST_F(CountAttackTest, FrequencyEstimationMatchesOracle) {
  const IdSet aux = aux_.Union();
  for (const auto& d : corpus_.datasets()) {
    const double got = FrequencyEstimationSignal(target_, d, aux_, fit_, table_);
    EXPECT_NEAR(got, OracleFrequencyEstimation(target_, corpus_, d, aux, fit_), 1e-12) << d.id;
    EXPECT_GE(got, 0.5);
    EXPECT_LE(got, 1.0);
  }
}

TEST_F(CountAttackTest, FrequencyEstimationForOutsideDataset) {
  Dataset outside{"fresh", {"abcabcabcfff", "eeeeffff"}};
  EXPECT_NEAR(FrequencyEstimationSignal(target_, outside, aux_, fit_, table_),
              OracleFrequencyEstimation(target_, corpus_, outside, aux_.Union(), fit_), 1e-12);
  // Only bytes outside the candidate range: no evidence.
  Dataset absent{"none", {"zzzz"}};
  EXPECT_DOUBLE_EQ(FrequencyEstimationSignal(target_, absent, aux_, fit_, table_), 0.5);
}

TEST_F(CountAttackTest, NaiveBayesMatchesOracle) {
  const IdSet aux = aux_.Union();
  for (std::size_t k : {1, 10, 194}) {
    for (const auto& d : corpus_.datasets()) {
      const double got = NaiveBayesSignal(target_, d, aux_, k, table_);
      EXPECT_NEAR(got, OracleNaiveBayes(target_, corpus_, d, aux, k), 1e-12) << d.id;
      EXPECT_GE(got, 0.0);
      EXPECT_LE(got, 1.0);
    }
  }
  Dataset absent{"none", {"zzzz"}};
  EXPECT_DOUBLE_EQ(NaiveBayesSignal(target_, absent, aux_, 5, table_), 0.0);
  EXPECT_THROW(NaiveBayesSignal(target_, corpus_[0], aux_, 195, table_), ArgumentError);
  EXPECT_THROW(NaiveBayesSignal(target_, corpus_[0], aux_, 0, table_), ArgumentError);
}

TEST_F(CountAttackTest, CountTableMustMatchTheTarget) {
  Vocabulary other = TrainBpe(corpus_.select({"d9"}), 300);
  EXPECT_THROW(FrequencyEstimationSignal(other, corpus_[0], aux_, fit_, table_), ArgumentError);
  AuxCollection empty;
  EXPECT_THROW(FrequencyScorer(table_, empty, fit_), ArgumentError);
}

TEST(NaiveBayesTest, TwoHalfShareTokens) {
  // Aux holds one other dataset with the same counts of both rare tokens, so
  // each Pr(t -> D) is 1/2.
  Vocabulary v = VocabWithMerges({{"a", "b"}, {"c", "d"}});
  Corpus c(std::vector<Dataset>{{"other", {"ab cd"}}});
  CountTable table(v, c);
  AuxCollection aux{{{"other"}}};
  Dataset d{"d", {"cd ab"}};
  EXPECT_DOUBLE_EQ(NaiveBayesSignal(v, d, aux, 2, table), 0.75);
}

TEST(FrequencyEstimationTest, InvariantUnderDatasetDuplication) {
  Corpus c = RandomCorpus(10, 8, 6);
  std::vector<Dataset> doubled = c.datasets();
  for (auto& d : doubled) {
    const auto docs = d.documents;
    d.documents.insert(d.documents.end(), docs.begin(), docs.end());
  }
  Corpus c2(doubled);
  Vocabulary v = TrainBpe(c.select({"d0", "d1", "d2", "d3", "d4"}), 420);
  CountTable t1(v, c), t2(v, c2);
  AuxCollection aux{{{"d1", "d5", "d7"}}};
  PowerLawFit fit;
  fit.alpha = 0.9;
  fit.x_min = 280;
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_NEAR(FrequencyEstimationSignal(v, c[i], aux, fit, t1),
                FrequencyEstimationSignal(v, c2[i], aux, fit, t2), 1e-12);
  }
}

TEST(CompressionRateTest, SumsBytesAndTokensOverDocuments) {
  Vocabulary v = VocabWithMerges({{"a", "b"}, {"ab", "ab"}});
  Dataset d{"d", {"abab", "xab"}};
  // "abab" -> [abab], "xab" -> [x, ab]: 7 bytes over 3 tokens.
  EXPECT_DOUBLE_EQ(CompressionRateSignal(v, d), 7.0 / 3.0);
}

TEST(PlantedTokenTest, MembersOutscoreNonMembersOnMedian) {
  SyntheticOptions g;
  g.n_datasets = 40;
  g.docs_per_dataset = {20};
  g.words_per_doc = 20;
  g.markers_per_dataset = 3;
  g.marker_rate = 2.0;
  g.boilerplate_rate_max = 0.0;
  g.seed = 11;
  Corpus c = GenerateSyntheticCorpus(g);
  MembershipSplit split = SplitMembers(c, 0.5, 1);
  Vocabulary target = TrainBpe(c.select(split.member_ids), 1500);
  EnsembleOptions o;
  o.n_shadows = 8;
  o.vocab_size = 1500;
  o.seed = 3;
  ShadowEnsemble e = TrainEnsemble(c, o);
  EnsembleScorer overlap(target, e);
  CountTable table(target, c);
  AuxCollection aux = SampleAuxCollection(c, 3, 10, 4);
  PowerLawFit fit;
  fit.alpha = 1.0;
  fit.x_min = 600;
  FrequencyScorer fe(table, aux, fit);
  NaiveBayesScorer nb(table, aux, 300);

  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
  };
  std::vector<double> vo_in, vo_out, fe_in, fe_out, nb_in, nb_out;
  for (const auto& id : c.ids()) {
    const bool member = split.is_member(id);
    try {
      (member ? vo_in : vo_out).push_back(overlap.VocabularyOverlap(id));
    } catch (const DegeneratePartitionError&) {
    }
    (member ? fe_in : fe_out).push_back(fe.Score(id));
    (member ? nb_in : nb_out).push_back(nb.Score(id));
  }
  EXPECT_GT(median(vo_in), median(vo_out));
  EXPECT_GT(median(fe_in), median(fe_out));
  EXPECT_GT(median(nb_in), median(nb_out));
}

// --- Signals file -----------------------------------------------------------

TEST(SignalsFileTest, RoundTrip) {
  std::vector<AttackSignal> s = {
      {"a", AttackMethod::kNaiveBayes, 0.125, true},
      {"b", AttackMethod::kNaiveBayes, 1.0 / 3.0, false},
      {"c", AttackMethod::kCompressionRate, 4.75, std::nullopt}};
  auto path = TempPath("signals.tsv");
  WriteSignals(s, path);
  auto back = ReadSignals(path);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(back[k].dataset_id, s[k].dataset_id);
    EXPECT_EQ(back[k].method, s[k].method);
    EXPECT_EQ(back[k].score, s[k].score);
    EXPECT_EQ(back[k].label, s[k].label);
  }
  EXPECT_EQ(ReadFile(path).substr(0, 30), "dataset_id\tmethod\tscore\tlabel\n");
}

TEST(SignalsFileTest, MalformedRowsNameTheLine) {
  auto path = TempPath("bad.tsv");
  WriteFileAtomic(path, "dataset_id\tmethod\tscore\tlabel\na\tnaive_bayes\tnope\t1\n");
  try {
    ReadSignals(path);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  WriteFileAtomic(path, "dataset_id\tmethod\tscore\tlabel\na\tbogus\t0.5\t1\n");
  EXPECT_THROW(ReadSignals(path), ParseError);
  WriteFileAtomic(path, "dataset_id\tmethod\tscore\tlabel\na\tnaive_bayes\t0.5\t7\n");
  EXPECT_THROW(ReadSignals(path), ParseError);
}

}  // namespace
}  // namespace vocableak
