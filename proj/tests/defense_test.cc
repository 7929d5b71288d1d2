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

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "json.hpp"
#include "oracles.h"
#include "vocableak/errors.h"
#include "vocableak/util.h"

namespace vocableak {
namespace {

Vocabulary VocabWithMerges(
    const std::vector<std::pair<std::string, std::string>>& merges) {
  Vocabulary v;
  for (const auto& [l, r] : merges) v.AddMerge(*v.find(l), *v.find(r));
  return v;
}

TokenCounts CountsByToken(const Vocabulary& v,
                          const std::map<std::string, std::int64_t>& by_token) {
  TokenCounts c(v.size());
  for (const auto& [token, n] : by_token) c.Add(*v.find(token), n);
  return c;
}

// Counts of `from` re-indexed onto the tokens of `to`.
TokenCounts Reindex(const TokenCounts& counts, const Vocabulary& from,
                    const Vocabulary& to) {
  TokenCounts out(to.size());
  for (std::size_t id = 0; id < to.size(); ++id) {
    out.Add(static_cast<TokenId>(id), counts[*from.find(to.token(static_cast<TokenId>(id)))]);
  }
  return out;
}

struct Trained {
  std::vector<Dataset> data;
  Vocabulary vocab;
};

Trained TrainRandom(std::uint64_t seed, std::size_t vocab_size) {
  std::mt19937_64 rng(seed);
  Trained t;
  for (int k = 0; k < 4; ++k) {
    Dataset d{"d" + std::to_string(k), {}};
    for (int j = 0; j < 10; ++j) {
      std::string s = testing::RandomBytes(rng, 100, 5);
      for (auto& c : s) c = static_cast<char>('a' + c);
      d.documents.push_back(s);
    }
    t.data.push_back(d);
  }
  t.vocab = TrainBpe(t.data, vocab_size);
  return t;
}

std::vector<const Dataset*> Pointers(const std::vector<Dataset>& data) {
  std::vector<const Dataset*> out;
  for (const auto& d : data) out.push_back(&d);
  return out;
}

TEST(MinCountFilterTest, RemovesRareTokensKeepingOrder) {
  Vocabulary v = VocabWithMerges({{"a", "b"}, {"c", "d"}, {"e", "f"}});
  TokenCounts c = CountsByToken(v, {{"ab", 10}, {"cd", 3}, {"ef", 5}});
  DefenseResult r = MinCountFilter(v, c, {4});
  EXPECT_EQ(r.removed_count, 1u);
  EXPECT_EQ(r.n_min, 4);
  ASSERT_EQ(r.vocabulary.size(), 258u);
  EXPECT_EQ(r.vocabulary.token(256), "ab");
  EXPECT_EQ(r.vocabulary.token(257), "ef");
  EXPECT_FALSE(r.vocabulary.contains("cd"));
}

TEST(MinCountFilterTest, DependentsOfRemovedTokensAreDropped) {
  Vocabulary v = VocabWithMerges({{"a", "b"}, {"ab", "c"}, {"x", "y"}});
  TokenCounts c = CountsByToken(v, {{"ab", 2}, {"abc", 9}, {"xy", 9}});
  DefenseResult r = MinCountFilter(v, c, {5});
  EXPECT_EQ(r.removed_count, 2u);
  ASSERT_EQ(r.vocabulary.size(), 257u);
  EXPECT_EQ(r.vocabulary.token(256), "xy");
  EXPECT_EQ(Decode(r.vocabulary, Encode(r.vocabulary, "abcxy")), "abcxy");
}

TEST(MinCountFilterTest, RejectsNonPositiveThreshold) {
  Vocabulary v;
  EXPECT_THROW(MinCountFilter(v, TokenCounts(v.size()), {0}), ArgumentError);
}

TEST(MinCountFilterTest, ThresholdOneIsIdentityOnTrainingCounts) {
  Trained t = TrainRandom(1, 600);
  TokenCounts counts = MemberCounts(t.vocab, Pointers(t.data));
  DefenseResult r = MinCountFilter(t.vocab, counts, {1});
  EXPECT_EQ(r.removed_count, 0u);
  EXPECT_EQ(r.vocabulary, t.vocab);
}

TEST(MinCountFilterTest, SizeAndCompressionShrinkWithThreshold) {
  Trained t = TrainRandom(2, 800);
  TokenCounts counts = MemberCounts(t.vocab, Pointers(t.data));
  std::string text;
  for (const auto& d : t.data) {
    for (const auto& doc : d.documents) text += doc;
  }
  std::size_t prev_size = t.vocab.size();
  double prev_bpt = BytesPerToken(t.vocab, text);
  for (std::int64_t n_min : {2, 4, 8, 16, 32, 64}) {
    DefenseResult r = MinCountFilter(t.vocab, counts, {n_min});
    EXPECT_LE(r.vocabulary.size(), prev_size) << n_min;
    EXPECT_EQ(r.vocabulary.size() + r.removed_count, t.vocab.size());
    const double bpt = BytesPerToken(r.vocabulary, text);
    EXPECT_LE(bpt, prev_bpt + 1e-12) << n_min;
    prev_size = r.vocabulary.size();
    prev_bpt = bpt;
  }
  EXPECT_LT(prev_size, t.vocab.size());
}

TEST(MinCountFilterTest, Idempotent) {
  Trained t = TrainRandom(3, 700);
  TokenCounts counts = MemberCounts(t.vocab, Pointers(t.data));
  for (std::int64_t n_min : {3, 10, 40}) {
    DefenseResult once = MinCountFilter(t.vocab, counts, {n_min});
    DefenseResult twice = MinCountFilter(
        once.vocabulary, Reindex(counts, t.vocab, once.vocabulary), {n_min});
    EXPECT_EQ(twice.vocabulary, once.vocabulary) << n_min;
    EXPECT_EQ(twice.removed_count, 0u);
  }
}

TEST(MinCountFilterTest, FilteredVocabulariesRoundTrip) {
  Trained t = TrainRandom(4, 700);
  TokenCounts counts = MemberCounts(t.vocab, Pointers(t.data));
  DefenseResult r = MinCountFilter(t.vocab, counts, {20});
  std::mt19937_64 rng(9);
  for (int k = 0; k < 200; ++k) {
    std::string s = testing::RandomBytes(rng, 1 + k % 50, k % 2 ? 256 : 5);
    if (k % 2 == 0) {
      for (auto& c : s) c = static_cast<char>('a' + c);
    }
    ASSERT_EQ(Decode(r.vocabulary, Encode(r.vocabulary, s)), s);
  }
}

TEST(MemberCountsTest, ConstituentCountsOverAllDatasets) {
  Vocabulary v = VocabWithMerges({{"a", "b"}, {"ab", "c"}});
  std::vector<Dataset> data = {{"x", {"abc ab"}}, {"y", {"abab"}}};
  TokenCounts c = MemberCounts(v, Pointers(data));
  EXPECT_EQ(c.count(v, "abc"), 1);
  EXPECT_EQ(c.count(v, "ab"), 4);
}

TEST(DefenseResultTest, SidecarIsWrittenNextToTheVocabulary) {
  Vocabulary v = VocabWithMerges({{"a", "b"}, {"c", "d"}});
  DefenseResult r = MinCountFilter(v, CountsByToken(v, {{"ab", 5}, {"cd", 1}}), {2});
  auto dir = std::filesystem::temp_directory_path() / "vocableak_defense_test";
  std::filesystem::create_directories(dir);
  auto path = dir / "filtered.vocab";
  SaveDefenseResult(r, path);
  EXPECT_EQ(LoadVocabulary(path), r.vocabulary);
  EXPECT_EQ(DefenseSidecarPath(path).filename(), "filtered.vocab.defense.json");
  auto j = nlohmann::json::parse(ReadFile(DefenseSidecarPath(path)));
  EXPECT_EQ(j.at("n_min").get<int>(), 2);
  EXPECT_EQ(j.at("removed_count").get<int>(), 1);
}

}  // namespace
}  // namespace vocableak
