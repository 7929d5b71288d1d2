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

#include "vocableak/bpe.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.h"
#include "vocableak/counts.h"
#include "vocableak/errors.h"
#include "vocableak/util.h"

namespace vocableak {
namespace {

std::vector<Dataset> Docs(std::vector<std::string> docs) {
  return {Dataset{"d", std::move(docs)}};
}

std::vector<testing::OracleMerge> MergesOf(const Vocabulary& v) {
  std::vector<testing::OracleMerge> out;
  for (const auto& m : v.merges()) out.push_back({v.token(m.left), v.token(m.right)});
  return out;
}

Vocabulary VocabWithMerges(
    const std::vector<std::pair<std::string, std::string>>& merges) {
  Vocabulary v;
  for (const auto& [l, r] : merges) v.AddMerge(*v.find(l), *v.find(r));
  return v;
}

std::filesystem::path TempPath(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "vocableak_bpe_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

TEST(TrainBpeTest, ClassicStringMergeOrder) {
  // Hand trace: "aa" occurs 4 times (overlapping) and wins. After merging
  // left to right the string is aa|a|b|d|aa|a|b|a|c; (aa,a) and (a,b) tie at
  // 2 and (a,b) has the smaller ids. Then aa|ab|d|aa|ab|a|c leaves (aa,ab)
  // as the only pair seen twice.
  Vocabulary v = TrainBpe(Docs({"aaabdaaabac"}), 259);
  ASSERT_EQ(v.size(), 259u);
  std::vector<testing::OracleMerge> expected = {
      {"a", "a"}, {"a", "b"}, {"aa", "ab"}};
  EXPECT_EQ(MergesOf(v), expected);
  EXPECT_EQ(v.token(258), "aaab");
  EXPECT_EQ(MergesOf(v), testing::OracleTrainBpe({"aaabdaaabac"}, 259));
}

TEST(TrainBpeTest, SinglePair) {
  Vocabulary v = TrainBpe(Docs({"ab"}), 257);
  ASSERT_EQ(v.num_merges(), 1u);
  EXPECT_EQ(v.token(256), "ab");
  EXPECT_FALSE(v.exhausted());
}

TEST(TrainBpeTest, ExhaustionIsFlagged) {
  Vocabulary v = TrainBpe(Docs({"x"}), 258);
  EXPECT_EQ(v.size(), 256u);
  EXPECT_EQ(v.num_merges(), 0u);
  EXPECT_TRUE(v.exhausted());
}

TEST(TrainBpeTest, RejectsBadArguments) {
  EXPECT_THROW(TrainBpe(Docs({"abc"}), 256), ArgumentError);
  EXPECT_THROW(TrainBpe(std::vector<Dataset>{}, 300), ArgumentError);
}

TEST(TrainBpeTest, PairsDoNotCrossDocuments) {
  // "ab" never occurs inside a document.
  Vocabulary v = TrainBpe(Docs({"xa", "bx", "xa", "bx"}), 257);
  EXPECT_NE(v.token(256), "ab");
}

TEST(TrainBpeTest, DuplicateConcatenationIsSkipped) {
  // (ab,c) and (a,bc) would both produce "abc"; only one may be merged.
  Vocabulary v = TrainBpe(Docs({"abcabc", "xbcxbc", "abyaby"}), 270);
  std::set<std::string> seen(v.tokens().begin(), v.tokens().end());
  EXPECT_EQ(seen.size(), v.size());
  EXPECT_EQ(MergesOf(v), testing::OracleTrainBpe({"abcabc", "xbcxbc", "abyaby"}, 270));
}

TEST(TrainBpeTest, MatchesBruteForceOracleOnRandomCorpora) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> n_docs(1, 4);
    std::uniform_int_distribution<int> len(1, 16);
    std::uniform_int_distribution<int> alphabet(2, 5);
    const int a = alphabet(rng);
    std::vector<std::string> docs;
    for (int d = n_docs(rng); d > 0; --d) {
      std::string s = testing::RandomBytes(rng, len(rng), a);
      for (auto& c : s) c = static_cast<char>('a' + c);
      docs.push_back(s);
    }
    const std::size_t vocab_size = 256 + 1 + trial % 8;
    Vocabulary v = TrainBpe(Docs(docs), vocab_size);
    ASSERT_EQ(MergesOf(v), testing::OracleTrainBpe(docs, vocab_size))
        << "trial " << trial;
  }
}

TEST(TrainBpeTest, Deterministic) {
  std::mt19937_64 rng(11);
  std::vector<std::string> docs;
  for (int i = 0; i < 20; ++i) docs.push_back(testing::RandomBytes(rng, 200, 6));
  Vocabulary a = TrainBpe(Docs(docs), 400);
  Vocabulary b = TrainBpe(Docs(docs), 400);
  EXPECT_EQ(VocabularyFingerprint(a), VocabularyFingerprint(b));
}

TEST(TrainBpeTest, EveryMergedTokenAppearsInTrainingEncoding) {
  std::mt19937_64 rng(3);
  Dataset d{"d", {}};
  for (int i = 0; i < 30; ++i) d.documents.push_back(testing::RandomBytes(rng, 120, 4));
  Vocabulary v = TrainBpe(std::vector<Dataset>{d}, 600);
  TokenCounts c = WithConstituents(CountTokens(d, v), v);
  for (std::size_t id = kByteAlphabetSize; id < v.size(); ++id) {
    EXPECT_GT(c[static_cast<TokenId>(id)], 0) << "token " << id;
  }
}

TEST(EncodeTest, AppliesMerges) {
  Vocabulary v = VocabWithMerges({{"a", "b"}});
  Encoding e = Encode(v, "abab");
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(v.token(e[0]), "ab");
  EXPECT_EQ(v.token(e[1]), "ab");
}

TEST(EncodeTest, EmptyText) { EXPECT_TRUE(Encode(Vocabulary(), "").empty()); }

TEST(EncodeTest, UnmergedBytesFallBack) {
  Vocabulary v = VocabWithMerges({{"a", "b"}});
  Encoding e = Encode(v, "zzz");
  EXPECT_EQ(e, (Encoding{'z', 'z', 'z'}));
}

TEST(EncodeTest, LowestRankWins) {
  // "bc" outranks "ab", so "abc" becomes a|bc.
  Vocabulary v = VocabWithMerges({{"b", "c"}, {"a", "b"}});
  Encoding e = Encode(v, "abc");
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(v.token(e[0]), "a");
  EXPECT_EQ(v.token(e[1]), "bc");
}

TEST(EncodeTest, RoundTripsRandomBytes) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    std::vector<std::string> docs;
    for (int i = 0; i < 10; ++i) docs.push_back(testing::RandomBytes(rng, 100, 8));
    Vocabulary v = TrainBpe(Docs(docs), 300 + t * 10);
    for (int i = 0; i < 50; ++i) {
      std::string s = testing::RandomBytes(rng, i * 3, i % 2 ? 8 : 256);
      ASSERT_EQ(Decode(v, Encode(v, s)), s);
    }
  }
}

TEST(EncodeTest, PretokenizerBlocksCrossChunkMerges) {
  Pretokenizer split_space = [](std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
      if (i == s.size() || s[i] == ' ') {
        if (i > start) out.push_back(s.substr(start, i - start));
        if (i < s.size()) out.push_back(s.substr(i, 1));
        start = i + 1;
      }
    }
    return out;
  };
  TrainOptions opts{split_space};
  Vocabulary v = TrainBpe(Docs({"a b a b a b"}), 260, opts);
  for (const auto& t : v.tokens()) {
    if (t.size() > 1) {
      EXPECT_EQ(t.find(' '), std::string::npos) << t;
    }
  }
  EXPECT_EQ(Decode(v, Encode(v, "a b", split_space)), "a b");
}

TEST(BytesPerTokenTest, StipulatedEncoding) {
  Vocabulary v = VocabWithMerges({{"h", "e"}, {"he", "l"}, {"hel", "l"},
                                  {"hell", "o"}, {"w", "o"}, {"wo", "r"},
                                  {"wor", "l"}, {"worl", "d"}});
  ASSERT_EQ(Encode(v, "hello world").size(), 3u);
  EXPECT_NEAR(BytesPerToken(v, "hello world"), 11.0 / 3.0, 1e-12);
}

TEST(BytesPerTokenTest, NoMergesIsOne) {
  EXPECT_DOUBLE_EQ(BytesPerToken(Vocabulary(), "anything"), 1.0);
}

TEST(BytesPerTokenTest, HandTrace) {
  EXPECT_DOUBLE_EQ(BytesPerToken(VocabWithMerges({{"a", "b"}}), "abab"), 2.0);
}

TEST(BytesPerTokenTest, EmptyTextThrows) {
  EXPECT_THROW(BytesPerToken(Vocabulary(), ""), ArgumentError);
}

TEST(BytesPerTokenTest, NestedVocabulariesNeverCompressWorse) {
  std::mt19937_64 rng(13);
  std::vector<std::string> docs;
  for (int i = 0; i < 40; ++i) docs.push_back(testing::RandomBytes(rng, 150, 5));
  Vocabulary small = TrainBpe(Docs(docs), 320);
  Vocabulary large = TrainBpe(Docs(docs), 420);
  ASSERT_EQ(std::vector<MergePair>(large.merges().begin(),
                                   large.merges().begin() + small.num_merges()),
            small.merges());
  for (const auto& d : docs) {
    EXPECT_GE(BytesPerToken(large, d), BytesPerToken(small, d));
  }
}

TEST(VocabularyIoTest, RoundTrip) {
  std::mt19937_64 rng(17);
  std::vector<std::string> docs;
  for (int i = 0; i < 10; ++i) docs.push_back(testing::RandomBytes(rng, 80, 256));
  Vocabulary v = TrainBpe(Docs(docs), 330);
  const auto path = TempPath("roundtrip.vocab");
  SaveVocabulary(v, path);
  EXPECT_EQ(LoadVocabulary(path), v);
}

TEST(VocabularyIoTest, DuplicateTokenIsRejected) {
  Vocabulary v = VocabWithMerges({{"a", "b"}});
  const auto path = TempPath("dup.vocab");
  SaveVocabulary(v, path);
  {
    std::ofstream out(path, std::ios::app);
    out << Base64Encode("ab") << "\n";
  }
  {
    std::ofstream out(MergesPath(path), std::ios::app);
    out << Base64Encode("a") << " " << Base64Encode("b") << "\n";
  }
  try {
    LoadVocabulary(path);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 258u);
  }
}

TEST(VocabularyIoTest, BrokenMergeChainIsRejected) {
  Vocabulary v = VocabWithMerges({{"a", "b"}});
  const auto path = TempPath("broken.vocab");
  SaveVocabulary(v, path);
  {
    std::ofstream out(MergesPath(path), std::ios::trunc);
    out << Base64Encode("a") << " " << Base64Encode("c") << "\n";
  }
  try {
    LoadVocabulary(path);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_NE(std::string(e.what()).find("concatenate"), std::string::npos);
  }
}

TEST(VocabularyIoTest, CorruptBase64IsRejected) {
  const auto path = TempPath("corrupt.vocab");
  SaveVocabulary(Vocabulary(), path);
  {
    std::ofstream out(path, std::ios::app);
    out << "!!!notbase64\n";
  }
  EXPECT_THROW(LoadVocabulary(path), ParseError);
}

}  // namespace
}  // namespace vocableak
