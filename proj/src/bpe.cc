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

#include <algorithm>
#include <queue>
#include <sstream>

#include "vocableak/errors.h"
#include "vocableak/util.h"

namespace vocableak {

Vocabulary::Vocabulary() {
  tokens_.reserve(kByteAlphabetSize);
  for (std::size_t b = 0; b < kByteAlphabetSize; ++b) {
    tokens_.emplace_back(1, static_cast<char>(b));
    index_.emplace(tokens_.back(), static_cast<TokenId>(b));
  }
}

std::optional<TokenId> Vocabulary::find(std::string_view bytes) const {
  auto it = index_.find(std::string(bytes));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Vocabulary::merge_rank(TokenId left,
                                                  TokenId right) const {
  auto it = rank_.find(PairKey(left, right));
  if (it == rank_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocabulary::AddMerge(TokenId left, TokenId right) {
  if (left >= tokens_.size() || right >= tokens_.size()) {
    throw ArgumentError("merge refers to an unknown token id");
  }
  std::string merged = tokens_[left] + tokens_[right];
  const auto id = static_cast<TokenId>(tokens_.size());
  if (!index_.emplace(merged, id).second) {
    throw ArgumentError("merge output is already a token");
  }
  rank_.emplace(PairKey(left, right), static_cast<std::uint32_t>(merges_.size()));
  tokens_.push_back(std::move(merged));
  merges_.push_back({left, right});
  return id;
}

// ---------------------------------------------------------------------------
// Training
//
// Symbols of all chunks live in one array with prev/next links; a link of -1
// marks a chunk boundary. Per pair we keep its live count and the positions of
// its left symbol (possibly stale, validated on use). A max-heap keyed by
// (count, smaller pair first) holds at least one entry per live pair whose
// recorded count is >= the pair's true count; entries are re-pushed with the
// true count when found stale.

namespace {

using PairKey = std::uint64_t;

PairKey MakeKey(std::int32_t l, std::int32_t r) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(l)) << 32) |
         static_cast<std::uint32_t>(r);
}

struct PairStats {
  std::int64_t count = 0;
  std::vector<std::int32_t> positions;
  bool banned = false;
};

struct HeapEntry {
  std::int64_t count;
  PairKey key;

  bool operator<(const HeapEntry& o) const {
    if (count != o.count) return count < o.count;
    return key > o.key;
  }
};

class Trainer {
 public:
  Trainer(std::span<const Dataset* const> datasets, const TrainOptions& options) {
    std::size_t total = 0;
    for (const Dataset* d : datasets) total += d->byte_count();
    sym_.reserve(total);
    prev_.reserve(total);
    next_.reserve(total);
    for (const Dataset* d : datasets) {
      for (const auto& doc : d->documents) {
        if (options.pretokenizer) {
          for (std::string_view chunk : options.pretokenizer(doc)) AddChunk(chunk);
        } else {
          AddChunk(doc);
        }
      }
    }
    pairs_.reserve(1 << 16);
    for (std::size_t p = 0; p < sym_.size(); ++p) {
      if (next_[p] >= 0) {
        auto& st = pairs_[MakeKey(sym_[p], sym_[next_[p]])];
        ++st.count;
        st.positions.push_back(static_cast<std::int32_t>(p));
      }
    }
    for (const auto& [key, st] : pairs_) heap_.push({st.count, key});
  }

  bool has_data() const { return !sym_.empty(); }

  // Picks the next pair to merge; false if none is left.
  bool NextPair(const Vocabulary& vocab, PairKey* out) {
    while (!heap_.empty()) {
      HeapEntry top = heap_.top();
      heap_.pop();
      auto it = pairs_.find(top.key);
      if (it == pairs_.end() || it->second.banned) continue;
      PairStats& st = it->second;
      if (st.count <= 0) continue;
      if (st.count != top.count) {
        heap_.push({st.count, top.key});
        continue;
      }
      const auto l = static_cast<TokenId>(top.key >> 32);
      const auto r = static_cast<TokenId>(top.key & 0xffffffffu);
      if (vocab.contains(vocab.token(l) + vocab.token(r))) {
        st.banned = true;
        continue;
      }
      *out = top.key;
      return true;
    }
    return false;
  }

  void ApplyMerge(PairKey key, std::int32_t merged) {
    const auto a = static_cast<std::int32_t>(key >> 32);
    const auto b = static_cast<std::int32_t>(key & 0xffffffffu);
    std::vector<std::int32_t> positions = std::move(pairs_[key].positions);
    std::sort(positions.begin(), positions.end());
    positions.erase(std::unique(positions.begin(), positions.end()),
                    positions.end());
    touched_.clear();
    for (std::int32_t pos : positions) {
      if (sym_[pos] != a) continue;
      const std::int32_t nx = next_[pos];
      if (nx < 0 || sym_[nx] != b) continue;
      const std::int32_t pv = prev_[pos];
      const std::int32_t nn = next_[nx];
      if (pv >= 0) {
        Decrement(MakeKey(sym_[pv], a));
        Increment(MakeKey(sym_[pv], merged), pv);
      }
      Decrement(key);
      if (nn >= 0) {
        Decrement(MakeKey(b, sym_[nn]));
        Increment(MakeKey(merged, sym_[nn]), pos);
      }
      sym_[pos] = merged;
      sym_[nx] = -1;
      next_[pos] = nn;
      if (nn >= 0) prev_[nn] = pos;
    }
    pairs_.erase(key);
    std::sort(touched_.begin(), touched_.end());
    touched_.erase(std::unique(touched_.begin(), touched_.end()), touched_.end());
    for (PairKey k : touched_) {
      auto it = pairs_.find(k);
      if (it != pairs_.end() && it->second.count > 0) {
        heap_.push({it->second.count, k});
      }
    }
  }

 private:
  void AddChunk(std::string_view chunk) {
    if (chunk.empty()) return;
    const auto start = static_cast<std::int32_t>(sym_.size());
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      const auto p = static_cast<std::int32_t>(sym_.size());
      sym_.push_back(static_cast<unsigned char>(chunk[i]));
      prev_.push_back(p == start ? -1 : p - 1);
      next_.push_back(i + 1 < chunk.size() ? p + 1 : -1);
    }
  }

  void Decrement(PairKey k) {
    auto it = pairs_.find(k);
    if (it != pairs_.end()) --it->second.count;
  }

  void Increment(PairKey k, std::int32_t pos) {
    auto& st = pairs_[k];
    ++st.count;
    st.positions.push_back(pos);
    touched_.push_back(k);
  }

  std::vector<std::int32_t> sym_;
  std::vector<std::int32_t> prev_;
  std::vector<std::int32_t> next_;
  std::unordered_map<PairKey, PairStats> pairs_;
  std::priority_queue<HeapEntry> heap_;
  std::vector<PairKey> touched_;
};

}  // namespace

Vocabulary TrainBpe(std::span<const Dataset* const> datasets,
                    std::size_t vocab_size, const TrainOptions& options) {
  if (vocab_size < kByteAlphabetSize + 1) {
    throw ArgumentError("vocab_size must be at least 257");
  }
  Trainer trainer(datasets, options);
  if (!trainer.has_data()) throw ArgumentError("empty training data");
  Vocabulary vocab;
  while (vocab.size() < vocab_size) {
    PairKey key;
    if (!trainer.NextPair(vocab, &key)) {
      vocab.set_exhausted(true);
      break;
    }
    const TokenId id = vocab.AddMerge(static_cast<TokenId>(key >> 32),
                                      static_cast<TokenId>(key & 0xffffffffu));
    trainer.ApplyMerge(key, static_cast<std::int32_t>(id));
  }
  return vocab;
}

Vocabulary TrainBpe(const std::vector<Dataset>& datasets,
                    std::size_t vocab_size, const TrainOptions& options) {
  std::vector<const Dataset*> ptrs;
  ptrs.reserve(datasets.size());
  for (const auto& d : datasets) ptrs.push_back(&d);
  return TrainBpe(std::span<const Dataset* const>(ptrs), vocab_size, options);
}

// ---------------------------------------------------------------------------
// Encoding

namespace {

void EncodeChunk(const Vocabulary& vocab, std::string_view text, Encoding& out) {
  const auto n = static_cast<std::int32_t>(text.size());
  if (n == 0) return;
  std::vector<TokenId> sym(n);
  std::vector<std::int32_t> next(n);
  std::vector<std::int32_t> prev(n);
  for (std::int32_t i = 0; i < n; ++i) {
    sym[i] = static_cast<unsigned char>(text[i]);
    next[i] = i + 1 < n ? i + 1 : -1;
    prev[i] = i - 1;
  }
  using Entry = std::pair<std::uint32_t, std::int32_t>;  // (rank, position)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  auto push = [&](std::int32_t pos) {
    if (pos < 0 || next[pos] < 0) return;
    if (auto r = vocab.merge_rank(sym[pos], sym[next[pos]])) {
      heap.push({static_cast<std::uint32_t>(*r), pos});
    }
  };
  for (std::int32_t i = 0; i + 1 < n; ++i) push(i);
  const auto& merges = vocab.merges();
  while (!heap.empty()) {
    auto [rank, pos] = heap.top();
    heap.pop();
    const std::int32_t nx = next[pos];
    // Dead or changed symbols invalidate the entry.
    if (nx < 0 || sym[pos] == TokenId(-1)) continue;
    const MergePair& m = merges[rank];
    if (sym[pos] != m.left || sym[nx] != m.right) continue;
    sym[pos] = static_cast<TokenId>(kByteAlphabetSize + rank);
    sym[nx] = TokenId(-1);
    next[pos] = next[nx];
    if (next[pos] >= 0) prev[next[pos]] = pos;
    push(prev[pos]);
    push(pos);
  }
  for (std::int32_t p = 0; p >= 0; p = next[p]) out.push_back(sym[p]);
}

}  // namespace

Encoding Encode(const Vocabulary& vocab, std::string_view text,
                const Pretokenizer& pretokenizer) {
  Encoding out;
  if (pretokenizer) {
    for (std::string_view chunk : pretokenizer(text)) EncodeChunk(vocab, chunk, out);
  } else {
    EncodeChunk(vocab, text, out);
  }
  return out;
}

std::string Decode(const Vocabulary& vocab, std::span<const TokenId> ids) {
  std::string out;
  for (TokenId id : ids) out += vocab.token(id);
  return out;
}

double BytesPerToken(const Vocabulary& vocab, std::string_view text) {
  if (text.empty()) throw ArgumentError("bytes_per_token of empty text");
  const Encoding enc = Encode(vocab, text);
  return static_cast<double>(text.size()) / static_cast<double>(enc.size());
}

// ---------------------------------------------------------------------------
// Serialization

std::filesystem::path MergesPath(const std::filesystem::path& vocab_path) {
  std::filesystem::path p = vocab_path;
  p += ".merges";
  return p;
}

void SaveVocabulary(const Vocabulary& vocab, const std::filesystem::path& path) {
  std::string tokens;
  for (const auto& t : vocab.tokens()) {
    tokens += Base64Encode(t);
    tokens += '\n';
  }
  std::string merges;
  for (const auto& m : vocab.merges()) {
    merges += Base64Encode(vocab.token(m.left));
    merges += ' ';
    merges += Base64Encode(vocab.token(m.right));
    merges += '\n';
  }
  // Merges first: a vocabulary file is only considered present once its
  // merges are.
  WriteFileAtomic(MergesPath(path), merges);
  WriteFileAtomic(path, tokens);
}

namespace {

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }
  return lines;
}

}  // namespace

Vocabulary LoadVocabulary(const std::filesystem::path& path) {
  const std::string source = path.string();
  const std::string token_text = ReadFile(path);
  const auto token_lines = SplitLines(token_text);
  std::vector<std::string> tokens;
  tokens.reserve(token_lines.size());
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < token_lines.size(); ++i) {
    auto bytes = Base64Decode(token_lines[i]);
    if (!bytes || bytes->empty()) {
      throw ParseError(source, i + 1, "invalid base64 token");
    }
    if (i < kByteAlphabetSize &&
        *bytes != std::string(1, static_cast<char>(i))) {
      throw ParseError(source, i + 1, "line must hold byte " + std::to_string(i));
    }
    if (!seen.emplace(*bytes, i).second) {
      throw ParseError(source, i + 1, "duplicate token");
    }
    tokens.push_back(std::move(*bytes));
  }
  if (tokens.size() < kByteAlphabetSize) {
    throw ParseError(source, tokens.size() + 1, "truncated byte alphabet");
  }

  const auto merges_path = MergesPath(path);
  const std::string merges_source = merges_path.string();
  const std::string merge_text = ReadFile(merges_path);
  const auto merge_lines = SplitLines(merge_text);
  if (merge_lines.size() != tokens.size() - kByteAlphabetSize) {
    throw ParseError(merges_source, 0,
                     "expected " + std::to_string(tokens.size() - kByteAlphabetSize) +
                         " merges, found " + std::to_string(merge_lines.size()));
  }
  Vocabulary vocab;
  for (std::size_t k = 0; k < merge_lines.size(); ++k) {
    const std::size_t line = k + 1;
    std::string_view text = merge_lines[k];
    const std::size_t sp = text.find(' ');
    if (sp == std::string_view::npos) {
      throw ParseError(merges_source, line, "expected two fields");
    }
    auto left = Base64Decode(text.substr(0, sp));
    auto right = Base64Decode(text.substr(sp + 1));
    if (!left || !right) throw ParseError(merges_source, line, "invalid base64");
    auto l = vocab.find(*left);
    auto r = vocab.find(*right);
    if (!l || !r) {
      throw ParseError(merges_source, line,
                       "merge input is not an earlier token");
    }
    if (*left + *right != tokens[kByteAlphabetSize + k]) {
      throw ParseError(merges_source, line,
                       "merge pair does not concatenate to token on line " +
                           std::to_string(kByteAlphabetSize + k + 1));
    }
    vocab.AddMerge(*l, *r);
  }
  return vocab;
}

std::string VocabularyFingerprint(const Vocabulary& vocab) {
  Hasher h;
  h.Add(static_cast<std::uint64_t>(vocab.size()));
  for (const auto& t : vocab.tokens()) h.Add(t);
  for (const auto& m : vocab.merges()) {
    h.Add(static_cast<std::uint64_t>(m.left));
    h.Add(static_cast<std::uint64_t>(m.right));
  }
  return h.HexDigest();
}

}  // namespace vocableak
