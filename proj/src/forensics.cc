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

#include "vocableak/forensics.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "vocableak/errors.h"
#include "vocableak/util.h"

namespace vocableak {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::unordered_map<std::string_view, std::size_t> IndexPrefix(
    const ExternalVocab& v, std::size_t limit) {
  const std::size_t n = std::min(limit, v.tokens.size());
  std::unordered_map<std::string_view, std::size_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.emplace(v.tokens[i], i + 1);
  return out;
}

}  // namespace

VocabFormat ParseVocabFormat(std::string_view name) {
  if (name == "base64_lines") return VocabFormat::kBase64Lines;
  if (name == "token_rank_pairs") return VocabFormat::kTokenRankPairs;
  throw ArgumentError("unknown vocabulary format '" + std::string(name) + "'");
}

ExternalVocab ParseExternal(std::string_view contents, VocabFormat format,
                            std::string name) {
  ExternalVocab out;
  out.name = std::move(name);
  std::unordered_set<std::string> seen;
  std::int64_t last_rank = -1;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    std::size_t end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    std::string_view line = Trim(contents.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;

    std::string_view b64 = line;
    if (format == VocabFormat::kTokenRankPairs) {
      const std::size_t space = line.find_first_of(" \t");
      if (space == std::string_view::npos) {
        throw ParseError(out.name, line_no, "expected '<token> <rank>'");
      }
      b64 = line.substr(0, space);
      const std::string rank_text(Trim(line.substr(space + 1)));
      char* rest = nullptr;
      const long long rank = std::strtoll(rank_text.c_str(), &rest, 10);
      if (rank_text.empty() || *rest != '\0' || rank < 0) {
        throw ParseError(out.name, line_no, "bad rank '" + rank_text + "'");
      }
      if (rank <= last_rank) {
        throw ParseError(out.name, line_no,
                         "rank " + rank_text + " does not increase");
      }
      last_rank = rank;
    }
    auto token = Base64Decode(b64);
    if (!token || token->empty()) {
      throw ParseError(out.name, line_no, "bad base64 token");
    }
    if (!seen.insert(*token).second) {
      throw ParseError(out.name, line_no, "duplicate token");
    }
    out.tokens.push_back(std::move(*token));
  }
  return out;
}

ExternalVocab ImportExternal(const std::filesystem::path& path,
                             VocabFormat format, std::string name) {
  if (name.empty()) name = path.stem().string();
  return ParseExternal(ReadFile(path), format, std::move(name));
}

ExternalVocab FromVocabulary(const Vocabulary& vocab, std::string name) {
  return ExternalVocab{std::move(name), vocab.tokens()};
}

double JaccardSimilarity(const ExternalVocab& a, const ExternalVocab& b,
                         std::size_t limit) {
  if (limit < 1) throw ArgumentError("limit must be at least 1");
  const auto ia = IndexPrefix(a, limit);
  const auto ib = IndexPrefix(b, limit);
  if (ia.empty() && ib.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& [tok, _] : ia) inter += ib.count(tok);
  return static_cast<double>(inter) /
         static_cast<double>(ia.size() + ib.size() - inter);
}

double MergeIndexDivergence(const ExternalVocab& a, const ExternalVocab& b,
                            std::size_t limit) {
  if (limit < 1) throw ArgumentError("limit must be at least 1");
  const auto ib = IndexPrefix(b, limit);
  const std::size_t n = std::min(limit, a.tokens.size());
  double sum = 0.0;
  std::size_t shared = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto it = ib.find(a.tokens[i]);
    if (it == ib.end()) continue;
    const double ia = static_cast<double>(i + 1);
    sum += std::abs(ia - static_cast<double>(it->second));
    ++shared;
  }
  if (shared == 0) {
    throw InsufficientDataError("'" + a.name + "' and '" + b.name +
                                "' share no token");
  }
  return sum / static_cast<double>(shared);
}

ComparisonMatrices CompareAll(const std::vector<ExternalVocab>& vocabs,
                              std::size_t limit, unsigned threads) {
  const std::size_t n = vocabs.size();
  ComparisonMatrices m;
  for (const auto& v : vocabs) m.names.push_back(v.name);
  m.jaccard.assign(n, std::vector<double>(n, 0.0));
  m.divergence.assign(n, std::vector<double>(n, 0.0));
  ParallelFor(n * n, threads, [&](std::size_t k) {
    const std::size_t i = k / n, j = k % n;
    if (j < i) return;
    const double jac = JaccardSimilarity(vocabs[i], vocabs[j], limit);
    double div;
    try {
      div = MergeIndexDivergence(vocabs[i], vocabs[j], limit);
    } catch (const InsufficientDataError&) {
      div = std::numeric_limits<double>::quiet_NaN();
    }
    m.jaccard[i][j] = m.jaccard[j][i] = jac;
    m.divergence[i][j] = m.divergence[j][i] = div;
  });
  return m;
}

std::string MatrixTsv(const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& values) {
  std::string out = "name";
  for (const auto& n : names) out += "\t" + n;
  out += "\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    out += names[i];
    for (double v : values[i]) out += "\t" + (std::isnan(v) ? std::string("nan") : FormatDouble(v));
    out += "\n";
  }
  return out;
}

}  // namespace vocableak
