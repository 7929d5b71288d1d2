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

#include "vocableak/corpus.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "vocableak/errors.h"
#include "vocableak/util.h"

namespace vocableak {

using nlohmann::json;

std::size_t Dataset::byte_count() const {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.size();
  return n;
}

Corpus::Corpus(std::vector<Dataset> datasets) : datasets_(std::move(datasets)) {
  for (std::size_t i = 0; i < datasets_.size(); ++i) {
    const Dataset& d = datasets_[i];
    if (d.id.empty()) throw ArgumentError("dataset id must be non-empty");
    if (d.documents.empty()) {
      throw ArgumentError("dataset '" + d.id + "' has no documents");
    }
    for (const auto& doc : d.documents) {
      if (doc.empty()) {
        throw ArgumentError("dataset '" + d.id + "' has an empty document");
      }
    }
    if (!index_.emplace(d.id, i).second) {
      throw ArgumentError("duplicate dataset id '" + d.id + "'");
    }
  }
}

bool Corpus::contains(std::string_view id) const {
  return index_.count(std::string(id)) > 0;
}

const Dataset& Corpus::at(std::string_view id) const {
  return datasets_[index_of(id)];
}

std::size_t Corpus::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) {
    throw ArgumentError("unknown dataset id '" + std::string(id) + "'");
  }
  return it->second;
}

std::vector<DatasetId> Corpus::ids() const {
  std::vector<DatasetId> out;
  out.reserve(datasets_.size());
  for (const auto& d : datasets_) out.push_back(d.id);
  return out;
}

IdSet Corpus::id_set() const {
  IdSet out;
  for (const auto& d : datasets_) out.insert(d.id);
  return out;
}

std::vector<const Dataset*> Corpus::select(const IdSet& ids) const {
  std::vector<const Dataset*> out;
  for (const auto& d : datasets_) {
    if (ids.count(d.id)) out.push_back(&d);
  }
  return out;
}

std::string Corpus::Fingerprint() const {
  Hasher h;
  h.Add(static_cast<std::uint64_t>(datasets_.size()));
  for (const auto& d : datasets_) {
    h.Add(d.id);
    h.Add(static_cast<std::uint64_t>(d.documents.size()));
    for (const auto& doc : d.documents) h.Add(doc);
  }
  return h.HexDigest();
}

IdSet AuxCollection::Union() const {
  IdSet out;
  for (const auto& s : samples) out.insert(s.begin(), s.end());
  return out;
}

Corpus ParseCorpus(std::string_view contents, const std::string& source) {
  std::vector<Dataset> datasets;
  std::unordered_map<std::string, std::size_t> index;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    std::size_t end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    std::string_view line = contents.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(source, line_no, e.what());
    }
    if (!record.is_object() || !record.contains("dataset_id") ||
        !record.contains("text") || !record["dataset_id"].is_string() ||
        !record["text"].is_string()) {
      throw ParseError(source, line_no,
                       "expected an object with string fields dataset_id, text");
    }
    std::string id = record["dataset_id"].get<std::string>();
    std::string text = record["text"].get<std::string>();
    if (id.empty()) throw ParseError(source, line_no, "empty dataset_id");
    if (text.empty()) throw ParseError(source, line_no, "empty text");
    auto [it, inserted] = index.emplace(id, datasets.size());
    if (inserted) datasets.push_back(Dataset{id, {}});
    datasets[it->second].documents.push_back(std::move(text));
  }
  if (datasets.empty()) throw EmptyCorpusError(source + ": corpus is empty");
  return Corpus(std::move(datasets));
}

Corpus LoadCorpus(const std::filesystem::path& path) {
  return ParseCorpus(ReadFile(path), path.string());
}

void SaveCorpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::string out;
  for (const auto& d : corpus.datasets()) {
    for (const auto& doc : d.documents) {
      json record = {{"dataset_id", d.id}, {"text", doc}};
      try {
        out += record.dump();
      } catch (const json::type_error& e) {
        throw ArgumentError("dataset '" + d.id + "' is not valid UTF-8: " + e.what());
      }
      out += '\n';
    }
  }
  WriteFileAtomic(path, out);
}

MembershipSplit SplitMembers(const Corpus& corpus, double member_fraction,
                             std::uint64_t seed) {
  if (!(member_fraction > 0.0 && member_fraction < 1.0)) {
    throw ArgumentError("member_fraction must lie in (0,1)");
  }
  if (corpus.size() < 2) {
    throw ArgumentError("membership split needs at least 2 datasets");
  }
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  auto rng = MakeRng(seed, "split");
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_members = static_cast<std::size_t>(
      std::llround(member_fraction * static_cast<double>(corpus.size())));
  MembershipSplit split;
  split.seed = seed;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& id = corpus[order[k]].id;
    (k < n_members ? split.member_ids : split.nonmember_ids).insert(id);
  }
  return split;
}

IdSet SampleAux(const Corpus& corpus, std::size_t size, std::uint64_t seed,
                const IdSet& exclude) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!exclude.count(corpus[i].id)) pool.push_back(i);
  }
  if (size > pool.size()) {
    throw ArgumentError("aux sample size " + std::to_string(size) +
                        " exceeds the " + std::to_string(pool.size()) +
                        " available datasets");
  }
  auto rng = MakeRng(seed, "aux-sample");
  // Partial Fisher-Yates: the first `size` slots are a uniform sample.
  for (std::size_t k = 0; k < size; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
    std::swap(pool[k], pool[pick(rng)]);
  }
  IdSet out;
  for (std::size_t k = 0; k < size; ++k) out.insert(corpus[pool[k]].id);
  return out;
}

AuxCollection SampleAuxCollection(const Corpus& corpus, std::size_t draws,
                                  std::size_t size, std::uint64_t seed,
                                  const IdSet& exclude) {
  if (draws == 0) throw ArgumentError("need at least one aux draw");
  AuxCollection aux;
  for (std::size_t i = 0; i < draws; ++i) {
    aux.samples.push_back(
        SampleAux(corpus, size, DeriveSeed(seed, "aux", i), exclude));
  }
  return aux;
}

std::string SplitToJson(const MembershipSplit& split) {
  json j = {{"seed", split.seed},
            {"member_ids", split.member_ids},
            {"nonmember_ids", split.nonmember_ids}};
  return j.dump(2) + "\n";
}

MembershipSplit SplitFromJson(std::string_view text) {
  try {
    json j = json::parse(text);
    MembershipSplit split;
    split.seed = j.at("seed").get<std::uint64_t>();
    split.member_ids = j.at("member_ids").get<IdSet>();
    split.nonmember_ids = j.at("nonmember_ids").get<IdSet>();
    return split;
  } catch (const json::exception& e) {
    throw ParseError("<split>", 0, e.what());
  }
}

std::string AuxToJson(const AuxCollection& aux, std::uint64_t seed) {
  json j = {{"seed", seed}, {"samples", aux.samples}};
  return j.dump(2) + "\n";
}

AuxCollection AuxFromJson(std::string_view text) {
  try {
    json j = json::parse(text);
    AuxCollection aux;
    aux.samples = j.at("samples").get<std::vector<IdSet>>();
    return aux;
  } catch (const json::exception& e) {
    throw ParseError("<aux>", 0, e.what());
  }
}

}  // namespace vocableak
