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

// Datasets, corpora, membership splits and auxiliary samples.
//
// A Corpus is the membership universe: a collection of named datasets, each
// a bag of documents. Inference is always at dataset granularity.

#ifndef VOCABLEAK_CORPUS_H_
#define VOCABLEAK_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vocableak {

using DatasetId = std::string;
using IdSet = std::set<DatasetId>;

struct Dataset {
  DatasetId id;
  std::vector<std::string> documents;

  std::size_t sample_count() const { return documents.size(); }
  std::size_t byte_count() const;
};

class Corpus {
 public:
  Corpus() = default;
  // Throws ArgumentError on empty/duplicate ids or empty documents.
  explicit Corpus(std::vector<Dataset> datasets);

  std::size_t size() const { return datasets_.size(); }
  bool empty() const { return datasets_.empty(); }
  const std::vector<Dataset>& datasets() const { return datasets_; }
  const Dataset& operator[](std::size_t i) const { return datasets_[i]; }

  bool contains(std::string_view id) const;
  // Throws ArgumentError for unknown ids.
  const Dataset& at(std::string_view id) const;
  std::size_t index_of(std::string_view id) const;

  // Ids in corpus (first-seen) order.
  std::vector<DatasetId> ids() const;
  IdSet id_set() const;

  // Datasets whose ids are in `ids`, in corpus order.
  std::vector<const Dataset*> select(const IdSet& ids) const;

  // Content digest over ids and document bytes, in order.
  std::string Fingerprint() const;

 private:
  std::vector<Dataset> datasets_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct MembershipSplit {
  IdSet member_ids;
  IdSet nonmember_ids;
  std::uint64_t seed = 0;

  bool is_member(std::string_view id) const {
    return member_ids.count(std::string(id)) > 0;
  }
};

// N independent auxiliary draws; their union plays the role of the
// adversary's estimate of the underlying distribution.
struct AuxCollection {
  std::vector<IdSet> samples;

  IdSet Union() const;
};

// Reads line-delimited JSON records {"dataset_id": ..., "text": ...}.
// Documents are grouped by dataset id in first-seen order.
Corpus LoadCorpus(const std::filesystem::path& path);
Corpus ParseCorpus(std::string_view contents,
                   const std::string& source = "<corpus>");
// Throws ArgumentError if a document is not valid UTF-8.
void SaveCorpus(const Corpus& corpus, const std::filesystem::path& path);

// Uniform split: exactly round(member_fraction * |corpus|) members.
MembershipSplit SplitMembers(const Corpus& corpus, double member_fraction,
                             std::uint64_t seed);

// Uniform sample without replacement from corpus ids minus `exclude`.
IdSet SampleAux(const Corpus& corpus, std::size_t size, std::uint64_t seed,
                const IdSet& exclude = {});

// `draws` independent samples; draw i uses seed stream (seed, "aux", i).
AuxCollection SampleAuxCollection(const Corpus& corpus, std::size_t draws,
                                  std::size_t size, std::uint64_t seed,
                                  const IdSet& exclude = {});

std::string SplitToJson(const MembershipSplit& split);
MembershipSplit SplitFromJson(std::string_view json);
std::string AuxToJson(const AuxCollection& aux, std::uint64_t seed);
AuxCollection AuxFromJson(std::string_view json);

}  // namespace vocableak

#endif  // VOCABLEAK_CORPUS_H_
