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

#include "vocableak/shadow.h"

#include <cmath>

#include "json.hpp"
#include "vocableak/errors.h"
#include "vocableak/util.h"

namespace vocableak {

using nlohmann::json;

std::filesystem::path ShadowStore::PathFor(const std::string& corpus_fingerprint,
                                           const IdSet& trained_on,
                                           std::size_t vocab_size) const {
  Hasher h;
  h.Add(corpus_fingerprint);
  h.Add(static_cast<std::uint64_t>(vocab_size));
  h.Add(static_cast<std::uint64_t>(trained_on.size()));
  for (const auto& id : trained_on) h.Add(id);
  const std::string key = h.HexDigest();
  return root_ / key.substr(0, 2) / (key + ".vocab");
}

ShadowEnsemble TrainEnsemble(const Corpus& corpus,
                             const EnsembleOptions& options) {
  if (options.n_shadows < 2) throw ArgumentError("need at least 2 shadows");
  if (!(options.sample_fraction > 0.0 && options.sample_fraction < 1.0)) {
    throw ArgumentError("sample_fraction must lie in (0,1)");
  }
  const auto sample_size = static_cast<std::size_t>(std::llround(
      options.sample_fraction * static_cast<double>(corpus.size())));
  if (sample_size == 0) throw ArgumentError("shadow sample would be empty");

  const std::string fingerprint =
      options.store ? corpus.Fingerprint() : std::string();
  ShadowEnsemble ensemble;
  ensemble.vocab_size = options.vocab_size;
  ensemble.shadows.resize(options.n_shadows);
  ParallelFor(options.n_shadows, options.threads, [&](std::size_t k) {
    ShadowRecord& rec = ensemble.shadows[k];
    rec.seed = DeriveSeed(options.seed, "shadow", k);
    rec.trained_on = SampleAux(corpus, sample_size, rec.seed);
    try {
      if (options.store) {
        rec.vocab_file = options.store->PathFor(fingerprint, rec.trained_on,
                                                options.vocab_size);
        if (std::filesystem::exists(rec.vocab_file) &&
            std::filesystem::exists(MergesPath(rec.vocab_file))) {
          rec.vocabulary = LoadVocabulary(rec.vocab_file);
          return;
        }
      }
      auto data = corpus.select(rec.trained_on);
      rec.vocabulary = TrainBpe(data, options.vocab_size);
      if (options.store) SaveVocabulary(rec.vocabulary, rec.vocab_file);
    } catch (const Error& e) {
      throw Error("shadow " + std::to_string(k) + ": " + e.what());
    }
  });
  return ensemble;
}

InOutPartition PartitionInOut(const ShadowEnsemble& ensemble,
                              const DatasetId& dataset_id) {
  InOutPartition part;
  for (const auto& s : ensemble.shadows) {
    (s.trained_on.count(dataset_id) ? part.v_in : part.v_out)
        .push_back(&s.vocabulary);
  }
  if (part.v_in.empty() || part.v_out.empty()) {
    throw DegeneratePartitionError(
        "dataset '" + dataset_id + "' is in " + std::to_string(part.v_in.size()) +
        " of " + std::to_string(ensemble.size()) + " shadows");
  }
  return part;
}

void SaveEnsembleManifest(const ShadowEnsemble& ensemble,
                          const std::filesystem::path& path) {
  const auto base = path.parent_path();
  json shadows = json::array();
  for (const auto& s : ensemble.shadows) {
    std::filesystem::path file = s.vocab_file;
    if (!file.empty() && !base.empty()) {
      file = std::filesystem::proximate(file, base);
    }
    shadows.push_back({{"seed", s.seed},
                       {"vocab_file", file.generic_string()},
                       {"trained_on", s.trained_on}});
  }
  json j = {{"vocab_size", ensemble.vocab_size}, {"shadows", shadows}};
  WriteFileAtomic(path, j.dump(2) + "\n");
}

ShadowEnsemble LoadEnsemble(const std::filesystem::path& manifest_path) {
  json j;
  try {
    j = json::parse(ReadFile(manifest_path));
  } catch (const json::exception& e) {
    throw ParseError(manifest_path.string(), 0, e.what());
  }
  ShadowEnsemble ensemble;
  try {
    ensemble.vocab_size = j.at("vocab_size").get<std::size_t>();
    for (const auto& s : j.at("shadows")) {
      ShadowRecord rec;
      rec.seed = s.at("seed").get<std::uint64_t>();
      rec.trained_on = s.at("trained_on").get<IdSet>();
      std::filesystem::path file = s.at("vocab_file").get<std::string>();
      if (file.is_relative()) file = manifest_path.parent_path() / file;
      rec.vocab_file = file;
      rec.vocabulary = LoadVocabulary(file);
      ensemble.shadows.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw ParseError(manifest_path.string(), 0, e.what());
  }
  return ensemble;
}

}  // namespace vocableak
