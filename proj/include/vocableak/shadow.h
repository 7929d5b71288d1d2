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

// Shadow tokenizers. Each shadow trains on an independent uniform sample of
// the corpus; IN/OUT sets for a target dataset are recovered afterwards by
// membership lookup, so one ensemble serves every target.

#ifndef VOCABLEAK_SHADOW_H_
#define VOCABLEAK_SHADOW_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vocableak/bpe.h"
#include "vocableak/corpus.h"

namespace vocableak {

struct ShadowRecord {
  Vocabulary vocabulary;
  IdSet trained_on;
  std::uint64_t seed = 0;
  // Where the vocabulary is stored, if it came from or went to a store.
  std::filesystem::path vocab_file;
};

struct ShadowEnsemble {
  std::vector<ShadowRecord> shadows;
  std::size_t vocab_size = 0;

  std::size_t size() const { return shadows.size(); }
};

// Non-owning views into an ensemble.
struct InOutPartition {
  std::vector<const Vocabulary*> v_in;
  std::vector<const Vocabulary*> v_out;
};

// Content-addressed on-disk cache of shadow vocabularies, keyed by
// (corpus fingerprint, trained_on, vocab_size).
class ShadowStore {
 public:
  explicit ShadowStore(std::filesystem::path root) : root_(std::move(root)) {}

  std::filesystem::path PathFor(const std::string& corpus_fingerprint,
                                const IdSet& trained_on,
                                std::size_t vocab_size) const;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
};

struct EnsembleOptions {
  std::size_t n_shadows = 96;
  double sample_fraction = 0.5;
  std::size_t vocab_size = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  // Optional cache; vocabularies found there are loaded instead of trained.
  const ShadowStore* store = nullptr;
};

// Shadow k trains on round(sample_fraction * |corpus|) datasets drawn with
// seed stream (seed, "shadow", k). The result does not depend on `threads`.
ShadowEnsemble TrainEnsemble(const Corpus& corpus, const EnsembleOptions& options);

// Throws DegeneratePartitionError if v_in or v_out would be empty.
InOutPartition PartitionInOut(const ShadowEnsemble& ensemble,
                              const DatasetId& dataset_id);

// Manifest: {"vocab_size": n, "shadows": [{seed, vocab_file, trained_on}]}.
// Vocabulary paths are written relative to the manifest's directory when
// possible.
void SaveEnsembleManifest(const ShadowEnsemble& ensemble,
                          const std::filesystem::path& path);
ShadowEnsemble LoadEnsemble(const std::filesystem::path& manifest_path);

}  // namespace vocableak

#endif  // VOCABLEAK_SHADOW_H_
