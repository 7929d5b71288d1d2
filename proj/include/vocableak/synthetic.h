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

// Synthetic corpora with planted distinctive strings.
//
// Every dataset draws words from one shared Zipf-distributed lexicon of
// pronounceable pseudo-words, boosts a handful of its own topic words, mixes
// in random alphanumeric noise and boilerplate footers at dataset-specific
// rates, and repeats a few marker strings that occur in no other dataset. Markers are planted in every
// dataset, so membership is the only thing that separates members from
// non-members once a split is drawn.

#ifndef VOCABLEAK_SYNTHETIC_H_
#define VOCABLEAK_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "vocableak/corpus.h"

namespace vocableak {

struct SyntheticOptions {
  std::size_t n_datasets = 200;
  // Dataset k gets docs_per_dataset[k % size] documents.
  std::vector<std::size_t> docs_per_dataset = {5, 20, 80};
  std::size_t words_per_doc = 40;
  std::size_t lexicon_size = 300;
  // 0 draws lexicon words uniformly.
  double zipf_exponent = 0.0;
  // Each dataset's exponent is uniform on zipf_exponent +/- zipf_spread.
  double zipf_spread = 0.0;
  std::size_t topic_words = 20;
  double topic_rate = 0.0;
  // Each dataset's noise rate is uniform on [0, noise_rate_max].
  double noise_rate_max = 0.0;
  // Expected boilerplate footers (navigation, legal text) appended per
  // document; each dataset's rate is uniform on [0, boilerplate_rate_max].
  double boilerplate_rate_max = 3.0;
  std::size_t markers_per_dataset = 3;
  std::size_t marker_length = 10;
  // Expected occurrences of each marker per document.
  double marker_rate = 1.0;
  std::uint64_t seed = 0;
};

// Throws ArgumentError on zero sizes, negative rates, or topic and noise
// rates above 1.
Corpus GenerateSyntheticCorpus(const SyntheticOptions& options);

}  // namespace vocableak

#endif  // VOCABLEAK_SYNTHETIC_H_
