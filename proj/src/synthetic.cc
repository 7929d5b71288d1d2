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

#include "vocableak/synthetic.h"

#include <cmath>
#include <cstdio>
#include <random>
#include <unordered_set>

#include "vocableak/errors.h"
#include "vocableak/util.h"

namespace vocableak {
namespace {

constexpr std::string_view kOnsets[] = {"b", "d", "f", "g", "h", "k", "l", "m",
                                        "n", "p", "r", "s", "t", "v", "w", "z",
                                        "br", "st", "tr", "ch", "sh", "pl"};
constexpr std::string_view kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou", "ea"};
constexpr std::string_view kCodas[] = {"", "", "", "n", "r", "s", "t", "l", "nd", "ck"};
constexpr std::string_view kFooters[] = {
    "Home | About us | Contact | Privacy policy | Terms of service",
    "Copyright 2024. All rights reserved. Reproduction without permission is prohibited.",
    "Share this page: Facebook Twitter LinkedIn Email Print",
    "Subscribe to our newsletter to receive the latest updates in your inbox.",
    "This site uses cookies to improve your experience. Accept | Decline | Settings",
    "Posted in News | Leave a comment | Permalink | Back to top",
    "Related articles | Most popular | Editor's picks | Archives",
    "Powered by a content management system. Theme by the design team.",
};
constexpr std::string_view kNoiseChars = "abcdefghijklmnopqrstuvwxyz0123456789";
constexpr std::string_view kMarkerChars = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

template <std::size_t N>
std::string_view Pick(const std::string_view (&options)[N], std::mt19937_64& rng) {
  return options[std::uniform_int_distribution<std::size_t>(0, N - 1)(rng)];
}

std::string RandomString(std::string_view alphabet, std::size_t len,
                         std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string s(len, ' ');
  for (char& c : s) c = alphabet[pick(rng)];
  return s;
}

// floor(rate), plus one with probability frac(rate).
std::size_t Occurrences(double rate, double u) {
  const double whole = std::floor(rate);
  return static_cast<std::size_t>(whole) + (u < rate - whole ? 1 : 0);
}

std::vector<std::string> MakeLexicon(std::size_t size, std::mt19937_64& rng) {
  std::vector<std::string> words;
  std::unordered_set<std::string> seen;
  std::uniform_int_distribution<int> syllables(1, 3);
  while (words.size() < size) {
    std::string w;
    for (int s = syllables(rng); s > 0; --s) {
      w += Pick(kOnsets, rng);
      w += Pick(kVowels, rng);
      w += Pick(kCodas, rng);
    }
    if (seen.insert(w).second) words.push_back(std::move(w));
  }
  return words;
}

}  // namespace

Corpus GenerateSyntheticCorpus(const SyntheticOptions& o) {
  if (o.n_datasets == 0 || o.docs_per_dataset.empty() || o.words_per_doc == 0 ||
      o.lexicon_size == 0 || o.marker_length == 0) {
    throw ArgumentError("synthetic corpus sizes must be positive");
  }
  for (std::size_t n : o.docs_per_dataset) {
    if (n == 0) throw ArgumentError("datasets need at least one document");
  }
  for (double rate : {o.topic_rate, o.noise_rate_max}) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw ArgumentError("rates must lie in [0, 1]");
  }
  if (!(o.zipf_spread >= 0.0) || !(o.zipf_exponent - o.zipf_spread >= 0.0)) {
    throw ArgumentError("zipf exponent range must stay non-negative");
  }
  if (!(o.marker_rate >= 0.0) || !(o.boilerplate_rate_max >= 0.0)) {
    throw ArgumentError("marker and boilerplate rates must be >= 0");
  }
  if (o.topic_words > o.lexicon_size) {
    throw ArgumentError("topic_words exceeds lexicon_size");
  }

  auto lexicon_rng = MakeRng(o.seed, "synthetic-lexicon");
  const std::vector<std::string> lexicon = MakeLexicon(o.lexicon_size, lexicon_rng);

  std::unordered_set<std::string> used_markers;
  std::vector<Dataset> datasets;
  datasets.reserve(o.n_datasets);
  const int id_width = static_cast<int>(std::to_string(o.n_datasets - 1).size());
  for (std::size_t k = 0; k < o.n_datasets; ++k) {
    auto rng = MakeRng(o.seed, "synthetic-dataset", k);
    char id[32];
    std::snprintf(id, sizeof id, "ds%0*zu", id_width, k);
    Dataset d;
    d.id = id;

    std::vector<std::string> markers;
    while (markers.size() < o.markers_per_dataset) {
      std::string m = RandomString(kMarkerChars, o.marker_length, rng);
      if (used_markers.insert(m).second) markers.push_back(std::move(m));
    }
    std::vector<std::size_t> topic;
    std::uniform_int_distribution<std::size_t> any_word(0, lexicon.size() - 1);
    for (std::size_t t = 0; t < o.topic_words; ++t) topic.push_back(any_word(rng));
    const double noise_rate =
        std::uniform_real_distribution<double>(0.0, o.noise_rate_max)(rng);
    const double footer_rate =
        std::uniform_real_distribution<double>(0.0, o.boilerplate_rate_max)(rng);

    const double exponent = std::uniform_real_distribution<double>(
        o.zipf_exponent - o.zipf_spread, o.zipf_exponent + o.zipf_spread)(rng);
    std::vector<double> weights(lexicon.size());
    for (std::size_t r = 0; r < weights.size(); ++r) {
      weights[r] = std::pow(static_cast<double>(r + 1), -exponent);
    }
    std::discrete_distribution<std::size_t> zipf(weights.begin(), weights.end());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> noise_len(3, 8);
    std::uniform_int_distribution<std::size_t> topic_pick(
        0, o.topic_words > 0 ? o.topic_words - 1 : 0);
    const std::size_t n_docs = o.docs_per_dataset[k % o.docs_per_dataset.size()];
    for (std::size_t doc = 0; doc < n_docs; ++doc) {
      std::vector<std::string> words;
      words.reserve(o.words_per_doc + markers.size() * 2);
      for (std::size_t w = 0; w < o.words_per_doc; ++w) {
        const double u = unit(rng);
        if (u < noise_rate) {
          words.push_back(RandomString(kNoiseChars, noise_len(rng), rng));
        } else if (o.topic_words > 0 && u < noise_rate + o.topic_rate) {
          words.push_back(lexicon[topic[topic_pick(rng)]]);
        } else {
          words.push_back(lexicon[zipf(rng)]);
        }
      }
      for (const auto& m : markers) {
        const std::size_t copies = Occurrences(o.marker_rate, unit(rng));
        for (std::size_t c = 0; c < copies; ++c) {
          std::uniform_int_distribution<std::size_t> at(0, words.size());
          words.insert(words.begin() + static_cast<std::ptrdiff_t>(at(rng)), m);
        }
      }
      std::string text;
      for (std::size_t w = 0; w < words.size(); ++w) {
        if (w > 0) text += ' ';
        text += words[w];
      }
      for (std::size_t f = Occurrences(footer_rate, unit(rng)); f > 0; --f) {
        text += '\n';
        text += Pick(kFooters, rng);
      }
      d.documents.push_back(std::move(text));
    }
    datasets.push_back(std::move(d));
  }
  return Corpus(std::move(datasets));
}

}  // namespace vocableak
