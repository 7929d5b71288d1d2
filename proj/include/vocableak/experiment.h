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

// End-to-end experiment: split the corpus, train the target and the shadows,
// attack, evaluate, and repeat the attacks against min-count filtered targets.
//
// Output layout under output_dir:
//
//   config.json  manifest.json  split.json  aux.json  shadow_store/
//   v<size>/target.vocab  shadows.json  fe_shadow.vocab  fit.json
//   v<size>/signals/<key>.tsv  roc/<key>.tsv  reports.json
//   v<size>/defense/n_min_<n>/{target.vocab, utility.json, signals/, roc/,
//                              reports.json}
//
// <key> is the method name, with "_k<k>" appended for naive_bayes.

#ifndef VOCABLEAK_EXPERIMENT_H_
#define VOCABLEAK_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "vocableak/attacks.h"
#include "vocableak/metrics.h"
#include "vocableak/powerlaw.h"

namespace vocableak {

inline constexpr const char* kOutputDirEnv = "VOCABLEAK_OUTPUT_DIR";

struct ExperimentConfig {
  std::filesystem::path corpus_path;
  std::vector<std::size_t> vocab_sizes;
  std::size_t n_shadows = 16;
  double shadow_fraction = 0.5;
  std::size_t n_aux_draws = 10;
  std::size_t aux_size = 50;
  double member_fraction = 0.5;
  std::vector<std::size_t> k_rare = {100};
  std::vector<std::int64_t> n_min = {1};
  std::vector<double> fpr_levels = kDefaultFprLevels;
  std::vector<SizeBin> size_bins;
  std::vector<AttackMethod> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "vocableak_out";
  unsigned threads = 1;
};

// Throws ArgumentError naming the offending field.
void ValidateConfig(const ExperimentConfig& config);

// Keys are the field names above; size_bins is a list of [lo, hi) pairs and
// methods a list of method names. Missing keys keep their defaults except
// corpus_path and vocab_sizes, which are required.
ExperimentConfig ConfigFromJson(std::string_view json, const std::string& source = "<config>");
std::string ConfigToJson(const ExperimentConfig& config);

// Reads the file, then applies VOCABLEAK_OUTPUT_DIR if it is set.
ExperimentConfig LoadConfig(const std::filesystem::path& path);

// SHA-256 of the canonical JSON form, excluding output_dir and threads.
std::string ConfigHash(const ExperimentConfig& config);

std::string SignalKey(AttackMethod method, std::size_t k = 0);

struct DefenseOutcome {
  std::int64_t n_min = 1;
  std::size_t vocab_size = 0;
  std::size_t removed_count = 0;
  // Bytes per token over the member datasets' documents.
  double bytes_per_token = 0.0;
  std::map<std::string, RocReport> reports;
};

struct VocabSizeOutcome {
  std::size_t vocab_size = 0;
  PowerLawFit fit;
  std::map<std::string, RocReport> reports;
  std::map<std::string, std::vector<BinReport>> binned;
  std::vector<DefenseOutcome> defense;
  // Datasets left out of the shadow-based methods (degenerate partition).
  std::vector<DatasetId> skipped;
};

struct ExperimentOutcome {
  std::string config_hash;
  std::vector<VocabSizeOutcome> per_vocab_size;
  double seconds = 0.0;
};

struct RunOptions {
  // Progress lines, e.g. "v4000/shadows done in 12.3s". Optional.
  std::function<void(const std::string&)> log;
};

// Stages already completed under output_dir for the same config hash are
// loaded from disk instead of recomputed. A failing stage throws Error with
// the stage name in the message; earlier stages stay on disk.
ExperimentOutcome RunExperiment(const ExperimentConfig& config,
                                const RunOptions& options = {});

}  // namespace vocableak

#endif  // VOCABLEAK_EXPERIMENT_H_
