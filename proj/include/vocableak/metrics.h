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

#ifndef VOCABLEAK_METRICS_H_
#define VOCABLEAK_METRICS_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vocableak/attacks.h"
#include "vocableak/corpus.h"

namespace vocableak {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocReport {
  // Sorted by fpr, from (0,0) to (1,1); one point per distinct score.
  std::vector<RocPoint> points;
  double auc = 0.5;
  double balanced_accuracy = 0.5;
  std::map<double, double> tpr_at_fpr;
  std::size_t n_members = 0;
  std::size_t n_nonmembers = 0;
};

inline const std::vector<double> kDefaultFprLevels = {0.001, 0.01, 0.1};

// Higher scores mean "member". AUC is the Mann-Whitney statistic with ties
// counted as 1/2; balanced accuracy is the best (TPR + TNR) / 2 over the
// threshold sweep; tpr_at_fpr[f] is the largest TPR at FPR <= f, with no
// interpolation. Throws ArgumentError unless both classes are present.
RocReport MakeRocReport(std::span<const double> scores,
                        std::span<const bool> labels,
                        std::span<const double> fpr_levels = kDefaultFprLevels);

// Every signal must carry a label.
RocReport MakeRocReport(std::span<const AttackSignal> signals,
                        std::span<const double> fpr_levels = kDefaultFprLevels);

// Area under the piecewise-linear curve through `points`.
double TrapezoidArea(std::span<const RocPoint> points);

struct SizeBin {
  std::size_t lo = 0;  // inclusive
  std::size_t hi = 0;  // exclusive

  std::string Label() const;
};

struct BinReport {
  SizeBin bin;
  std::size_t n_datasets = 0;
  // Absent when the bin is empty or holds a single class.
  std::optional<RocReport> report;
  std::string note;
};

// Routes signals by their dataset's sample_count. Throws ArgumentError for
// overlapping or empty bins.
std::vector<BinReport> SizeBinnedReport(
    std::span<const AttackSignal> signals, const Corpus& corpus,
    std::span<const SizeBin> bins,
    std::span<const double> fpr_levels = kDefaultFprLevels);

// {"auc", "balanced_accuracy", "tpr_at_fpr": {"0.01": ...}, "n_members",
// "n_nonmembers"}; the caller adds identifying fields.
std::string RocReportJson(const RocReport& report);

// "fpr\ttpr" rows for plotting.
void WriteRocPoints(const RocReport& report, const std::filesystem::path& path);

}  // namespace vocableak

#endif  // VOCABLEAK_METRICS_H_
