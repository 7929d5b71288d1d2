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

#include "vocableak/metrics.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "json.hpp"
#include "vocableak/errors.h"
#include "vocableak/util.h"

namespace vocableak {

RocReport MakeRocReport(std::span<const double> scores,
                        std::span<const bool> labels,
                        std::span<const double> fpr_levels) {
  if (scores.size() != labels.size()) {
    throw ArgumentError("scores and labels differ in length");
  }
  RocReport r;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw ArgumentError("non-finite score");
    (labels[i] ? r.n_members : r.n_nonmembers)++;
  }
  if (r.n_members == 0 || r.n_nonmembers == 0) {
    throw ArgumentError("ROC needs at least one member and one non-member");
  }
  const auto pos = static_cast<double>(r.n_members);
  const auto neg = static_cast<double>(r.n_nonmembers);

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  // Descending sweep: each group of equal scores moves the curve once. The
  // Mann-Whitney count is accumulated on the way, ties counting 1/2.
  r.points.push_back({0.0, 0.0});
  double wins = 0.0;
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t group_tp = 0, group_fp = 0;
    std::size_t j = i;
    for (; j < order.size() && scores[order[j]] == scores[order[i]]; ++j) {
      (labels[order[j]] ? group_tp : group_fp)++;
    }
    wins += static_cast<double>(group_tp) * static_cast<double>(neg - fp - group_fp) +
            0.5 * static_cast<double>(group_tp) * static_cast<double>(group_fp);
    tp += group_tp;
    fp += group_fp;
    r.points.push_back({static_cast<double>(fp) / neg, static_cast<double>(tp) / pos});
    i = j;
  }
  r.auc = wins / (pos * neg);

  r.balanced_accuracy = 0.0;
  for (const auto& p : r.points) {
    r.balanced_accuracy = std::max(r.balanced_accuracy, (p.tpr + 1.0 - p.fpr) / 2.0);
  }
  for (double level : fpr_levels) {
    double best = 0.0;
    for (const auto& p : r.points) {
      if (p.fpr <= level) best = std::max(best, p.tpr);
    }
    r.tpr_at_fpr[level] = best;
  }
  return r;
}

RocReport MakeRocReport(std::span<const AttackSignal> signals,
                        std::span<const double> fpr_levels) {
  std::vector<double> scores;
  auto labels = std::make_unique<bool[]>(signals.size());
  for (std::size_t i = 0; i < signals.size(); ++i) {
    const auto& s = signals[i];
    if (!s.label) throw ArgumentError("signal for '" + s.dataset_id + "' has no label");
    scores.push_back(s.score);
    labels[i] = *s.label;
  }
  return MakeRocReport(scores, std::span<const bool>(labels.get(), signals.size()),
                       fpr_levels);
}

double TrapezoidArea(std::span<const RocPoint> points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].fpr - points[i - 1].fpr) *
            (points[i].tpr + points[i - 1].tpr) / 2.0;
  }
  return area;
}

std::string SizeBin::Label() const {
  return "[" + std::to_string(lo) + "," + std::to_string(hi) + ")";
}

std::vector<BinReport> SizeBinnedReport(std::span<const AttackSignal> signals,
                                        const Corpus& corpus,
                                        std::span<const SizeBin> bins,
                                        std::span<const double> fpr_levels) {
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (bins[i].lo >= bins[i].hi) {
      throw ArgumentError("size bin " + bins[i].Label() + " is empty");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (bins[i].lo < bins[j].hi && bins[j].lo < bins[i].hi) {
        throw ArgumentError("size bins " + bins[j].Label() + " and " +
                            bins[i].Label() + " overlap");
      }
    }
  }
  std::vector<BinReport> out;
  for (const SizeBin& bin : bins) {
    BinReport br;
    br.bin = bin;
    std::vector<AttackSignal> inside;
    for (const auto& s : signals) {
      const std::size_t n = corpus.at(s.dataset_id).sample_count();
      if (n >= bin.lo && n < bin.hi) inside.push_back(s);
    }
    br.n_datasets = inside.size();
    const auto members = std::count_if(inside.begin(), inside.end(),
                                       [](const AttackSignal& s) { return s.label.value_or(false); });
    if (inside.empty()) {
      br.note = "empty bin";
    } else if (members == 0 || static_cast<std::size_t>(members) == inside.size()) {
      br.note = "single-class bin";
    } else {
      br.report = MakeRocReport(inside, fpr_levels);
    }
    out.push_back(std::move(br));
  }
  return out;
}

std::string RocReportJson(const RocReport& report) {
  nlohmann::ordered_json levels = nlohmann::ordered_json::object();
  for (const auto& [level, tpr] : report.tpr_at_fpr) levels[FormatDouble(level)] = tpr;
  nlohmann::ordered_json j = {{"auc", report.auc},
                              {"balanced_accuracy", report.balanced_accuracy},
                              {"tpr_at_fpr", levels},
                              {"n_members", report.n_members},
                              {"n_nonmembers", report.n_nonmembers}};
  return j.dump();
}

void WriteRocPoints(const RocReport& report, const std::filesystem::path& path) {
  std::string out = "fpr\ttpr\n";
  for (const auto& p : report.points) {
    out += FormatDouble(p.fpr) + "\t" + FormatDouble(p.tpr) + "\n";
  }
  WriteFileAtomic(path, out);
}

}  // namespace vocableak
