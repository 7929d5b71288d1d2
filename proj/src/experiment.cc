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

#include "vocableak/experiment.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <optional>

#include "json.hpp"
#include "vocableak/defense.h"
#include "vocableak/errors.h"
#include "vocableak/shadow.h"
#include "vocableak/util.h"

namespace vocableak {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

json ConfigJson(const ExperimentConfig& c, bool with_local_fields) {
  json bins = json::array();
  for (const auto& b : c.size_bins) bins.push_back({b.lo, b.hi});
  json methods = json::array();
  for (auto m : c.methods) methods.push_back(std::string(MethodName(m)));
  json j = {{"corpus_path", c.corpus_path.generic_string()},
            {"vocab_sizes", c.vocab_sizes},
            {"n_shadows", c.n_shadows},
            {"shadow_fraction", c.shadow_fraction},
            {"n_aux_draws", c.n_aux_draws},
            {"aux_size", c.aux_size},
            {"member_fraction", c.member_fraction},
            {"k_rare", c.k_rare},
            {"n_min", c.n_min},
            {"fpr_levels", c.fpr_levels},
            {"size_bins", bins},
            {"methods", methods},
            {"seed", c.seed}};
  if (with_local_fields) {
    j["output_dir"] = c.output_dir.generic_string();
    j["threads"] = c.threads;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Stage bookkeeping

class StageLog {
 public:
  StageLog(fs::path root, std::string hash, const RunOptions& options)
      : root_(std::move(root)), hash_(std::move(hash)), options_(options) {}

  // Runs `body` unless a marker for `name` with the current config hash
  // exists, in which case `resume` runs instead.
  void Run(const std::string& name, const std::function<void()>& body,
           const std::function<void()>& resume) {
    const fs::path marker = root_ / ".stages" / (name + ".done");
    const auto start = std::chrono::steady_clock::now();
    bool resumed = false;
    try {
      if (fs::exists(marker) && ReadFile(marker) == hash_) {
        resume();
        resumed = true;
      } else {
        body();
        WriteFileAtomic(marker, hash_);
      }
    } catch (const std::exception& e) {
      throw Error("stage " + name + ": " + e.what());
    }
    const double secs = Seconds(start);
    stages_.push_back({{"name", name}, {"seconds", secs}, {"resumed", resumed}});
    if (options_.log) {
      options_.log(name + (resumed ? " resumed" : " done") + " in " +
                   FormatDouble(std::round(secs * 10.0) / 10.0) + "s");
    }
  }

  const json& stages() const { return stages_; }

  static double Seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }

 private:
  fs::path root_;
  std::string hash_;
  const RunOptions& options_;
  json stages_ = json::array();
};

// ---------------------------------------------------------------------------
// Attacks

struct AttackContext {
  const ExperimentConfig& config;
  const Corpus& corpus;
  const MembershipSplit& split;
  const AuxCollection& aux;
  const ShadowEnsemble& ensemble;
  const PowerLawFit& fit;
};

bool Wants(const ExperimentConfig& c, AttackMethod m) {
  return std::find(c.methods.begin(), c.methods.end(), m) != c.methods.end();
}

std::vector<std::string> SignalKeys(const ExperimentConfig& c) {
  std::vector<std::string> keys;
  for (AttackMethod m : c.methods) {
    if (m == AttackMethod::kNaiveBayes) {
      for (std::size_t k : c.k_rare) keys.push_back(SignalKey(m, k));
    } else {
      keys.push_back(SignalKey(m));
    }
  }
  return keys;
}

struct AttackOutput {
  std::map<std::string, std::vector<AttackSignal>> signals;
  std::vector<DatasetId> skipped;
  std::vector<std::string> notes;
  // Summed over members: bytes and emitted tokens under the target.
  std::size_t member_bytes = 0;
  std::int64_t member_tokens = 0;
};

AttackOutput RunAttacks(const Vocabulary& target, const AttackContext& ctx) {
  const auto& cfg = ctx.config;
  const std::size_t n = ctx.corpus.size();
  AttackOutput out;

  std::vector<std::optional<double>> vo(n), ms(n);
  const bool want_vo = Wants(cfg, AttackMethod::kVocabularyOverlap);
  const bool want_ms = Wants(cfg, AttackMethod::kMergeSimilarity);
  if (want_vo || want_ms) {
    const EnsembleScorer scorer(target, ctx.ensemble);
    ParallelFor(n, cfg.threads, [&](std::size_t i) {
      const DatasetId& id = ctx.corpus[i].id;
      try {
        if (want_vo) vo[i] = scorer.VocabularyOverlap(id);
        if (want_ms) ms[i] = scorer.MergeSimilarity(id);
      } catch (const DegeneratePartitionError&) {
        vo[i].reset();
        ms[i].reset();
      }
    });
    for (std::size_t i = 0; i < n; ++i) {
      if (!vo[i] && !ms[i]) out.skipped.push_back(ctx.corpus[i].id);
    }
  }

  CountTable table(target, ctx.corpus);
  table.Precompute(cfg.threads);
  std::vector<double> fe(n), cr(n);
  std::map<std::size_t, std::vector<double>> nb;
  std::vector<std::optional<NaiveBayesScorer>> nb_scorers;
  std::vector<std::size_t> nb_ks;
  if (Wants(cfg, AttackMethod::kNaiveBayes)) {
    for (std::size_t k : cfg.k_rare) {
      if (k > target.num_merges()) {
        out.notes.push_back("naive_bayes k=" + std::to_string(k) + " skipped: " +
                            std::to_string(target.num_merges()) + " merged tokens");
        continue;
      }
      nb_ks.push_back(k);
      nb_scorers.emplace_back(std::in_place, table, ctx.aux, k);
      nb[k].resize(n);
    }
  }
  std::optional<FrequencyScorer> fe_scorer;
  const bool want_fe = Wants(cfg, AttackMethod::kFrequencyEstimation);
  if (want_fe) fe_scorer.emplace(table, ctx.aux, ctx.fit);
  ParallelFor(n, cfg.threads, [&](std::size_t i) {
    const DatasetId& id = ctx.corpus[i].id;
    if (want_fe) fe[i] = fe_scorer->Score(id);
    for (std::size_t j = 0; j < nb_ks.size(); ++j) nb.at(nb_ks[j])[i] = nb_scorers[j]->Score(id);
    cr[i] = static_cast<double>(ctx.corpus[i].byte_count()) /
            static_cast<double>(table.counts(i).total());
  });

  for (std::size_t i = 0; i < n; ++i) {
    const Dataset& d = ctx.corpus[i];
    const bool member = ctx.split.is_member(d.id);
    if (member) {
      out.member_bytes += d.byte_count();
      out.member_tokens += table.counts(i).total();
    }
    auto emit = [&](AttackMethod m, const std::string& key, double score) {
      out.signals[key].push_back({d.id, m, score, member});
    };
    for (AttackMethod m : cfg.methods) {
      switch (m) {
        case AttackMethod::kVocabularyOverlap:
          if (vo[i]) emit(m, SignalKey(m), *vo[i]);
          break;
        case AttackMethod::kMergeSimilarity:
          if (ms[i]) emit(m, SignalKey(m), *ms[i]);
          break;
        case AttackMethod::kFrequencyEstimation:
          emit(m, SignalKey(m), fe[i]);
          break;
        case AttackMethod::kNaiveBayes:
          for (std::size_t k : nb_ks) emit(m, SignalKey(m, k), nb.at(k)[i]);
          break;
        case AttackMethod::kCompressionRate:
          emit(m, SignalKey(m), cr[i]);
          break;
      }
    }
  }
  return out;
}

void WriteAllSignals(const AttackOutput& out, const fs::path& dir) {
  for (const auto& [key, signals] : out.signals) {
    WriteSignals(signals, dir / "signals" / (key + ".tsv"));
  }
}

struct Evaluation {
  std::map<std::string, RocReport> reports;
  std::map<std::string, std::vector<BinReport>> binned;
};

Evaluation Evaluate(const fs::path& dir, const ExperimentConfig& cfg,
                    const Corpus& corpus, std::size_t vocab_size,
                    std::optional<std::int64_t> n_min) {
  Evaluation ev;
  json rows = json::array();
  auto row = [&](const std::string& key, const std::string& bin,
                 const RocReport& r) {
    json j = json::parse(RocReportJson(r));
    json out = {{"method", key}, {"vocab_size", vocab_size}, {"bin", bin}};
    if (n_min) out["n_min"] = *n_min;
    for (auto& [k, v] : j.items()) out[k] = v;
    return out;
  };
  for (const std::string& key : SignalKeys(cfg)) {
    const fs::path file = dir / "signals" / (key + ".tsv");
    if (!fs::exists(file)) continue;
    const auto signals = ReadSignals(file);
    const RocReport r = MakeRocReport(signals, cfg.fpr_levels);
    WriteRocPoints(r, dir / "roc" / (key + ".tsv"));
    rows.push_back(row(key, "all", r));
    if (!cfg.size_bins.empty()) {
      auto bins = SizeBinnedReport(signals, corpus, cfg.size_bins, cfg.fpr_levels);
      for (const auto& b : bins) {
        if (b.report) {
          rows.push_back(row(key, b.bin.Label(), *b.report));
        } else {
          json flagged = {{"method", key}, {"vocab_size", vocab_size},
                          {"bin", b.bin.Label()}, {"note", b.note}};
          if (n_min) flagged["n_min"] = *n_min;
          rows.push_back(flagged);
        }
      }
      ev.binned[key] = std::move(bins);
    }
    ev.reports[key] = r;
  }
  WriteFileAtomic(dir / "reports.json", rows.dump(2) + "\n");
  return ev;
}

std::string SizeDir(std::size_t v) { return "v" + std::to_string(v); }

}  // namespace

// ---------------------------------------------------------------------------
// Config

void ValidateConfig(const ExperimentConfig& c) {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ArgumentError("config field '" + field + "' " + why);
  };
  if (c.corpus_path.empty()) fail("corpus_path", "is required");
  if (c.vocab_sizes.empty()) fail("vocab_sizes", "must be non-empty");
  for (auto v : c.vocab_sizes) {
    if (v < kByteAlphabetSize + 1) fail("vocab_sizes", "entries must be >= 257");
  }
  if (c.n_shadows < 2) fail("n_shadows", "must be >= 2");
  if (!(c.shadow_fraction > 0.0 && c.shadow_fraction < 1.0)) {
    fail("shadow_fraction", "must lie in (0,1)");
  }
  if (c.n_aux_draws < 1) fail("n_aux_draws", "must be >= 1");
  if (c.aux_size < 1) fail("aux_size", "must be >= 1");
  if (!(c.member_fraction > 0.0 && c.member_fraction < 1.0)) {
    fail("member_fraction", "must lie in (0,1)");
  }
  if (c.k_rare.empty()) fail("k_rare", "must be non-empty");
  for (auto k : c.k_rare) {
    if (k < 1) fail("k_rare", "entries must be >= 1");
  }
  if (c.n_min.empty()) fail("n_min", "must be non-empty");
  for (auto n : c.n_min) {
    if (n < 1) fail("n_min", "entries must be >= 1");
  }
  if (c.fpr_levels.empty()) fail("fpr_levels", "must be non-empty");
  for (double f : c.fpr_levels) {
    if (!(f >= 0.0 && f <= 1.0)) fail("fpr_levels", "entries must lie in [0,1]");
  }
  if (c.methods.empty()) fail("methods", "must be non-empty");
  if (c.threads < 1) fail("threads", "must be >= 1");
}

ExperimentConfig ConfigFromJson(std::string_view text, const std::string& source) {
  ExperimentConfig c;
  try {
    const auto j = nlohmann::json::parse(text);
    c.corpus_path = j.at("corpus_path").get<std::string>();
    c.vocab_sizes = j.at("vocab_sizes").get<std::vector<std::size_t>>();
    c.n_shadows = j.value("n_shadows", c.n_shadows);
    c.shadow_fraction = j.value("shadow_fraction", c.shadow_fraction);
    c.n_aux_draws = j.value("n_aux_draws", c.n_aux_draws);
    c.aux_size = j.value("aux_size", c.aux_size);
    c.member_fraction = j.value("member_fraction", c.member_fraction);
    c.k_rare = j.value("k_rare", c.k_rare);
    c.n_min = j.value("n_min", c.n_min);
    c.fpr_levels = j.value("fpr_levels", c.fpr_levels);
    if (j.contains("size_bins")) {
      for (const auto& b : j.at("size_bins")) {
        if (!b.is_array() || b.size() != 2) {
          throw ArgumentError("size_bins entries must be [lo, hi] pairs");
        }
        c.size_bins.push_back({b[0].get<std::size_t>(), b[1].get<std::size_t>()});
      }
    }
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j.at("methods")) c.methods.push_back(ParseMethod(m.get<std::string>()));
    }
    c.seed = j.value("seed", c.seed);
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    c.threads = j.value("threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, 0, e.what());
  }
  ValidateConfig(c);
  return c;
}

std::string ConfigToJson(const ExperimentConfig& config) {
  return ConfigJson(config, true).dump(2) + "\n";
}

ExperimentConfig LoadConfig(const fs::path& path) {
  ExperimentConfig c = ConfigFromJson(ReadFile(path), path.string());
  if (c.corpus_path.is_relative()) {
    c.corpus_path = path.parent_path() / c.corpus_path;
  }
  if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) {
    c.output_dir = dir;
  }
  return c;
}

std::string ConfigHash(const ExperimentConfig& config) {
  return Sha256Hex(ConfigJson(config, false).dump());
}

std::string SignalKey(AttackMethod method, std::size_t k) {
  std::string key(MethodName(method));
  if (method == AttackMethod::kNaiveBayes) key += "_k" + std::to_string(k);
  return key;
}

// ---------------------------------------------------------------------------
// Pipeline

ExperimentOutcome RunExperiment(const ExperimentConfig& config,
                                const RunOptions& options) {
  ValidateConfig(config);
  const auto start = std::chrono::steady_clock::now();
  const fs::path root = config.output_dir;
  ExperimentOutcome outcome;
  outcome.config_hash = ConfigHash(config);
  StageLog stages(root, outcome.config_hash, options);
  json manifest = {{"config_hash", outcome.config_hash},
                   {"config", ConfigJson(config, true)}};
  json per_size = json::object();
  auto write_manifest = [&] {
    manifest["stages"] = stages.stages();
    manifest["vocab_sizes"] = per_size;
    WriteFileAtomic(root / "manifest.json", manifest.dump(2) + "\n");
  };
  WriteFileAtomic(root / "config.json", ConfigToJson(config));

  Corpus corpus;
  try {
    corpus = LoadCorpus(config.corpus_path);
  } catch (const std::exception& e) {
    throw Error(std::string("stage load_corpus: ") + e.what());
  }

  MembershipSplit split;
  stages.Run(
      "split",
      [&] {
        split = SplitMembers(corpus, config.member_fraction, config.seed);
        WriteFileAtomic(root / "split.json", SplitToJson(split));
      },
      [&] { split = SplitFromJson(ReadFile(root / "split.json")); });

  AuxCollection aux;
  stages.Run(
      "aux",
      [&] {
        aux = SampleAuxCollection(corpus, config.n_aux_draws, config.aux_size,
                                  config.seed);
        WriteFileAtomic(root / "aux.json", AuxToJson(aux, config.seed));
      },
      [&] { aux = AuxFromJson(ReadFile(root / "aux.json")); });
  write_manifest();

  const ShadowStore store(root / "shadow_store");
  const auto members = corpus.select(split.member_ids);

  for (std::size_t vocab_size : config.vocab_sizes) {
    const std::string tag = SizeDir(vocab_size);
    const fs::path dir = root / tag;
    VocabSizeOutcome vs;
    vs.vocab_size = vocab_size;

    Vocabulary target;
    stages.Run(
        tag + "_target",
        [&] {
          target = TrainBpe(members, vocab_size);
          SaveVocabulary(target, dir / "target.vocab");
        },
        [&] { target = LoadVocabulary(dir / "target.vocab"); });

    ShadowEnsemble ensemble;
    stages.Run(
        tag + "_shadows",
        [&] {
          EnsembleOptions eo;
          eo.n_shadows = config.n_shadows;
          eo.sample_fraction = config.shadow_fraction;
          eo.vocab_size = vocab_size;
          eo.seed = config.seed;
          eo.threads = config.threads;
          eo.store = &store;
          ensemble = TrainEnsemble(corpus, eo);
          SaveEnsembleManifest(ensemble, dir / "shadows.json");
        },
        [&] { ensemble = LoadEnsemble(dir / "shadows.json"); });

    stages.Run(
        tag + "_fit",
        [&] {
          const auto data = corpus.select(aux.samples.front());
          const Vocabulary shadow = TrainBpe(data, vocab_size);
          SaveVocabulary(shadow, dir / "fe_shadow.vocab");
          TokenCounts counts(shadow.size());
          for (const Dataset* d : data) counts += CountTokens(*d, shadow);
          vs.fit = FitPowerLaw(shadow, counts, DefaultXminGrid(shadow.size()));
          WriteFileAtomic(dir / "fit.json", FitToJson(vs.fit));
        },
        [&] { vs.fit = FitFromJson(ReadFile(dir / "fit.json")); });

    const AttackContext ctx{config, corpus, split, aux, ensemble, vs.fit};
    json size_info = json::object();
    stages.Run(
        tag + "_attack",
        [&] {
          AttackOutput out = RunAttacks(target, ctx);
          WriteAllSignals(out, dir);
          json extra = {{"skipped", out.skipped}, {"notes", out.notes}};
          WriteFileAtomic(dir / "attack.json", extra.dump(2) + "\n");
        },
        [] {});
    {
      const auto extra = json::parse(ReadFile(dir / "attack.json"));
      vs.skipped = extra.at("skipped").get<std::vector<DatasetId>>();
      size_info["attack"] = extra;
    }

    const auto evaluate = [&] {
      Evaluation ev = Evaluate(dir, config, corpus, vocab_size, std::nullopt);
      vs.reports = std::move(ev.reports);
      vs.binned = std::move(ev.binned);
    };
    stages.Run(tag + "_evaluate", evaluate, evaluate);

    const TokenCounts member_counts =
        config.n_min.empty() ? TokenCounts() : MemberCounts(target, members);
    json defense_info = json::array();
    for (std::int64_t n_min : config.n_min) {
      const fs::path ddir = dir / "defense" / ("n_min_" + std::to_string(n_min));
      const std::string dtag = tag + "_defense_n_min_" + std::to_string(n_min);
      DefenseOutcome d;
      d.n_min = n_min;
      stages.Run(
          dtag,
          [&] {
            DefenseResult filtered = MinCountFilter(target, member_counts, {n_min});
            SaveDefenseResult(filtered, ddir / "target.vocab");
            AttackOutput out = RunAttacks(filtered.vocabulary, ctx);
            WriteAllSignals(out, ddir);
            json utility = {
                {"n_min", n_min},
                {"vocab_size", filtered.vocabulary.size()},
                {"removed_count", filtered.removed_count},
                {"member_bytes", out.member_bytes},
                {"member_tokens", out.member_tokens},
                {"bytes_per_token", static_cast<double>(out.member_bytes) /
                                        static_cast<double>(out.member_tokens)},
                {"skipped", out.skipped},
                {"notes", out.notes}};
            WriteFileAtomic(ddir / "utility.json", utility.dump(2) + "\n");
          },
          [] {});
      const auto utility = json::parse(ReadFile(ddir / "utility.json"));
      d.vocab_size = utility.at("vocab_size").get<std::size_t>();
      d.removed_count = utility.at("removed_count").get<std::size_t>();
      d.bytes_per_token = utility.at("bytes_per_token").get<double>();
      Evaluation ev = Evaluate(ddir, config, corpus, vocab_size, n_min);
      d.reports = std::move(ev.reports);
      defense_info.push_back(utility);
      vs.defense.push_back(std::move(d));
    }
    size_info["fit"] = json::parse(FitToJson(vs.fit));
    size_info["defense"] = defense_info;
    per_size[tag] = size_info;
    write_manifest();
    outcome.per_vocab_size.push_back(std::move(vs));
  }
  outcome.seconds = StageLog::Seconds(start);
  manifest["seconds"] = outcome.seconds;
  write_manifest();
  return outcome;
}

}  // namespace vocableak
