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

// vocableak: command-line front end.
//
//   vocableak gen-synthetic --out corpus.jsonl --seed 7
//   vocableak train --corpus corpus.jsonl --vocab-size 4000 --out target.vocab
//   vocableak run --config experiment.json

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vocableak/attacks.h"
#include "vocableak/bpe.h"
#include "vocableak/corpus.h"
#include "vocableak/counts.h"
#include "vocableak/defense.h"
#include "vocableak/errors.h"
#include "vocableak/experiment.h"
#include "vocableak/forensics.h"
#include "vocableak/metrics.h"
#include "vocableak/powerlaw.h"
#include "vocableak/shadow.h"
#include "vocableak/synthetic.h"
#include "vocableak/util.h"

namespace vl = vocableak;
namespace fs = std::filesystem;

namespace {

void Log(const std::string& line) { std::cerr << "[vocableak] " << line << "\n"; }

std::vector<vl::SizeBin> ParseBins(const std::vector<std::string>& specs) {
  std::vector<vl::SizeBin> bins;
  for (const auto& s : specs) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) {
      throw vl::ArgumentError("size bin '" + s + "' is not LO:HI");
    }
    bins.push_back({std::stoul(s.substr(0, colon)), std::stoul(s.substr(colon + 1))});
  }
  return bins;
}

// Datasets to train on: all, or the members of a split file.
std::vector<const vl::Dataset*> TrainingSet(const vl::Corpus& corpus,
                                            const std::string& split_path,
                                            const std::string& ids_path) {
  if (!split_path.empty()) {
    return corpus.select(vl::SplitFromJson(vl::ReadFile(split_path)).member_ids);
  }
  if (!ids_path.empty()) {
    const auto j = nlohmann::json::parse(vl::ReadFile(ids_path));
    return corpus.select(j.get<vl::IdSet>());
  }
  std::vector<const vl::Dataset*> all;
  for (const auto& d : corpus.datasets()) all.push_back(&d);
  return all;
}

struct GenArgs {
  std::string out;
  vl::SyntheticOptions opts;
};

struct TrainArgs {
  std::string corpus, out, split, ids, fit_out;
  std::size_t vocab_size = 0;
};

struct ShadowArgs {
  std::string corpus, out, store;
  std::size_t n = 16, vocab_size = 0;
  double fraction = 0.5;
  std::uint64_t seed = 0;
  unsigned threads = vl::DefaultThreadCount();
};

struct AttackArgs {
  std::string method, target, corpus, shadows, aux, fit, split, out;
  std::size_t k = 100;
  unsigned threads = vl::DefaultThreadCount();
};

struct DefendArgs {
  std::string target, corpus, split, out;
  std::int64_t n_min = 1;
};

struct EvalArgs {
  std::vector<std::string> signals, bins;
  std::vector<double> fpr = vl::kDefaultFprLevels;
  std::string corpus, out, roc_dir;
};

struct DiffArgs {
  std::vector<std::string> vocabs;
  std::string format = "base64_lines", out_prefix;
  std::size_t limit = 120000;
};

struct RunArgs {
  std::string config, output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

int GenSynthetic(const GenArgs& a) {
  const vl::Corpus corpus = vl::GenerateSyntheticCorpus(a.opts);
  vl::SaveCorpus(corpus, a.out);
  Log("wrote " + std::to_string(corpus.size()) + " datasets to " + a.out);
  return 0;
}

int Train(const TrainArgs& a) {
  const vl::Corpus corpus = vl::LoadCorpus(a.corpus);
  const auto data = TrainingSet(corpus, a.split, a.ids);
  const vl::Vocabulary vocab = vl::TrainBpe(data, a.vocab_size);
  vl::SaveVocabulary(vocab, a.out);
  Log("trained " + std::to_string(vocab.size()) + " tokens on " +
      std::to_string(data.size()) + " datasets" +
      (vocab.exhausted() ? " (pairs exhausted)" : ""));
  if (!a.fit_out.empty()) {
    vl::TokenCounts counts(vocab.size());
    for (const vl::Dataset* d : data) counts += vl::CountTokens(*d, vocab);
    const auto fit = vl::FitPowerLaw(vocab, counts, vl::DefaultXminGrid(vocab.size()));
    vl::WriteFileAtomic(a.fit_out, vl::FitToJson(fit));
  }
  return 0;
}

int Shadows(const ShadowArgs& a) {
  const vl::Corpus corpus = vl::LoadCorpus(a.corpus);
  vl::EnsembleOptions eo;
  eo.n_shadows = a.n;
  eo.sample_fraction = a.fraction;
  eo.vocab_size = a.vocab_size;
  eo.seed = a.seed;
  eo.threads = a.threads;
  const vl::ShadowStore store(a.store.empty() ? fs::path(a.out).parent_path() / "shadow_store"
                                              : fs::path(a.store));
  eo.store = &store;
  const auto ensemble = vl::TrainEnsemble(corpus, eo);
  vl::SaveEnsembleManifest(ensemble, a.out);
  Log("trained " + std::to_string(ensemble.size()) + " shadows");
  return 0;
}

int Attack(const AttackArgs& a) {
  const vl::AttackMethod method = vl::ParseMethod(a.method);
  const vl::Corpus corpus = vl::LoadCorpus(a.corpus);
  const vl::Vocabulary target = vl::LoadVocabulary(a.target);
  std::optional<vl::MembershipSplit> split;
  if (!a.split.empty()) split = vl::SplitFromJson(vl::ReadFile(a.split));
  auto require = [&](const std::string& value, const char* flag) {
    if (value.empty()) {
      throw vl::ArgumentError(std::string(flag) + " is required for " + a.method);
    }
  };

  std::vector<std::optional<double>> scores(corpus.size());
  switch (method) {
    case vl::AttackMethod::kMergeSimilarity:
    case vl::AttackMethod::kVocabularyOverlap: {
      require(a.shadows, "--shadows");
      const auto ensemble = vl::LoadEnsemble(a.shadows);
      const vl::EnsembleScorer scorer(target, ensemble);
      vl::ParallelFor(corpus.size(), a.threads, [&](std::size_t i) {
        try {
          scores[i] = method == vl::AttackMethod::kVocabularyOverlap
                          ? scorer.VocabularyOverlap(corpus[i].id)
                          : scorer.MergeSimilarity(corpus[i].id);
        } catch (const vl::DegeneratePartitionError& e) {
          Log(std::string("skipping: ") + e.what());
        }
      });
      break;
    }
    case vl::AttackMethod::kFrequencyEstimation:
    case vl::AttackMethod::kNaiveBayes: {
      require(a.aux, "--aux");
      const auto aux = vl::AuxFromJson(vl::ReadFile(a.aux));
      vl::CountTable table(target, corpus);
      table.Precompute(a.threads);
      if (method == vl::AttackMethod::kFrequencyEstimation) {
        require(a.fit, "--fit");
        const vl::FrequencyScorer scorer(table, aux, vl::FitFromJson(vl::ReadFile(a.fit)));
        for (std::size_t i = 0; i < corpus.size(); ++i) scores[i] = scorer.Score(corpus[i].id);
      } else {
        const vl::NaiveBayesScorer scorer(table, aux, a.k);
        for (std::size_t i = 0; i < corpus.size(); ++i) scores[i] = scorer.Score(corpus[i].id);
      }
      break;
    }
    case vl::AttackMethod::kCompressionRate:
      vl::ParallelFor(corpus.size(), a.threads, [&](std::size_t i) {
        scores[i] = vl::CompressionRateSignal(target, corpus[i]);
      });
      break;
  }

  std::vector<vl::AttackSignal> signals;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!scores[i]) continue;
    vl::AttackSignal s{corpus[i].id, method, *scores[i], std::nullopt};
    if (split) s.label = split->is_member(corpus[i].id);
    signals.push_back(std::move(s));
  }
  vl::WriteSignals(signals, a.out);
  Log("wrote " + std::to_string(signals.size()) + " signals to " + a.out);
  return 0;
}

int Defend(const DefendArgs& a) {
  const vl::Corpus corpus = vl::LoadCorpus(a.corpus);
  const vl::Vocabulary target = vl::LoadVocabulary(a.target);
  const auto data = TrainingSet(corpus, a.split, "");
  const auto counts = vl::MemberCounts(target, data);
  const auto result = vl::MinCountFilter(target, counts, {a.n_min});
  vl::SaveDefenseResult(result, a.out);
  Log("removed " + std::to_string(result.removed_count) + " tokens; " +
      std::to_string(result.vocabulary.size()) + " remain");
  return 0;
}

int Evaluate(const EvalArgs& a) {
  std::optional<vl::Corpus> corpus;
  if (!a.corpus.empty()) corpus = vl::LoadCorpus(a.corpus);
  const auto bins = ParseBins(a.bins);
  if (!bins.empty() && !corpus) throw vl::ArgumentError("--bins needs --corpus");
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& path : a.signals) {
    const auto signals = vl::ReadSignals(path);
    const std::string name = fs::path(path).stem().string();
    const auto report = vl::MakeRocReport(signals, a.fpr);
    auto row = nlohmann::ordered_json::parse(vl::RocReportJson(report));
    row["signals"] = name;
    row["bin"] = "all";
    rows.push_back(row);
    if (!a.roc_dir.empty()) vl::WriteRocPoints(report, fs::path(a.roc_dir) / (name + ".tsv"));
    if (!bins.empty()) {
      for (const auto& b : vl::SizeBinnedReport(signals, *corpus, bins, a.fpr)) {
        nlohmann::ordered_json br = {{"signals", name}, {"bin", b.bin.Label()}};
        if (b.report) {
          for (auto& [k, v] : nlohmann::ordered_json::parse(vl::RocReportJson(*b.report)).items()) br[k] = v;
        } else {
          br["note"] = b.note;
        }
        rows.push_back(br);
      }
    }
  }
  const std::string text = rows.dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    vl::WriteFileAtomic(a.out, text);
  }
  return 0;
}

int VocabDiff(const DiffArgs& a) {
  std::vector<vl::ExternalVocab> vocabs;
  for (const auto& spec : a.vocabs) {
    // NAME=PATH or PATH
    const auto eq = spec.find('=');
    const std::string name = eq == std::string::npos ? "" : spec.substr(0, eq);
    const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
    vocabs.push_back(vl::ImportExternal(path, vl::ParseVocabFormat(a.format), name));
  }
  const auto m = vl::CompareAll(vocabs, a.limit, vl::DefaultThreadCount());
  const std::string jac = vl::MatrixTsv(m.names, m.jaccard);
  const std::string div = vl::MatrixTsv(m.names, m.divergence);
  if (a.out_prefix.empty()) {
    std::cout << "# jaccard\n" << jac << "# merge_index_divergence\n" << div;
  } else {
    vl::WriteFileAtomic(a.out_prefix + "jaccard.tsv", jac);
    vl::WriteFileAtomic(a.out_prefix + "divergence.tsv", div);
  }
  return 0;
}

int Run(const RunArgs& a) {
  vl::ExperimentConfig config = vl::LoadConfig(a.config);
  if (!a.output_dir.empty()) config.output_dir = a.output_dir;
  if (a.seed) config.seed = *a.seed;
  if (a.threads) config.threads = *a.threads;
  vl::RunOptions options;
  options.log = Log;
  const auto outcome = vl::RunExperiment(config, options);
  for (const auto& vs : outcome.per_vocab_size) {
    for (const auto& [key, r] : vs.reports) {
      std::cout << "v" << vs.vocab_size << "\t" << key << std::fixed << std::setprecision(4)
                << "\tauc=" << r.auc << "\tba=" << r.balanced_accuracy << "\n";
    }
  }
  Log("finished in " + std::to_string(static_cast<int>(std::lround(outcome.seconds))) + "s; outputs in " +
      config.output_dir.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Membership inference against BPE tokenizer vocabularies"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen-synthetic", "Write a planted-marker synthetic corpus");
  g->add_option("--out", gen.out, "Corpus file (JSONL)")->required();
  g->add_option("--n-datasets", gen.opts.n_datasets);
  g->add_option("--docs", gen.opts.docs_per_dataset, "Documents per dataset, cycled");
  g->add_option("--words-per-doc", gen.opts.words_per_doc);
  g->add_option("--lexicon-size", gen.opts.lexicon_size);
  g->add_option("--zipf", gen.opts.zipf_exponent);
  g->add_option("--zipf-spread", gen.opts.zipf_spread);
  g->add_option("--topic-words", gen.opts.topic_words);
  g->add_option("--topic-rate", gen.opts.topic_rate);
  g->add_option("--noise-max", gen.opts.noise_rate_max);
  g->add_option("--boilerplate-max", gen.opts.boilerplate_rate_max);
  g->add_option("--markers", gen.opts.markers_per_dataset, "Marker strings per dataset");
  g->add_option("--marker-length", gen.opts.marker_length);
  g->add_option("--marker-rate", gen.opts.marker_rate, "Occurrences per marker per document");
  g->add_option("--seed", gen.opts.seed);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train a BPE vocabulary");
  t->add_option("--corpus", train.corpus)->required();
  t->add_option("--vocab-size", train.vocab_size)->required();
  t->add_option("--out", train.out)->required();
  auto* split_opt = t->add_option("--split", train.split, "Train on the members of this split");
  t->add_option("--ids", train.ids, "Train on the ids in this JSON array")->excludes(split_opt);
  t->add_option("--fit-out", train.fit_out, "Also write a power-law fit report");

  ShadowArgs shadows;
  auto* s = app.add_subcommand("shadows", "Train a shadow ensemble");
  s->add_option("--corpus", shadows.corpus)->required();
  s->add_option("--vocab-size", shadows.vocab_size)->required();
  s->add_option("--out", shadows.out, "Ensemble manifest")->required();
  s->add_option("-n,--n-shadows", shadows.n);
  s->add_option("--fraction", shadows.fraction);
  s->add_option("--seed", shadows.seed);
  s->add_option("--store", shadows.store);
  s->add_option("--threads", shadows.threads);

  AttackArgs attack;
  auto* at = app.add_subcommand("attack", "Score every dataset with one method");
  at->add_option("--method", attack.method)->required();
  at->add_option("--target", attack.target)->required();
  at->add_option("--corpus", attack.corpus)->required();
  at->add_option("--out", attack.out)->required();
  at->add_option("--shadows", attack.shadows, "Ensemble manifest");
  at->add_option("--aux", attack.aux, "Aux collection JSON");
  at->add_option("--fit", attack.fit, "Power-law fit JSON");
  at->add_option("--split", attack.split, "Adds ground-truth labels");
  at->add_option("-k", attack.k);
  at->add_option("--threads", attack.threads);

  DefendArgs defend;
  auto* d = app.add_subcommand("defend", "Apply the min count filter");
  d->add_option("--target", defend.target)->required();
  d->add_option("--corpus", defend.corpus)->required();
  d->add_option("--split", defend.split, "Members are the defender's training data")->required();
  d->add_option("--n-min", defend.n_min)->required();
  d->add_option("--out", defend.out)->required();

  EvalArgs eval;
  auto* e = app.add_subcommand("evaluate", "ROC metrics for labelled signals files");
  e->add_option("--signals", eval.signals)->required();
  e->add_option("--corpus", eval.corpus);
  e->add_option("--bins", eval.bins, "LO:HI document-count bins");
  e->add_option("--fpr", eval.fpr);
  e->add_option("--out", eval.out);
  e->add_option("--roc-dir", eval.roc_dir);

  DiffArgs diff;
  auto* v = app.add_subcommand("vocab-diff", "Jaccard and merge-index divergence matrices");
  v->add_option("--vocab", diff.vocabs, "NAME=PATH")->required();
  v->add_option("--format", diff.format)->check(CLI::IsMember({"base64_lines", "token_rank_pairs"}));
  v->add_option("--limit", diff.limit);
  v->add_option("--out-prefix", diff.out_prefix);

  RunArgs run;
  auto* r = app.add_subcommand("run", "Run a full experiment from a config file");
  r->add_option("--config", run.config)->required();
  r->add_option("--output-dir", run.output_dir);
  r->add_option("--seed", run.seed);
  r->add_option("--threads", run.threads);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*g) return GenSynthetic(gen);
    if (*t) return Train(train);
    if (*s) return Shadows(shadows);
    if (*at) return Attack(attack);
    if (*d) return Defend(defend);
    if (*e) return Evaluate(eval);
    if (*v) return VocabDiff(diff);
    if (*r) return Run(run);
  } catch (const std::exception& ex) {
    std::cerr << "vocableak: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
