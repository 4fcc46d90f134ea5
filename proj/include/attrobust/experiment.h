// Copyright 2026 The attrobust Authors.
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

// Experiment configuration and the end-to-end pipeline: load, split, train
// (or load) one model per regime, attack the test split and write a report
// bundle.
//
// Bundle layout (under output_dir):
//   config.json          snapshot of the configuration
//   manifest.json        status, completed stages, sub-seeds, timings
//   rows.csv             one row per (regime, method, fold, sample)
//   aggregates.csv       mean and std. per (regime, method)
//   report.md            markdown table
//   transcripts.jsonl    one attack transcript per row
//   training_<regime>_fold<f>.csv   per-step training log
//   <regime>_fold<f>.ckpt, vocab_fold<f>.txt
//
// Everything except the manifest is a deterministic function of the
// configuration.

#ifndef ATTROBUST_EXPERIMENT_H_
#define ATTROBUST_EXPERIMENT_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "attrobust/attribution.h"
#include "attrobust/classifier.h"
#include "attrobust/dare.h"
#include "attrobust/dataset_io.h"
#include "attrobust/metrics.h"
#include "attrobust/robust_training.h"
#include "attrobust/trainer.h"

namespace attrobust {

struct CandidateSource {
  std::string kind = "synonyms";  // synonyms | unigram | process
  std::string path;               // synonym table for kind == synonyms
  std::vector<std::string> command;  // argv for kind == process

  bool operator==(const CandidateSource&) const = default;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  ArchitectureConfig architecture;  // vocab_size and num_classes are derived
  TrainConfig training;             // seed is derived from `seed`
  std::vector<std::string> regimes = {"vanilla"};
  double adversarial_attack_ratio = 0.3;
  FarConfig far;  // train, attack and preset name; train/attack are overridden
  // Attack used inside robust training (constraint ignored).
  AttackConfig training_attack;
  AttackConfig attack;
  std::string stop_words_path;  // empty: built-in list
  CandidateSource candidates;
  std::vector<AttributionMethod> methods = {AttributionMethod::kIntegratedGradients};
  AttributionConfig attribution;  // evaluation-time settings
  RobustnessPolicy policy;
  std::string encoder = "tfidf-embedding";
  uint64_t seed = 1;
  int folds = 1;  // 1, or 3 for rotated splits
  int threads = 1;
  // Samples attacked per fold: "test" (the held-out split) or "all" (every
  // loaded sample, encoded with the fold vocabulary).
  std::string eval_split = "test";
  int max_eval_samples = 0;  // 0: the whole evaluation set
  std::string output_dir = "out";
  std::string checkpoint_dir;  // load <regime>_fold<f>.ckpt from here if set
  // Directory that relative paths are resolved against (not serialized).
  std::string base_dir;

  // Checks value ranges and that referenced files exist.
  void Validate() const;
  std::string Resolve(const std::string& path) const;
};

// Canonical JSON text (stable key order); ParseConfig(ConfigToJson(c))
// reproduces c.
std::string ConfigToJson(const ExperimentConfig& config);
ExperimentConfig ParseConfig(const std::string& json_text);
// Sets base_dir to the directory of `path`.
ExperimentConfig LoadConfig(const std::string& path);
// FNV-1a of the canonical JSON, 16 hex digits. The output and checkpoint
// directories are left out, so relocated reruns share a hash.
std::string ConfigHash(const ExperimentConfig& config);

// Sub-seeds derived from the master seed.
struct SeedPlan {
  uint64_t split = 0;
  uint64_t train = 0;
  uint64_t init = 0;
  uint64_t batch_order = 0;
  uint64_t attack_epsilon = 0;
};
SeedPlan DeriveSeeds(uint64_t master);

struct RunOptions {
  bool evaluate = true;  // false: train and save checkpoints only
};

struct ExperimentResult {
  std::string output_dir;
  bool complete = false;
  std::vector<std::string> completed_stages;
  std::string error;  // first stage failure, if any
  RobustnessReport report;
  int dropped_samples = 0;
  int malformed_lines = 0;
};

// Runs every stage, writing the bundle as it goes. A stage failure stops
// the run, marks the manifest "failed" and is returned in `error`; per-sample
// attack failures are counted in the report and also make the run
// incomplete.
ExperimentResult RunExperiment(const ExperimentConfig& config,
                               const RunOptions& options = {});

}  // namespace attrobust

#endif  // ATTROBUST_EXPERIMENT_H_
