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


#ifndef ATTROBUST_TRAINER_H_
#define ATTROBUST_TRAINER_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "attrobust/checkpoint.h"
#include "attrobust/classifier.h"
#include "attrobust/text_sample.h"
#include "attrobust/vocabulary.h"

namespace attrobust {

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 30;
  int batch_size = 16;
  uint64_t seed = 1;  // fans out to the "init" and "batch_order" sub-seeds
  // Leading epochs trained on the clean classification loss whatever the
  // regime, so robust objectives fine-tune an already fitted classifier.
  int warmup_epochs = 0;

  bool operator==(const TrainConfig&) const = default;
};

// One record per optimizer step.
struct TrainingLogRecord {
  int epoch = 0;
  int step = 0;
  int batch_size = 0;
  int attacked = 0;
  double classification_loss = 0.0;  // batch mean
  double attribution_loss = 0.0;     // batch mean (FAR only)
  double total = 0.0;
};

struct TrainingData {
  std::span<const TextSample> train;
  std::span<const TextSample> validation;
  const Vocabulary* vocab = nullptr;
};

struct TrainedModel {
  ReferenceClassifier model;
  CheckpointMetadata metadata;
  double final_train_loss = 0.0;
  double final_validation_loss = 0.0;
  // Full training-set loss after each epoch.
  std::vector<double> epoch_train_losses;
  std::vector<TrainingLogRecord> log;
};

// Mean classification loss of `model` over `samples` (0 for an empty span).
double MeanClassificationLoss(const ReferenceClassifier& model,
                              std::span<const TextSample> samples);
double Accuracy(const ReferenceClassifier& model,
                std::span<const TextSample> samples);

// Builds the scalar minimized for one batch. `snapshot` holds the parameters
// at the start of the step (for attacks); `trainable` carries the same values
// as differentiable leaves. Fills the loss components of `record`.
using BatchLossFn = std::function<Var(
    const ReferenceClassifier& snapshot, const Network& trainable,
    std::span<const TextSample* const> batch, int epoch, int step,
    TrainingLogRecord& record)>;

// Mini-batch gradient descent shared by every training regime. The batch
// order and the initialization depend only on `config.seed`.
TrainedModel RunTrainingLoop(const TrainingData& data,
                             const ArchitectureConfig& arch,
                             const TrainConfig& config,
                             const BatchLossFn& batch_loss,
                             CheckpointMetadata metadata);

// Mean classification loss of a batch on the tape; shared by every regime so
// that degenerate robust configurations reproduce vanilla training bit for
// bit.
Var BatchClassificationLoss(const Network& network,
                            std::span<const TextSample* const> batch);

// Plain cross-entropy (or multilabel BCE) training.
TrainedModel TrainVanilla(const TrainingData& data,
                          const ArchitectureConfig& arch,
                          const TrainConfig& config);

}  // namespace attrobust

#endif  // ATTROBUST_TRAINER_H_
