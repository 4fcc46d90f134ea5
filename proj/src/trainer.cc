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


#include "attrobust/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "attrobust/errors.h"
#include "attrobust/random.h"

namespace attrobust {

double MeanClassificationLoss(const ReferenceClassifier& model,
                              std::span<const TextSample> samples) {
  if (samples.empty()) return 0.0;
  double total = 0.0;
  for (const TextSample& s : samples) {
    Var logits = model.network().Logits(autodiff::Constant(model.Embed(s)));
    total += ClassificationLoss(logits, s.labels).scalar();
  }
  return total / static_cast<double>(samples.size());
}

double Accuracy(const ReferenceClassifier& model,
                std::span<const TextSample> samples) {
  if (samples.empty()) return 0.0;
  int correct = 0;
  for (const TextSample& s : samples) {
    if (model.Predict(s) == s.labels) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

TrainedModel RunTrainingLoop(const TrainingData& data,
                             const ArchitectureConfig& arch,
                             const TrainConfig& config,
                             const BatchLossFn& batch_loss,
                             CheckpointMetadata metadata) {
  if (data.train.empty()) throw ConfigError("training set is empty");
  if (config.batch_size < 1 || config.epochs < 0 || config.warmup_epochs < 0 ||
      !(config.learning_rate > 0.0)) {
    throw ConfigError("invalid training configuration");
  }
  for (const TextSample& s : data.train) s.labels.Validate(arch.num_classes);

  ReferenceClassifier model =
      ReferenceClassifier::Initialize(arch, SubSeed(config.seed, "init"));
  std::mt19937_64 order_rng(SubSeed(config.seed, "batch_order"));

  TrainedModel result{model, std::move(metadata), 0.0, 0.0, {}, {}};
  std::vector<size_t> order(data.train.size());
  int step = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), order_rng);
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<const TextSample*> batch;
      for (size_t i = start; i < end; ++i) batch.push_back(&data.train[order[i]]);

      Network trainable = model.TrainableNetwork();
      TrainingLogRecord record;
      record.epoch = epoch;
      record.step = step;
      record.batch_size = static_cast<int>(batch.size());
      Var loss;
      if (epoch <= config.warmup_epochs) {
        loss = BatchClassificationLoss(trainable, batch);
        record.classification_loss = loss.scalar();
        record.total = loss.scalar();
      } else {
        loss = batch_loss(model, trainable, batch, epoch, step, record);
      }
      if (!std::isfinite(loss.scalar())) {
        throw TrainingDivergedError(epoch, "non-finite batch loss");
      }
      const std::vector<Var> leaves = trainable.vars().Ordered(arch.pooling);
      const std::vector<Var> grads = autodiff::Gradients(loss, leaves);

      ModelParameters params = model.params();
      auto targets = params.Ordered(arch.pooling);
      for (size_t i = 0; i < targets.size(); ++i) {
        if (!grads[i].value().allFinite()) {
          throw TrainingDivergedError(epoch, "non-finite gradient");
        }
        *targets[i] -= config.learning_rate * grads[i].value();
      }
      model = ReferenceClassifier(arch, std::move(params));
      result.log.push_back(record);
      ++step;
    }
    const double epoch_loss = MeanClassificationLoss(model, data.train);
    if (!std::isfinite(epoch_loss)) {
      throw TrainingDivergedError(epoch, "non-finite training loss");
    }
    result.epoch_train_losses.push_back(epoch_loss);
  }
  result.model = model;
  result.final_train_loss = MeanClassificationLoss(model, data.train);
  result.final_validation_loss = MeanClassificationLoss(model, data.validation);
  return result;
}

Var BatchClassificationLoss(const Network& network,
                            std::span<const TextSample* const> batch) {
  Var total;
  for (const TextSample* s : batch) {
    Var loss = ClassificationLoss(network.Logits(network.Embed(s->ids)),
                                  s->labels);
    total = total.defined() ? autodiff::Add(total, loss) : loss;
  }
  return autodiff::Scale(total, 1.0 / static_cast<double>(batch.size()));
}

TrainedModel TrainVanilla(const TrainingData& data,
                          const ArchitectureConfig& arch,
                          const TrainConfig& config) {
  auto loss_fn = [](const ReferenceClassifier&, const Network& net,
                    std::span<const TextSample* const> batch, int, int,
                    TrainingLogRecord& record) {
    Var mean = BatchClassificationLoss(net, batch);
    record.classification_loss = mean.scalar();
    record.total = mean.scalar();
    return mean;
  };
  return RunTrainingLoop(data, arch, config, loss_fn,
                         CheckpointMetadata{"vanilla", ""});
}

}  // namespace attrobust
