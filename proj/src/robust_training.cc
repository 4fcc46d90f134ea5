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


#include "attrobust/robust_training.h"

#include <cmath>
#include <vector>

#include "attrobust/errors.h"
#include "attrobust/metrics.h"

namespace attrobust {

using autodiff::Constant;
using autodiff::Leaf;

namespace {

void ValidateShared(const TrainConfig& train, double ratio,
                    const AttackConfig& attack) {
  if (train.batch_size < 1 || train.epochs < 0 || train.warmup_epochs < 0 ||
      !(train.learning_rate > 0.0)) {
    throw ConfigError("invalid training configuration");
  }
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw ConfigError("attack_ratio must lie in [0, 1]");
  }
  attack.Validate();
}

AttackConfig Unconstrained(AttackConfig config) {
  config.constraint = ConstraintMode::kNone;
  return config;
}

double SampleLoss(const ReferenceClassifier& model, const TextSample& s) {
  Var logits = model.network().Logits(Constant(model.Embed(s)));
  return ClassificationLoss(logits, s.labels).scalar();
}

// Per-word attribution distance between two samples under fixed labels.
double PerWordDistance(const ReferenceClassifier& model, const TextSample& a,
                       const TextSample& b, const LabelSet& labels,
                       const AttributionConfig& attribution) {
  if (labels.empty() && attribution.method != AttributionMethod::kAttention) {
    return 0.0;
  }
  return AttributionDistance(
      ComputeAttribution(model, a, labels, attribution).per_word,
      ComputeAttribution(model, b, labels, attribution).per_word);
}

// Row norms of d/dx [(1 - gamma) l_c(x) + gamma d(A(x + eps), A(x))].
Eigen::VectorXd MixedImportance(const ReferenceClassifier& model,
                                const TextSample& sample,
                                const AttributionConfig& attribution,
                                const AttackConfig& config, double gamma) {
  const Network& net = model.network();
  const Matrix x = model.Embed(sample);
  const Matrix baseline =
      MakeBaseline(model, sample.size(), attribution.baseline);
  const Matrix eps = RankingNoise(model, sample.size(), config);

  Var reference = PerWordOnTape(AttributionOnTape(
      net, Leaf(x), baseline, sample.labels, attribution, false));
  Var input = Leaf(x);
  Var perturbed = autodiff::Add(input, Constant(eps));
  Var moved = PerWordOnTape(AttributionOnTape(
      net, perturbed, baseline, sample.labels, attribution, true));
  Var distance = CosineDistanceOnTape(moved, Constant(reference.value()));
  Var loss = ClassificationLoss(net.Logits(input), sample.labels);
  Var objective = autodiff::Add(autodiff::Scale(loss, 1.0 - gamma),
                                autodiff::Scale(distance, gamma));
  Matrix grad = autodiff::Gradient(objective, input).value();
  if (!grad.allFinite()) throw NumericError("non-finite ranking gradient");
  return grad.rowwise().norm();
}

// Outer attribution term d[A(adv), A(orig)] on the trainable tape.
Var OuterDistance(const Network& net, const TextSample& original,
                  const TextSample& adversarial, const FarConfig& config) {
  const Matrix baseline =
      MakeBaseline(net, original.size(), config.attribution.baseline);
  Var reference = PerWordOnTape(AttributionOnTape(
      net, net.Embed(original.ids), baseline, original.labels,
      config.attribution, !config.freeze_reference_attribution));
  if (config.freeze_reference_attribution) {
    reference = Constant(reference.value());
  }
  Var moved = PerWordOnTape(AttributionOnTape(
      net, net.Embed(adversarial.ids), baseline, original.labels,
      config.attribution, true));
  return CosineDistanceOnTape(moved, reference);
}

}  // namespace

void AdvTrainConfig::Validate() const {
  ValidateShared(train, attack_ratio, attack);
}

void FarConfig::Validate() const {
  ValidateShared(train, attack_ratio, attack);
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  if (!(delta >= 0.0 && delta <= 1.0)) throw ConfigError("delta must lie in [0, 1]");
  if (attribution.ig_steps < 1) throw ConfigError("ig_steps must be positive");
}

FarConfig FarConfig::AdvAAT() {
  FarConfig config;
  config.gamma = 0.85;
  config.delta = 0.85;
  config.preset = "AdvAAT";
  return config;
}

FarConfig FarConfig::AAT() {
  FarConfig config;
  config.gamma = 0.0;
  config.delta = 0.7;
  config.preset = "AAT";
  return config;
}

int AttackedCount(double ratio, int batch_size) {
  if (batch_size <= 0) return 0;
  return static_cast<int>(std::floor(ratio * batch_size + 1e-9));
}

AttackResult TrainingAttack(const TextSample& sample,
                            const ReferenceClassifier& model,
                            const Vocabulary& vocab,
                            const CandidateExtractor& extractor,
                            const AttackConfig& config) {
  const AttackConfig attack = Unconstrained(config);
  const Eigen::VectorXd importance =
      LossGradientImportance(model, sample, sample.labels);
  const std::vector<int> order = OrderByImportance(importance);
  GreedyObjective objective;
  objective.initial = SampleLoss(model, sample);
  objective.value = [&](const TextSample& trial) {
    return SampleLoss(model, trial);
  };
  AttackResult result = GreedySubstitutionSearch(sample, order, extractor,
                                                 vocab, attack, objective);
  result.constraint_held = true;
  return result;
}

double FarInnerObjective(const TextSample& candidate,
                         const TextSample& original,
                         const ReferenceClassifier& model,
                         const AttributionConfig& attribution, double gamma) {
  if (gamma == 0.0) return SampleLoss(model, candidate);
  const double d =
      PerWordDistance(model, candidate, original, original.labels, attribution);
  if (gamma == 1.0) return d;
  return (1.0 - gamma) * SampleLoss(model, candidate) + gamma * d;
}

AttackResult FarInnerMax(const TextSample& sample,
                         const ReferenceClassifier& model,
                         const Vocabulary& vocab,
                         const AttributionConfig& attribution,
                         const CandidateExtractor& extractor,
                         const AttackConfig& config, double gamma) {
  if (gamma == 0.0) {
    return TrainingAttack(sample, model, vocab, extractor, config);
  }
  const AttackConfig attack = Unconstrained(config);
  ImportanceRanking ranking;
  if (gamma == 1.0) {
    ranking = RankWords(model, sample, sample.labels, attribution, attack);
  } else {
    try {
      ranking.importance =
          MixedImportance(model, sample, attribution, attack, gamma);
    } catch (const NumericError&) {
      ranking.fallback = true;
      ranking.importance = LossGradientImportance(model, sample, sample.labels);
    }
    ranking.order = OrderByImportance(ranking.importance);
  }
  GreedyObjective objective;
  objective.initial =
      FarInnerObjective(sample, sample, model, attribution, gamma);
  objective.value = [&](const TextSample& trial) {
    return FarInnerObjective(trial, sample, model, attribution, gamma);
  };
  AttackResult result = GreedySubstitutionSearch(sample, ranking.order,
                                                 extractor, vocab, attack,
                                                 objective);
  result.ranking_fallback = ranking.fallback;
  result.constraint_held = true;
  return result;
}

TrainedModel AdversarialTrain(const TrainingData& data,
                              const ArchitectureConfig& arch,
                              const CandidateExtractor& extractor,
                              const AdvTrainConfig& config) {
  config.Validate();
  if (data.vocab == nullptr) throw ConfigError("training data has no vocabulary");
  const Vocabulary& vocab = *data.vocab;
  auto loss_fn = [&](const ReferenceClassifier& snapshot, const Network& net,
                     std::span<const TextSample* const> batch, int, int,
                     TrainingLogRecord& record) {
    const int attacked =
        AttackedCount(config.attack_ratio, static_cast<int>(batch.size()));
    std::vector<TextSample> adversarial;
    adversarial.reserve(attacked);
    for (int i = 0; i < attacked; ++i) {
      adversarial.push_back(
          TrainingAttack(*batch[i], snapshot, vocab, extractor, config.attack)
              .adversarial);
    }
    std::vector<const TextSample*> mixed(batch.begin(), batch.end());
    for (int i = 0; i < attacked; ++i) mixed[i] = &adversarial[i];
    Var mean = BatchClassificationLoss(net, mixed);
    record.attacked = attacked;
    record.classification_loss = mean.scalar();
    record.total = mean.scalar();
    return mean;
  };
  CheckpointMetadata metadata{"adversarial", ""};
  return RunTrainingLoop(data, arch, config.train, loss_fn, metadata);
}

TrainedModel FarTrain(const TrainingData& data, const ArchitectureConfig& arch,
                      const CandidateExtractor& extractor,
                      const FarConfig& config) {
  config.Validate();
  if (data.vocab == nullptr) throw ConfigError("training data has no vocabulary");
  const Vocabulary& vocab = *data.vocab;
  auto loss_fn = [&](const ReferenceClassifier& snapshot, const Network& net,
                     std::span<const TextSample* const> batch, int, int,
                     TrainingLogRecord& record) {
    const int size = static_cast<int>(batch.size());
    const int attacked = AttackedCount(config.attack_ratio, size);
    std::vector<TextSample> adversarial;
    adversarial.reserve(attacked);
    for (int i = 0; i < attacked; ++i) {
      adversarial.push_back(FarInnerMax(*batch[i], snapshot, vocab,
                                        config.attribution, extractor,
                                        config.attack, config.gamma)
                                .adversarial);
    }
    std::vector<const TextSample*> mixed(batch.begin(), batch.end());
    for (int i = 0; i < attacked; ++i) mixed[i] = &adversarial[i];
    Var classification = BatchClassificationLoss(net, mixed);
    record.attacked = attacked;
    record.classification_loss = classification.scalar();
    if (config.delta == 0.0) {
      record.total = classification.scalar();
      return classification;
    }

    Var distance_sum;
    for (int i = 0; i < attacked; ++i) {
      const TextSample& original = *batch[i];
      if (adversarial[i].ids == original.ids) continue;
      if (original.labels.empty() &&
          config.attribution.method != AttributionMethod::kAttention) {
        continue;
      }
      Var d = OuterDistance(net, original, adversarial[i], config);
      distance_sum = distance_sum.defined() ? autodiff::Add(distance_sum, d) : d;
    }
    Var attribution_mean =
        distance_sum.defined()
            ? autodiff::Scale(distance_sum, 1.0 / static_cast<double>(size))
            : Constant(0.0);
    record.attribution_loss = attribution_mean.scalar();
    Var total =
        autodiff::Add(autodiff::Scale(classification, 1.0 - config.delta),
                      autodiff::Scale(attribution_mean, config.delta));
    record.total = total.scalar();
    return total;
  };
  CheckpointMetadata metadata{"far", config.preset};
  return RunTrainingLoop(data, arch, config.train, loss_fn, metadata);
}

}  // namespace attrobust
