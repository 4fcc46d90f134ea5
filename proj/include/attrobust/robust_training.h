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


#ifndef ATTROBUST_ROBUST_TRAINING_H_
#define ATTROBUST_ROBUST_TRAINING_H_

#include <span>
#include <string>

#include "attrobust/attribution.h"
#include "attrobust/candidates.h"
#include "attrobust/classifier.h"
#include "attrobust/dare.h"
#include "attrobust/trainer.h"

namespace attrobust {

struct AdvTrainConfig {
  TrainConfig train;
  double attack_ratio = 0.3;
  // k, rho_max, stop words; the prediction constraint is ignored.
  AttackConfig attack;

  void Validate() const;
};

struct FarConfig {
  TrainConfig train;
  double gamma = 0.85;  // inner mix: (1 - gamma) l_c + gamma d
  double delta = 0.85;  // outer mix: (1 - delta) l_c + delta d
  std::string preset = "AdvAAT";
  // Attribution used inside training; ig_steps is the reduced training-time
  // step count.
  AttributionConfig attribution{AttributionMethod::kIntegratedGradients, 8,
                                BaselineKind::kZero};
  double attack_ratio = 0.6;
  AttackConfig attack;
  // Treat A(s) in the outer distance as a constant instead of
  // differentiating through it.
  bool freeze_reference_attribution = false;

  void Validate() const;

  // Named presets carrying the (gamma, delta) pairs of the two FAR
  // instantiations.
  static FarConfig AdvAAT();  // gamma 0.85, delta 0.85
  static FarConfig AAT();     // gamma 0.0, delta 0.7
};

// floor(ratio * batch_size): the number of attacked samples in a batch.
int AttackedCount(double ratio, int batch_size);

// Greedy substitution maximizing the classification loss w.r.t. the true
// labels; loss-gradient ranking, no prediction constraint.
AttackResult TrainingAttack(const TextSample& sample,
                            const ReferenceClassifier& model,
                            const Vocabulary& vocab,
                            const CandidateExtractor& extractor,
                            const AttackConfig& config);

// (1 - gamma) * l_c(candidate) + gamma * d[A(candidate), A(original)], both
// w.r.t. the true labels of `original`.
double FarInnerObjective(const TextSample& candidate,
                         const TextSample& original,
                         const ReferenceClassifier& model,
                         const AttributionConfig& attribution, double gamma);

// Greedy maximization of FarInnerObjective without prediction constraint.
AttackResult FarInnerMax(const TextSample& sample,
                         const ReferenceClassifier& model,
                         const Vocabulary& vocab,
                         const AttributionConfig& attribution,
                         const CandidateExtractor& extractor,
                         const AttackConfig& config, double gamma);

TrainedModel AdversarialTrain(const TrainingData& data,
                              const ArchitectureConfig& arch,
                              const CandidateExtractor& extractor,
                              const AdvTrainConfig& config);

TrainedModel FarTrain(const TrainingData& data, const ArchitectureConfig& arch,
                      const CandidateExtractor& extractor,
                      const FarConfig& config);

}  // namespace attrobust

#endif  // ATTROBUST_ROBUST_TRAINING_H_
