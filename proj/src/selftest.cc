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


#include "attrobust/selftest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "attrobust/attribution.h"
#include "attrobust/candidates.h"
#include "attrobust/classifier.h"
#include "attrobust/dare.h"

namespace attrobust {

namespace {

struct Fixture {
  Vocabulary vocab;
  SynonymTable synonyms;
};

Fixture MakeFixture() {
  Fixture f;
  const char* words[] = {"drug", "pain", "relief", "good", "bad", "mild",
                         "severe", "works", "fails", "great", "poor", "fine"};
  for (const char* w : words) f.vocab.Add(w);
  f.synonyms.Set("drug", {"relief", "works"});
  f.synonyms.Set("pain", {"severe", "mild", "bad"});
  f.synonyms.Set("good", {"great", "fine", "mild"});
  f.synonyms.Set("bad", {"poor", "severe"});
  f.synonyms.Set("works", {"fails", "fine"});
  f.synonyms.Set("mild", {"fine", "good"});
  return f;
}

TextSample RandomSample(std::mt19937_64& rng, const Vocabulary& vocab, int length,
                        int num_classes, TaskMode mode) {
  std::uniform_int_distribution<int> word(3, vocab.size() - 1);
  std::vector<std::string> tokens;
  for (int i = 0; i < length; ++i) tokens.push_back(vocab.Word(word(rng)));
  std::uniform_int_distribution<int> label(0, num_classes - 1);
  return MakeSample("s", tokens, vocab, LabelSet({label(rng)}, mode));
}

ArchitectureConfig SmallArch(int vocab_size, Pooling pooling, TaskMode mode,
                             int classes) {
  ArchitectureConfig arch;
  arch.vocab_size = vocab_size;
  arch.embedding_dim = 4;
  arch.hidden_dim = 6;
  arch.attention_dim = 3;
  arch.num_classes = classes;
  arch.pooling = pooling;
  arch.task_mode = mode;
  return arch;
}

double TargetValue(const ReferenceClassifier& model, const Matrix& x,
                   const LabelSet& labels) {
  const Eigen::RowVectorXd logits = model.Forward(x);
  double total = 0.0;
  for (int l : labels.labels()) total += logits(l);
  return total;
}

std::string Format(const char* fmt, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), fmt, value);
  return buffer;
}

}  // namespace

std::vector<SelfTestCheck> RunSelfTest(uint64_t seed) {
  std::vector<SelfTestCheck> checks;
  const Fixture fixture = MakeFixture();
  std::mt19937_64 rng(seed);

  {
    double worst = 0.0;
    for (int c = 0; c < 5; ++c) {
      const auto arch = SmallArch(fixture.vocab.size(), Pooling::kAttention,
                                  TaskMode::kSingleLabel, 3);
      const auto model = ReferenceClassifier::Initialize(arch, seed + c);
      const TextSample s = RandomSample(rng, fixture.vocab, 5, 3, TaskMode::kSingleLabel);
      const Matrix x = model.Embed(s);
      const Matrix grad = GradWrtEmbeddings(
          model.network(), x, [&](const Network& net, const Var& e) {
            return ClassificationLoss(net.Logits(e), s.labels);
          });
      auto loss = [&](const Matrix& e) {
        return ClassificationLoss(model.network().Logits(autodiff::Constant(e)),
                                  s.labels)
            .scalar();
      };
      const double h = 1e-5;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        Matrix plus = x, minus = x;
        plus.data()[i] += h;
        minus.data()[i] -= h;
        const double numeric = (loss(plus) - loss(minus)) / (2 * h);
        const double err = std::abs(numeric - grad.data()[i]) /
                           std::max(1e-6, std::abs(numeric) + std::abs(grad.data()[i]));
        worst = std::max(worst, err);
      }
    }
    checks.push_back({"gradient-vs-finite-differences", worst < 1e-3,
                      Format("max relative error %.3g", worst)});
  }

  {
    double worst = 0.0;
    AttributionConfig config{AttributionMethod::kIntegratedGradients, 256,
                             BaselineKind::kZero};
    for (int c = 0; c < 5; ++c) {
      const auto arch = SmallArch(fixture.vocab.size(), Pooling::kAttention,
                                  TaskMode::kSingleLabel, 3);
      const auto model = ReferenceClassifier::Initialize(arch, seed + 10 + c);
      const TextSample s = RandomSample(rng, fixture.vocab, 6, 3, TaskMode::kSingleLabel);
      const AttributionMap map = IntegratedGradients(model, s, s.labels, config);
      const Matrix x = model.Embed(s);
      const double delta = TargetValue(model, x, s.labels) -
                           TargetValue(model, Matrix::Zero(x.rows(), x.cols()), s.labels);
      worst = std::max(worst, std::abs(map.per_word.sum() - delta));
    }
    checks.push_back({"integrated-gradients-completeness", worst < 1e-3,
                      Format("max gap %.3g", worst)});
  }

  {
    double worst = 0.0;
    for (int c = 0; c < 5; ++c) {
      const auto arch = SmallArch(fixture.vocab.size(), Pooling::kMean,
                                  TaskMode::kSingleLabel, 3);
      const auto model = ReferenceClassifier::Initialize(arch, seed + 20 + c);
      const TextSample s = RandomSample(rng, fixture.vocab, 6, 3, TaskMode::kSingleLabel);
      const AttributionMap map = DeepLiftRescale(model, s, s.labels, BaselineKind::kZero);
      const Matrix x = model.Embed(s);
      const double delta = TargetValue(model, x, s.labels) -
                           TargetValue(model, Matrix::Zero(x.rows(), x.cols()), s.labels);
      worst = std::max(worst, std::abs(map.per_word.sum() - delta));
    }
    checks.push_back({"deeplift-summation-to-delta", worst < 1e-9,
                      Format("max gap %.3g", worst)});
  }

  {
    bool ok = true;
    int instances = 0;
    AttackConfig attack;
    attack.k = 3;
    attack.rho_max = 0.4;
    attack.stop_words = {};
    attack.constraint = ConstraintMode::kArgmaxEquality;
    const AttributionConfig attribution{AttributionMethod::kSaliency, 50,
                                        BaselineKind::kZero};
    for (int c = 0; c < 10; ++c) {
      const auto arch = SmallArch(fixture.vocab.size(), Pooling::kAttention,
                                  TaskMode::kSingleLabel, 2);
      const auto model = ReferenceClassifier::Initialize(arch, seed + 30 + c);
      const TextSample s = RandomSample(rng, fixture.vocab, 5, 2, TaskMode::kSingleLabel);
      const AttackResult greedy =
          DareAttack(s, model, fixture.vocab, attribution, fixture.synonyms, attack);
      const AttackResult oracle = BruteForceAttack(s, model, fixture.vocab,
                                                   attribution, fixture.synonyms, attack);
      ok = ok && greedy.d_max <= oracle.d_max + 1e-12;
      ok = ok && PredictionConstraint(model.Predict(s), model.Logits(greedy.adversarial),
                                      attack.constraint);
      ok = ok && greedy.n <= SubstitutionBudget(s.size(), attack.rho_max);
      ++instances;
    }
    checks.push_back({"greedy-below-exhaustive", ok,
                      std::to_string(instances) + " instances"});
  }

  {
    double worst = 0.0;
    const AttributionConfig config{AttributionMethod::kIntegratedGradients, 32,
                                   BaselineKind::kZero};
    for (int c = 0; c < 3; ++c) {
      const auto arch = SmallArch(fixture.vocab.size(), Pooling::kAttention,
                                  TaskMode::kMultilabel, 3);
      const auto model = ReferenceClassifier::Initialize(arch, seed + 40 + c);
      TextSample s = RandomSample(rng, fixture.vocab, 5, 3, TaskMode::kMultilabel);
      const LabelSet labels({0, 2}, TaskMode::kMultilabel);
      const AttributionMap joint = MultilabelAttribution(model, s, labels, config);
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(s.size());
      for (int l : labels.labels()) {
        sum += ComputeAttribution(model, s, LabelSet({l}, TaskMode::kMultilabel), config)
                   .per_word;
      }
      worst = std::max(worst, (joint.per_word - sum).cwiseAbs().maxCoeff());
    }
    checks.push_back({"multilabel-additivity", worst < 1e-9,
                      Format("max gap %.3g", worst)});
  }
  return checks;
}

}  // namespace attrobust
