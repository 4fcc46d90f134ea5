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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "attrobust/errors.h"
#include "attrobust/metrics.h"
#include "test_util.h"

namespace attrobust {
namespace {

using testing::RandomSample;
using testing::SmallArch;
using testing::SmallSynonyms;
using testing::SmallVocab;

constexpr AttributionConfig kIg8{AttributionMethod::kIntegratedGradients, 8,
                                 BaselineKind::kZero};

// Cross-entropy written out from the logits.
double CrossEntropy(const ReferenceClassifier& model, const TextSample& s) {
  const Eigen::RowVectorXd z = model.Logits(s);
  const double m = z.maxCoeff();
  const double log_sum = m + std::log((z.array() - m).exp().sum());
  return log_sum - z(s.labels.labels().front());
}

double CosineDistance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return 1.0 - a.dot(b) / (a.norm() * b.norm());
}

void ExpectSameParameters(const ReferenceClassifier& a,
                          const ReferenceClassifier& b) {
  const auto pa = a.params().Ordered(a.arch().pooling);
  const auto pb = b.params().Ordered(b.arch().pooling);
  ASSERT_EQ(pa.size(), pb.size());
  for (size_t i = 0; i < pa.size(); ++i) {
    EXPECT_TRUE(*pa[i] == *pb[i]) << "tensor " << i;
  }
}

class NoCandidates : public CandidateExtractor {
 public:
  std::string name() const override { return "none"; }
  std::vector<Candidate> Propose(std::span<const std::string>, int,
                                 int) const override {
    return {};
  }
};

TEST(AttackedCountTest, FloorPolicy) {
  EXPECT_EQ(AttackedCount(0.3, 10), 3);
  EXPECT_EQ(AttackedCount(0.5, 16), 8);
  EXPECT_EQ(AttackedCount(0.6, 16), 9);
  EXPECT_EQ(AttackedCount(0.3, 3), 0);
  EXPECT_EQ(AttackedCount(0.0, 16), 0);
  EXPECT_EQ(AttackedCount(1.0, 7), 7);
}

TEST(FarConfigTest, PresetsAndValidation) {
  const FarConfig adv = FarConfig::AdvAAT();
  EXPECT_EQ(adv.gamma, 0.85);
  EXPECT_EQ(adv.delta, 0.85);
  EXPECT_EQ(adv.preset, "AdvAAT");
  const FarConfig aat = FarConfig::AAT();
  EXPECT_EQ(aat.gamma, 0.0);
  EXPECT_EQ(aat.delta, 0.7);
  EXPECT_EQ(aat.preset, "AAT");

  FarConfig bad = adv;
  bad.gamma = 1.5;
  EXPECT_THROW(bad.Validate(), ConfigError);
  bad = adv;
  bad.delta = -0.1;
  EXPECT_THROW(bad.Validate(), ConfigError);
  bad = adv;
  bad.attack_ratio = 1.1;
  EXPECT_THROW(bad.Validate(), ConfigError);
  AdvTrainConfig adv_bad;
  adv_bad.train.learning_rate = 0.0;
  EXPECT_THROW(adv_bad.Validate(), ConfigError);
}

class InstanceTest : public ::testing::Test {
 protected:
  InstanceTest() : vocab_(SmallVocab()), synonyms_(SmallSynonyms()) {
    config_.rho_max = 0.5;
    config_.k = 2;
  }

  // A sample labelled with the model's own prediction.
  TextSample Predicted(const ReferenceClassifier& model, std::mt19937_64& rng,
                       int length) {
    TextSample s = RandomSample(rng, vocab_, length, 3);
    s.labels = model.Predict(s);
    return s;
  }

  Vocabulary vocab_;
  SynonymTable synonyms_;
  AttackConfig config_;
};

TEST_F(InstanceTest, TrainingAttackWithoutCandidatesIsIdentity) {
  const auto model = ReferenceClassifier::Initialize(
      SmallArch(vocab_.size(), Pooling::kAttention), 2);
  std::mt19937_64 rng(2);
  const TextSample s = RandomSample(rng, vocab_, 5, 3);
  const AttackResult r =
      TrainingAttack(s, model, vocab_, NoCandidates(), config_);
  EXPECT_EQ(r.n, 0);
  EXPECT_EQ(r.adversarial.tokens, s.tokens);
}

TEST_F(InstanceTest, TrainingAttackSinglePosition) {
  SynonymTable table;
  table.Set("pain", {"mild", "severe"});
  for (uint64_t seed = 0; seed < 8; ++seed) {
    const auto model = ReferenceClassifier::Initialize(
        SmallArch(vocab_.size(), Pooling::kAttention), seed);
    const TextSample s = MakeSample("s", {"pain", "the", "and"}, vocab_,
                                    LabelSet({static_cast<int>(seed % 3)},
                                             TaskMode::kSingleLabel));
    AttackConfig config = config_;
    config.rho_max = 1.0;
    const double base = CrossEntropy(model, s);
    const double mild = CrossEntropy(model, WithSubstitution(s, 0, "mild", vocab_));
    const double severe =
        CrossEntropy(model, WithSubstitution(s, 0, "severe", vocab_));
    std::string expected = "pain";
    if (std::max(mild, severe) > base) expected = mild >= severe ? "mild" : "severe";
    const AttackResult r = TrainingAttack(s, model, vocab_, table, config);
    EXPECT_EQ(r.adversarial.tokens[0], expected) << "seed " << seed;
    EXPECT_NEAR(r.d_max, std::max({base, mild, severe}), 1e-12);
  }
}

TEST_F(InstanceTest, TrainingAttackBelowExhaustiveLoss) {
  for (uint64_t seed = 0; seed < 6; ++seed) {
    const auto model = ReferenceClassifier::Initialize(
        SmallArch(vocab_.size(), Pooling::kMean), 50 + seed);
    std::mt19937_64 rng(seed);
    const TextSample s = RandomSample(rng, vocab_, 6, 3);
    const AttackResult r = TrainingAttack(s, model, vocab_, synonyms_, config_);
    // Exhaustive loss over all candidate assignments within the budget.
    std::vector<std::vector<std::string>> options;
    for (int i = 0; i < s.size(); ++i) {
      options.push_back({s.tokens[i]});
      if (config_.stop_words.count(s.tokens[i])) continue;
      for (const Candidate& c :
           ExtractCandidates(synonyms_, i, s, config_.k).candidates) {
        options.back().push_back(c.word);
      }
    }
    const int budget = SubstitutionBudget(s.size(), config_.rho_max);
    double best = -1.0;
    std::vector<int> digit(s.size(), 0);
    while (true) {
      int changed = 0;
      std::vector<std::string> tokens;
      for (int i = 0; i < s.size(); ++i) {
        tokens.push_back(options[i][digit[i]]);
        changed += digit[i] != 0;
      }
      if (changed <= budget) {
        best = std::max(best,
                        CrossEntropy(model, MakeSample("t", tokens, vocab_,
                                                       s.labels)));
      }
      int i = 0;
      while (i < s.size() && ++digit[i] == static_cast<int>(options[i].size())) {
        digit[i++] = 0;
      }
      if (i == s.size()) break;
    }
    const double got = CrossEntropy(model, r.adversarial);
    EXPECT_LE(got, best + 1e-12) << "seed " << seed;
    EXPECT_GE(got, CrossEntropy(model, s) - 1e-12);
    EXPECT_NEAR(got, r.d_max, 1e-12);
  }
}

TEST_F(InstanceTest, GammaOneIsUnconstrainedDare) {
  for (uint64_t seed = 0; seed < 6; ++seed) {
    const auto model = ReferenceClassifier::Initialize(
        SmallArch(vocab_.size(), Pooling::kAttention), 70 + seed);
    std::mt19937_64 rng(seed);
    const TextSample s = Predicted(model, rng, 6);
    AttackConfig dare = config_;
    dare.constraint = ConstraintMode::kNone;
    const AttackResult expected =
        DareAttack(s, model, vocab_, kIg8, synonyms_, dare);
    const AttackResult got =
        FarInnerMax(s, model, vocab_, kIg8, synonyms_, config_, 1.0);
    EXPECT_EQ(got.adversarial.tokens, expected.adversarial.tokens);
    EXPECT_EQ(got.ranking, expected.ranking);
    EXPECT_EQ(got.d_max, expected.d_max);
    EXPECT_EQ(got.n, expected.n);
  }
}

TEST_F(InstanceTest, GammaZeroIsTrainingAttack) {
  for (uint64_t seed = 0; seed < 6; ++seed) {
    const auto model = ReferenceClassifier::Initialize(
        SmallArch(vocab_.size(), Pooling::kAttention), 90 + seed);
    std::mt19937_64 rng(seed);
    const TextSample s = RandomSample(rng, vocab_, 6, 3);
    const AttackResult expected =
        TrainingAttack(s, model, vocab_, synonyms_, config_);
    const AttackResult got =
        FarInnerMax(s, model, vocab_, kIg8, synonyms_, config_, 0.0);
    EXPECT_EQ(got.adversarial.tokens, expected.adversarial.tokens);
    EXPECT_EQ(got.d_max, expected.d_max);
    EXPECT_EQ(got.n, expected.n);
  }
}

TEST_F(InstanceTest, MixedObjectiveMatchesRecomputation) {
  const double gamma = 0.85;
  int changed = 0;
  for (uint64_t seed = 0; seed < 6; ++seed) {
    const auto model = ReferenceClassifier::Initialize(
        SmallArch(vocab_.size(), Pooling::kAttention), 110 + seed);
    std::mt19937_64 rng(seed);
    const TextSample s = RandomSample(rng, vocab_, 6, 3);
    const AttackResult r =
        FarInnerMax(s, model, vocab_, kIg8, synonyms_, config_, gamma);
    const Eigen::VectorXd a =
        ComputeAttribution(model, s, s.labels, kIg8).per_word;
    const Eigen::VectorXd a_adv =
        ComputeAttribution(model, r.adversarial, s.labels, kIg8).per_word;
    const double d = r.n == 0 ? 0.0 : CosineDistance(a_adv, a);
    const double expected =
        (1.0 - gamma) * CrossEntropy(model, r.adversarial) + gamma * d;
    EXPECT_NEAR(r.d_max, expected, 1e-9) << "seed " << seed;
    EXPECT_NEAR(FarInnerObjective(r.adversarial, s, model, kIg8, gamma),
                expected, 1e-9);
    changed += r.n > 0;
  }
  EXPECT_GT(changed, 0);
}

class TrainingTest : public ::testing::Test {
 protected:
  TrainingTest()
      : vocab_(SmallVocab()),
        synonyms_(SmallSynonyms()),
        arch_(SmallArch(vocab_.size(), Pooling::kAttention, 2)) {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 22; ++i) {
      TextSample s = RandomSample(rng, vocab_, 4 + i % 4, 2);
      // Label follows a cue word so training has signal.
      const bool positive =
          std::count(s.tokens.begin(), s.tokens.end(), "good") +
              std::count(s.tokens.begin(), s.tokens.end(), "great") >
          0;
      s.labels = LabelSet({positive ? 1 : 0}, TaskMode::kSingleLabel);
      train_.push_back(s);
    }
    data_.train = train_;
    data_.vocab = &vocab_;
    train_config_.epochs = 3;
    train_config_.batch_size = 10;
    train_config_.learning_rate = 0.1;
    train_config_.seed = 4;
    attack_.rho_max = 0.5;
    attack_.k = 2;
  }

  Vocabulary vocab_;
  SynonymTable synonyms_;
  ArchitectureConfig arch_;
  std::vector<TextSample> train_;
  TrainingData data_;
  TrainConfig train_config_;
  AttackConfig attack_;
};

TEST_F(TrainingTest, ZeroAttackRatioIsVanilla) {
  const TrainedModel vanilla = TrainVanilla(data_, arch_, train_config_);
  AdvTrainConfig adv;
  adv.train = train_config_;
  adv.attack_ratio = 0.0;
  adv.attack = attack_;
  const TrainedModel adversarial =
      AdversarialTrain(data_, arch_, synonyms_, adv);
  ExpectSameParameters(vanilla.model, adversarial.model);
  EXPECT_EQ(vanilla.epoch_train_losses, adversarial.epoch_train_losses);
  EXPECT_EQ(adversarial.metadata.regime, "adversarial");
}

TEST_F(TrainingTest, AttackedCountPerBatch) {
  AdvTrainConfig adv;
  adv.train = train_config_;
  adv.attack_ratio = 0.3;
  adv.attack = attack_;
  const TrainedModel trained = AdversarialTrain(data_, arch_, synonyms_, adv);
  ASSERT_EQ(trained.log.size(), 9u);  // 3 epochs x (10 + 10 + 2)
  for (const TrainingLogRecord& rec : trained.log) {
    EXPECT_EQ(rec.attacked, rec.batch_size == 10 ? 3 : 0);
  }
}

TEST_F(TrainingTest, ZeroDeltaIsAdversarialTraining) {
  AdvTrainConfig adv;
  adv.train = train_config_;
  adv.attack_ratio = 0.5;
  adv.attack = attack_;
  const TrainedModel expected = AdversarialTrain(data_, arch_, synonyms_, adv);

  FarConfig far = FarConfig::AAT();
  far.train = train_config_;
  far.delta = 0.0;
  far.attack_ratio = 0.5;
  far.attack = attack_;
  const TrainedModel got = FarTrain(data_, arch_, synonyms_, far);
  ExpectSameParameters(expected.model, got.model);
  ASSERT_EQ(expected.log.size(), got.log.size());
  for (size_t i = 0; i < got.log.size(); ++i) {
    EXPECT_EQ(got.log[i].classification_loss,
              expected.log[i].classification_loss);
    EXPECT_EQ(got.log[i].total, got.log[i].classification_loss);
  }
  EXPECT_EQ(got.metadata.regime, "far");
  EXPECT_EQ(got.metadata.preset, "AAT");
}

TEST_F(TrainingTest, LogDecomposesIntoTotal) {
  FarConfig far = FarConfig::AAT();  // gamma 0, delta 0.7
  far.train = train_config_;
  far.attack_ratio = 0.5;
  far.attack = attack_;
  const TrainedModel trained = FarTrain(data_, arch_, synonyms_, far);
  ASSERT_FALSE(trained.log.empty());
  bool saw_attribution = false;
  for (const TrainingLogRecord& rec : trained.log) {
    EXPECT_NEAR(rec.total,
                (1.0 - far.delta) * rec.classification_loss +
                    far.delta * rec.attribution_loss,
                1e-9);
    EXPECT_EQ(rec.attacked, AttackedCount(0.5, rec.batch_size));
    saw_attribution |= rec.attribution_loss > 0.0;
  }
  EXPECT_TRUE(saw_attribution);
}

TEST_F(TrainingTest, FarTrainingIsDeterministic) {
  FarConfig far = FarConfig::AdvAAT();
  far.train = train_config_;
  far.train.epochs = 2;
  far.attack_ratio = 0.5;
  far.attack = attack_;
  const TrainedModel a = FarTrain(data_, arch_, synonyms_, far);
  const TrainedModel b = FarTrain(data_, arch_, synonyms_, far);
  ExpectSameParameters(a.model, b.model);
  ASSERT_EQ(a.log.size(), b.log.size());
  for (size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(a.log[i].total, b.log[i].total);
  }
}

TEST_F(TrainingTest, WarmupEpochsUseTheCleanLoss) {
  FarConfig far = FarConfig::AdvAAT();
  far.train = train_config_;
  far.train.warmup_epochs = 3;
  far.attack_ratio = 0.5;
  far.attack = attack_;
  const TrainedModel warm = FarTrain(data_, arch_, synonyms_, far);
  const TrainedModel vanilla = TrainVanilla(data_, arch_, train_config_);
  ExpectSameParameters(warm.model, vanilla.model);
}

}  // namespace
}  // namespace attrobust
