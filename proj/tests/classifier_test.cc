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


#include "attrobust/classifier.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "attrobust/checkpoint.h"
#include "attrobust/errors.h"
#include "attrobust/trainer.h"
#include "test_util.h"

namespace attrobust {
namespace {

using testing::SmallArch;
using testing::SmallVocab;

std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

// Direct Eigen evaluation of the attention-pool forward pass.
Eigen::RowVectorXd ManualForward(const ModelParameters& p, const Matrix& x) {
  const Matrix scores =
      ((x * p.attention_w).rowwise() + p.attention_b.row(0)).array().tanh().matrix() *
      p.attention_v;
  const double top = scores.maxCoeff();
  Eigen::VectorXd alpha = (scores.array() - top).exp().matrix();
  alpha /= alpha.sum();
  const Eigen::RowVectorXd pooled = alpha.transpose() * x;
  const Eigen::RowVectorXd hidden =
      (pooled * p.hidden_w + p.hidden_b.row(0)).cwiseMax(0.0);
  return hidden * p.output_w + p.output_b.row(0);
}

TEST(VocabularyTest, ReservesSpecialIds) {
  Vocabulary vocab;
  EXPECT_EQ(vocab.size(), 3);
  EXPECT_EQ(vocab.Id("<pad>"), Vocabulary::kPadId);
  EXPECT_EQ(vocab.Id("<unk>"), Vocabulary::kUnknownId);
  EXPECT_EQ(vocab.Id("<mask>"), Vocabulary::kMaskId);
  EXPECT_EQ(vocab.Add("pain"), 3);
  EXPECT_EQ(vocab.Add("pain"), 3);
  EXPECT_EQ(vocab.Id("never-seen"), Vocabulary::kUnknownId);
  EXPECT_THROW(vocab.Word(99), LookupError);
}

TEST(VocabularyTest, SaveLoadRoundTripKeepsHash) {
  const Vocabulary vocab = SmallVocab();
  const std::string path = TempPath("attrobust_vocab_test.txt");
  vocab.Save(path);
  const Vocabulary loaded = Vocabulary::Load(path);
  EXPECT_EQ(loaded, vocab);
  EXPECT_EQ(loaded.ContentHash(), vocab.ContentHash());
  Vocabulary other = vocab;
  other.Add("extra");
  EXPECT_NE(other.ContentHash(), vocab.ContentHash());
}

TEST(TextSampleTest, SubstitutionKeepsTokensAndIdsInSync) {
  const Vocabulary vocab = SmallVocab();
  const TextSample s = MakeSample("a", {"drug", "works"}, vocab,
                                  LabelSet({0}, TaskMode::kSingleLabel));
  const TextSample t = WithSubstitution(s, 1, "zzz", vocab);
  EXPECT_EQ(t.tokens[1], "zzz");
  EXPECT_EQ(t.ids[1], Vocabulary::kUnknownId);
  EXPECT_EQ(t.Text(), "drug zzz");
  EXPECT_THROW(WithSubstitution(s, 2, "x", vocab), LookupError);
}

TEST(TextSampleTest, LabelSetIsSortedUniqueAndValidated) {
  const LabelSet set({2, 0, 2}, TaskMode::kMultilabel);
  EXPECT_EQ(set.labels(), (std::vector<int>{0, 2}));
  EXPECT_TRUE(set.Contains(2));
  EXPECT_FALSE(set.Contains(1));
  EXPECT_THROW(set.Validate(2), ConfigError);
  EXPECT_THROW(LabelSet({0, 1}, TaskMode::kSingleLabel).Validate(3), ConfigError);
}

TEST(ClassifierTest, ForwardMatchesManualComputation) {
  const Vocabulary vocab = SmallVocab();
  std::mt19937_64 rng(3);
  for (int c = 0; c < 5; ++c) {
    const auto model = ReferenceClassifier::Initialize(
        SmallArch(vocab.size(), Pooling::kAttention), 40 + c);
    const TextSample s = testing::RandomSample(rng, vocab, 6, 3);
    const Matrix x = model.Embed(s);
    const Eigen::RowVectorXd expected = ManualForward(model.params(), x);
    EXPECT_LT((model.Logits(s) - expected).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ClassifierTest, MeanPoolForwardMatchesManualComputation) {
  const Vocabulary vocab = SmallVocab();
  const auto model =
      ReferenceClassifier::Initialize(SmallArch(vocab.size(), Pooling::kMean), 8);
  const TextSample s = MakeSample("a", {"drug", "pain", "good"}, vocab,
                                  LabelSet({0}, TaskMode::kSingleLabel));
  const ModelParameters& p = model.params();
  const Matrix x = model.Embed(s);
  const Eigen::RowVectorXd pooled = x.colwise().mean();
  const Eigen::RowVectorXd hidden =
      (pooled * p.hidden_w + p.hidden_b.row(0)).cwiseMax(0.0);
  const Eigen::RowVectorXd expected = hidden * p.output_w + p.output_b.row(0);
  EXPECT_LT((model.Logits(s) - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ClassifierTest, InitializationIsDeterministicWithZeroPadRow) {
  const auto arch = SmallArch(20, Pooling::kAttention);
  const auto a = ReferenceClassifier::Initialize(arch, 5);
  const auto b = ReferenceClassifier::Initialize(arch, 5);
  const auto c = ReferenceClassifier::Initialize(arch, 6);
  EXPECT_EQ(a.params().embedding, b.params().embedding);
  EXPECT_NE(a.params().embedding, c.params().embedding);
  EXPECT_EQ(a.params().embedding.row(Vocabulary::kPadId).norm(), 0.0);
}

TEST(ClassifierTest, RejectsBadParameters) {
  const auto arch = SmallArch(10, Pooling::kAttention);
  ModelParameters p = ReferenceClassifier::Initialize(arch, 1).params();
  ModelParameters wrong = p;
  wrong.hidden_w = Matrix::Zero(3, 3);
  EXPECT_THROW(ReferenceClassifier(arch, wrong), ShapeError);
  ModelParameters nan = p;
  nan.output_b(0, 0) = std::nan("");
  EXPECT_THROW(ReferenceClassifier(arch, nan), NumericError);
}

TEST(ClassifierTest, PredictionRules) {
  Eigen::RowVectorXd tied(3);
  tied << 1.0, 2.0, 2.0;
  EXPECT_EQ(PredictFromLogits(tied, TaskMode::kSingleLabel).labels(),
            std::vector<int>{1});
  Eigen::RowVectorXd multi(3);
  multi << 0.3, 0.0, -2.0;
  EXPECT_EQ(PredictFromLogits(multi, TaskMode::kMultilabel).labels(),
            std::vector<int>{0});
}

TEST(ClassifierTest, LossesMatchClosedForms) {
  Eigen::RowVectorXd z(3);
  z << 0.2, -1.0, 1.5;
  const double lse = std::log(std::exp(0.2) + std::exp(-1.0) + std::exp(1.5));
  const double ce =
      ClassificationLoss(autodiff::Constant(Matrix(z)),
                         LabelSet({1}, TaskMode::kSingleLabel))
          .scalar();
  EXPECT_NEAR(ce, lse + 1.0, 1e-14);
  auto softplus = [](double v) { return std::log1p(std::exp(v)); };
  const double bce =
      ClassificationLoss(autodiff::Constant(Matrix(z)),
                         LabelSet({0, 2}, TaskMode::kMultilabel))
          .scalar();
  const double expected =
      ((softplus(0.2) - 0.2) + softplus(-1.0) + (softplus(1.5) - 1.5)) / 3.0;
  EXPECT_NEAR(bce, expected, 1e-14);
}

TEST(ClassifierTest, NonFiniteGradientNamesThePosition) {
  const Vocabulary vocab = SmallVocab();
  const auto model =
      ReferenceClassifier::Initialize(SmallArch(vocab.size(), Pooling::kMean), 2);
  Matrix x = Matrix::Constant(3, 4, 1.0);
  x(1, 2) = -1.0;
  try {
    GradWrtEmbeddings(model.network(), x, [](const Network&, const Var& e) {
      return autodiff::SumAll(autodiff::Sqrt(e));
    });
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("position 1"), std::string::npos)
        << e.what();
  }
}

TEST(CheckpointTest, RoundTripReproducesFloat32Parameters) {
  const Vocabulary vocab = SmallVocab();
  const auto arch = SmallArch(vocab.size(), Pooling::kAttention);
  const auto model = ReferenceClassifier::Initialize(arch, 11);
  const std::string path = TempPath("attrobust_ckpt_test.ckpt");
  SaveCheckpoint(path, model, vocab, {"far", "AdvAAT"});
  const LoadedCheckpoint loaded = LoadCheckpoint(path, vocab);
  EXPECT_EQ(loaded.metadata.regime, "far");
  EXPECT_EQ(loaded.metadata.preset, "AdvAAT");
  EXPECT_EQ(loaded.model.arch(), arch);
  const ReferenceClassifier quantized = QuantizeToFloat32(model);
  const auto expected = quantized.params().Ordered(arch.pooling);
  const auto actual = loaded.model.params().Ordered(arch.pooling);
  ASSERT_EQ(expected.size(), actual.size());
  for (size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(*expected[i], *actual[i]);
  EXPECT_LT((model.params().embedding - actual[0]->operator()(Eigen::all, Eigen::all))
                .cwiseAbs()
                .maxCoeff(),
            1e-6);
}

TEST(CheckpointTest, MeanPoolRoundTrip) {
  const Vocabulary vocab = SmallVocab();
  const auto arch = SmallArch(vocab.size(), Pooling::kMean, 4, TaskMode::kMultilabel);
  const auto model = ReferenceClassifier::Initialize(arch, 12);
  const std::string path = TempPath("attrobust_ckpt_mean.ckpt");
  SaveCheckpoint(path, model, vocab, {});
  const LoadedCheckpoint loaded = LoadCheckpoint(path, vocab);
  EXPECT_EQ(loaded.model.arch(), arch);
  EXPECT_EQ(loaded.model.params().output_w, QuantizeToFloat32(model).params().output_w);
}

TEST(CheckpointTest, RejectsMismatchedVocabularyAndCorruptFiles) {
  const Vocabulary vocab = SmallVocab();
  const auto model =
      ReferenceClassifier::Initialize(SmallArch(vocab.size(), Pooling::kAttention), 1);
  const std::string path = TempPath("attrobust_ckpt_bad.ckpt");
  SaveCheckpoint(path, model, vocab, {});
  Vocabulary other = vocab;
  other.Add("extra");
  EXPECT_THROW(LoadCheckpoint(path, other), ConfigError);

  {
    std::ofstream out(TempPath("attrobust_ckpt_magic.ckpt"), std::ios::binary);
    out << "NOTACKPT0000";
  }
  EXPECT_THROW(LoadCheckpoint(TempPath("attrobust_ckpt_magic.ckpt"), vocab), ParseError);

  const auto size = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, size - 4);
  EXPECT_THROW(LoadCheckpoint(path, vocab), ParseError);
}

TEST(TrainerTest, VanillaTrainingIsDeterministicAndLowersLoss) {
  const Vocabulary vocab = SmallVocab();
  std::vector<TextSample> train;
  for (int i = 0; i < 24; ++i) {
    const bool positive = i % 2 == 0;
    train.push_back(MakeSample(std::to_string(i),
                               {"drug", positive ? "good" : "bad", "pain"}, vocab,
                               LabelSet({positive ? 0 : 1}, TaskMode::kSingleLabel)));
  }
  const TrainingData data{train, train, &vocab};
  const auto arch = SmallArch(vocab.size(), Pooling::kAttention, 2);
  TrainConfig config;
  config.epochs = 20;
  config.batch_size = 4;
  config.learning_rate = 0.2;
  config.seed = 9;
  const TrainedModel a = TrainVanilla(data, arch, config);
  const TrainedModel b = TrainVanilla(data, arch, config);
  EXPECT_EQ(a.model.params().embedding, b.model.params().embedding);
  EXPECT_LT(a.epoch_train_losses.back(), a.epoch_train_losses.front());
  EXPECT_EQ(Accuracy(a.model, train), 1.0);
  EXPECT_EQ(a.log.size(), 20u * 6u);
  EXPECT_EQ(a.metadata.regime, "vanilla");
}

TEST(TrainerTest, DivergenceIsReported) {
  const Vocabulary vocab = SmallVocab();
  std::vector<TextSample> train = {MakeSample(
      "0", {"drug", "good"}, vocab, LabelSet({0}, TaskMode::kSingleLabel))};
  const TrainingData data{train, {}, &vocab};
  TrainConfig config;
  config.epochs = 1;
  auto exploding = [](const ReferenceClassifier&, const Network& net,
                      std::span<const TextSample* const> batch, int, int,
                      TrainingLogRecord&) {
    return autodiff::Scale(BatchClassificationLoss(net, batch),
                           std::numeric_limits<double>::infinity());
  };
  EXPECT_THROW(RunTrainingLoop(data, SmallArch(vocab.size(), Pooling::kMean, 2),
                               config, exploding, {}),
               TrainingDivergedError);
}

}  // namespace
}  // namespace attrobust
