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


#include "attrobust/dare.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "attrobust/errors.h"
#include "attrobust/metrics.h"
#include "test_util.h"

namespace attrobust {
namespace {

using testing::RandomSample;
using testing::SmallArch;
using testing::SmallSynonyms;
using testing::SmallVocab;

constexpr AttributionConfig kIg{AttributionMethod::kIntegratedGradients, 8,
                                BaselineKind::kZero};

// Plain cosine distance, written out independently of the library.
double Cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return 1.0 - a.dot(b) / (a.norm() * b.norm());
}

class FailingAt : public CandidateExtractor {
 public:
  FailingAt(const CandidateExtractor& inner, int position)
      : inner_(inner), position_(position) {}
  std::string name() const override { return "failing"; }
  std::vector<Candidate> Propose(std::span<const std::string> tokens,
                                 int position, int k) const override {
    if (position == position_) throw ExtractorError("unavailable");
    return inner_.Propose(tokens, position, k);
  }

 private:
  const CandidateExtractor& inner_;
  int position_;
};

TEST(BudgetTest, FollowsTheRatioFormula) {
  EXPECT_EQ(SubstitutionBudget(40, 0.05), 2);
  EXPECT_EQ(SubstitutionBudget(8, 0.05), 0);
  EXPECT_EQ(SubstitutionBudget(10, 0.25), 2);
  EXPECT_EQ(SubstitutionBudget(4, 1.0), 4);
  EXPECT_EQ(SubstitutionBudget(3, 0.34), 1);
}

TEST(BudgetTest, GreedyLoopStopsAtTheBudget) {
  const Vocabulary vocab = SmallVocab();
  std::vector<std::string> tokens(40, "pain");
  const TextSample sample =
      MakeSample("s", tokens, vocab, LabelSet({0}, TaskMode::kSingleLabel));
  AttackConfig config;
  config.rho_max = 0.05;
  config.k = 3;
  GreedyObjective objective;
  // Every trial improves, so only the budget can stop the loop.
  int calls = 0;
  objective.value = [&](const TextSample&) { return ++calls; };
  std::vector<int> ranking(40);
  for (int i = 0; i < 40; ++i) ranking[i] = i;
  const AttackResult r = GreedySubstitutionSearch(
      sample, ranking, SmallSynonyms(), vocab, config, objective);
  EXPECT_EQ(r.n, 2);
  EXPECT_EQ(calls, 2);
}

TEST(PredictionConstraintTest, Modes) {
  const LabelSet single({1}, TaskMode::kSingleLabel);
  Eigen::RowVectorXd logits(3);
  logits << 0.1, 0.5, 0.2;
  EXPECT_TRUE(PredictionConstraint(single, logits,
                                   ConstraintMode::kArgmaxEquality));
  logits << 0.6, 0.5, 0.2;
  EXPECT_FALSE(PredictionConstraint(single, logits,
                                    ConstraintMode::kArgmaxEquality));
  EXPECT_TRUE(PredictionConstraint(single, logits, ConstraintMode::kNone));

  const LabelSet multi({1, 3}, TaskMode::kMultilabel);
  Eigen::RowVectorXd four(4);
  four << -1.0, 2.0, -0.5, -0.1;  // predicts {1}
  EXPECT_FALSE(PredictionConstraint(multi, four,
                                    ConstraintMode::kLabelSetEquality));
  four(3) = 0.3;
  EXPECT_TRUE(PredictionConstraint(multi, four,
                                   ConstraintMode::kLabelSetEquality));
}

TEST(RankingTest, TiesKeepLowerPositionFirst) {
  Eigen::VectorXd importance(5);
  importance << 0.5, 2.0, 0.5, 2.0, 1.0;
  EXPECT_EQ(OrderByImportance(importance), (std::vector<int>{1, 3, 4, 0, 2}));
}

TEST(RankingTest, SingleWord) {
  const Vocabulary vocab = SmallVocab();
  const auto model =
      ReferenceClassifier::Initialize(SmallArch(vocab.size(), Pooling::kAttention), 3);
  const TextSample s =
      MakeSample("s", {"pain"}, vocab, LabelSet({0}, TaskMode::kSingleLabel));
  AttackConfig config;
  EXPECT_EQ(RankWords(model, s, model.Predict(s), kIg, config).order,
            (std::vector<int>{0}));
}

TEST(RankingTest, MatchesFiniteDifferenceRowNorms) {
  const Vocabulary vocab = SmallVocab();
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const auto model = ReferenceClassifier::Initialize(
        SmallArch(vocab.size(), Pooling::kAttention), 100 + trial);
    const TextSample s = RandomSample(rng, vocab, 5, 3);
    const LabelSet labels = model.Predict(s);
    AttackConfig config;
    config.epsilon_seed = 5 + trial;
    const Matrix x = model.Embed(s);
    const Matrix eps = RankingNoise(model, s.size(), config);
    const Eigen::VectorXd reference =
        ComputeAttribution(model, x, labels, kIg).per_word;
    auto distance = [&](const Matrix& e) {
      return Cosine(ComputeAttribution(model, e, labels, kIg).per_word,
                    reference);
    };
    Eigen::VectorXd norms(s.size());
    const double h = 1e-6;
    for (int i = 0; i < s.size(); ++i) {
      double sq = 0.0;
      for (int j = 0; j < x.cols(); ++j) {
        Matrix up = x + eps, down = x + eps;
        up(i, j) += h;
        down(i, j) -= h;
        const double g = (distance(up) - distance(down)) / (2 * h);
        sq += g * g;
      }
      norms(i) = std::sqrt(sq);
    }
    const ImportanceRanking ranking =
        RankWords(model, s, labels, kIg, config);
    ASSERT_FALSE(ranking.fallback);
    for (int i = 0; i < s.size(); ++i) {
      EXPECT_NEAR(ranking.importance(i), norms(i),
                  1e-4 * std::max(1.0, norms(i)))
          << "trial " << trial << " word " << i;
    }
    EXPECT_EQ(ranking.order, OrderByImportance(norms)) << "trial " << trial;
  }
}

TEST(RankingTest, NoiseIsSeededAndScaled) {
  const Vocabulary vocab = SmallVocab();
  const auto model = ReferenceClassifier::Initialize(
      SmallArch(vocab.size(), Pooling::kAttention), 4);
  AttackConfig config;
  config.epsilon_seed = 9;
  EXPECT_EQ(RankingNoise(model, 3, config), RankingNoise(model, 3, config));
  config.epsilon_sigma_scale = 0.0;
  EXPECT_TRUE(RankingNoise(model, 3, config).isZero());
}

struct Instance {
  ReferenceClassifier model;
  TextSample sample;
};

Instance MakeInstance(uint64_t seed, int length, Pooling pooling) {
  const Vocabulary vocab = SmallVocab();
  std::mt19937_64 rng(seed);
  auto model = ReferenceClassifier::Initialize(
      SmallArch(vocab.size(), pooling), seed);
  return {std::move(model), RandomSample(rng, vocab, length, 3)};
}

TEST(DareTest, PropertiesHoldOnRandomInstances) {
  const Vocabulary vocab = SmallVocab();
  const SynonymTable synonyms = SmallSynonyms();
  for (uint64_t seed = 0; seed < 30; ++seed) {
    const Instance inst = MakeInstance(seed, 4 + seed % 5,
                                       seed % 2 ? Pooling::kMean
                                                : Pooling::kAttention);
    AttackConfig config;
    config.rho_max = 0.5;
    config.k = 3;
    const AttackResult r =
        DareAttack(inst.sample, inst.model, vocab, kIg, synonyms, config);
    const int length = inst.sample.size();
    const LabelSet original = inst.model.Predict(inst.sample);

    // Budget at every accepted state and at the end.
    EXPECT_EQ(r.n, static_cast<int>(r.substitutions.size()));
    EXPECT_LE(static_cast<double>(r.n) / length, config.rho_max);
    // Strictly increasing accepted values, starting above 0.
    double previous = 0.0;
    for (const Substitution& sub : r.substitutions) {
      EXPECT_GT(sub.value_after, previous);
      previous = sub.value_after;
      EXPECT_EQ(config.stop_words.count(sub.old_word), 0u);
    }
    // Constraint checked by re-evaluating the model.
    EXPECT_EQ(inst.model.Predict(r.adversarial), original) << "seed " << seed;
    EXPECT_TRUE(r.constraint_held);
    // d_max recomputed from the final sample.
    const double recomputed =
        r.n == 0 ? 0.0
                 : Cosine(ComputeAttribution(inst.model, r.adversarial,
                                             original, kIg).per_word,
                          ComputeAttribution(inst.model, inst.sample, original,
                                             kIg).per_word);
    EXPECT_NEAR(r.d_max, recomputed, 1e-9) << "seed " << seed;
    // Stop words are never touched.
    for (int i = 0; i < length; ++i) {
      if (config.stop_words.count(inst.sample.tokens[i])) {
        EXPECT_EQ(r.adversarial.tokens[i], inst.sample.tokens[i]);
      }
    }
  }
}

TEST(DareTest, InfeasibleCandidatesLeaveSampleUnchanged) {
  const Vocabulary vocab = SmallVocab();
  const TextSample s = MakeSample("s", {"pain", "good", "drug"}, vocab,
                                  LabelSet({0}, TaskMode::kSingleLabel));
  GreedyObjective objective;
  objective.feasible = [](const TextSample&) { return false; };
  objective.value = [](const TextSample&) { return 1.0; };
  AttackConfig config;
  config.rho_max = 1.0;
  const std::vector<int> ranking = {0, 1, 2};
  const AttackResult r = GreedySubstitutionSearch(s, ranking, SmallSynonyms(),
                                                  vocab, config, objective);
  EXPECT_EQ(r.n, 0);
  EXPECT_EQ(r.d_max, 0.0);
  EXPECT_EQ(r.adversarial.tokens, s.tokens);
  EXPECT_FALSE(r.trace.empty());
}

TEST(DareTest, CandidatesCompoundWithinAPosition) {
  const Vocabulary vocab = SmallVocab();
  const TextSample s = MakeSample("s", {"pain", "good"}, vocab,
                                  LabelSet({0}, TaskMode::kSingleLabel));
  GreedyObjective objective;
  // Scores: severe 1, mild 3, bad 2 at position 0; nothing else improves.
  objective.value = [](const TextSample& t) {
    if (t.tokens[0] == "severe") return 1.0;
    if (t.tokens[0] == "mild") return 3.0;
    if (t.tokens[0] == "bad") return 2.0;
    return 0.0;
  };
  AttackConfig config;
  config.rho_max = 1.0;
  const std::vector<int> ranking = {0, 1};
  const AttackResult r = GreedySubstitutionSearch(s, ranking, SmallSynonyms(),
                                                  vocab, config, objective);
  ASSERT_EQ(r.substitutions.size(), 2u);
  EXPECT_EQ(r.substitutions[0].new_word, "severe");
  EXPECT_EQ(r.substitutions[1].old_word, "severe");
  EXPECT_EQ(r.substitutions[1].new_word, "mild");
  EXPECT_EQ(r.adversarial.tokens[0], "mild");
  EXPECT_EQ(r.d_max, 3.0);
}

TEST(DareTest, ExtractorFailureSkipsPosition) {
  const Vocabulary vocab = SmallVocab();
  const SynonymTable synonyms = SmallSynonyms();
  const FailingAt extractor(synonyms, 1);
  const Instance inst = MakeInstance(3, 4, Pooling::kAttention);
  AttackConfig config;
  config.rho_max = 1.0;
  const AttackResult r =
      DareAttack(inst.sample, inst.model, vocab, kIg, extractor, config);
  EXPECT_EQ(r.skipped_positions, (std::vector<int>{1}));
  EXPECT_EQ(r.adversarial.tokens[1], inst.sample.tokens[1]);
}

TEST(DareTest, RejectsBadInput) {
  const Vocabulary vocab = SmallVocab();
  const auto model = ReferenceClassifier::Initialize(
      SmallArch(vocab.size(), Pooling::kAttention), 1);
  const TextSample empty =
      MakeSample("e", {}, vocab, LabelSet({0}, TaskMode::kSingleLabel));
  AttackConfig config;
  EXPECT_THROW(DareAttack(empty, model, vocab, kIg, SmallSynonyms(), config),
               ShapeError);
  config.rho_max = 0.0;
  const TextSample s =
      MakeSample("s", {"pain"}, vocab, LabelSet({0}, TaskMode::kSingleLabel));
  EXPECT_THROW(DareAttack(s, model, vocab, kIg, SmallSynonyms(), config),
               ConfigError);

  const auto multi = ReferenceClassifier::Initialize(
      SmallArch(vocab.size(), Pooling::kAttention, 3, TaskMode::kMultilabel), 1);
  AttackConfig argmax;
  argmax.constraint = ConstraintMode::kArgmaxEquality;
  EXPECT_THROW(DareAttack(s, multi, vocab, kIg, SmallSynonyms(), argmax),
               ConfigError);
}

// Every lattice point: each non-stop position keeps its word or takes one of
// its candidates; at most `budget` positions change.
struct Enumerated {
  double best = 0.0;
  std::vector<std::string> tokens;
  int points = 0;
};

Enumerated Enumerate(const ReferenceClassifier& model, const TextSample& s,
                     const Vocabulary& vocab,
                     const CandidateExtractor& extractor,
                     const AttackConfig& config) {
  const LabelSet labels = model.Predict(s);
  const Eigen::VectorXd reference =
      ComputeAttribution(model, s, labels, kIg).per_word;
  std::vector<std::vector<std::string>> options;
  for (int i = 0; i < s.size(); ++i) {
    options.push_back({s.tokens[i]});
    if (config.stop_words.count(s.tokens[i])) continue;
    for (const Candidate& c :
         ExtractCandidates(extractor, i, s, config.k).candidates) {
      options.back().push_back(c.word);
    }
  }
  const int budget = SubstitutionBudget(s.size(), config.rho_max);
  Enumerated out;
  out.tokens = s.tokens;
  std::vector<int> digit(s.size(), 0);
  while (true) {
    int changed = 0;
    std::vector<std::string> tokens;
    for (int i = 0; i < s.size(); ++i) {
      tokens.push_back(options[i][digit[i]]);
      changed += digit[i] != 0;
    }
    if (changed <= budget) {
      ++out.points;
      const TextSample t = MakeSample("t", tokens, vocab, labels);
      if (PredictionConstraint(labels, model.Logits(t), config.constraint)) {
        const double d = changed == 0
                             ? 0.0
                             : Cosine(ComputeAttribution(model, t, labels, kIg)
                                          .per_word,
                                      reference);
        if (d > out.best) {
          out.best = d;
          out.tokens = tokens;
        }
      }
    }
    int i = 0;
    while (i < s.size() && ++digit[i] == static_cast<int>(options[i].size())) {
      digit[i++] = 0;
    }
    if (i == s.size()) break;
  }
  return out;
}

TEST(BruteForceTest, MatchesIndependentEnumerationOnFourWords) {
  const Vocabulary vocab = SmallVocab();
  const SynonymTable synonyms = SmallSynonyms();
  const std::vector<std::vector<std::string>> sentences = {
      {"pain", "good", "drug", "works"},
      {"bad", "pain", "severe", "great"},
      {"the", "mild", "pain", "and"}};
  int trial = 0;
  for (const auto& words : sentences) {
    for (ConstraintMode mode :
         {ConstraintMode::kNone, ConstraintMode::kArgmaxEquality}) {
      const auto model = ReferenceClassifier::Initialize(
          SmallArch(vocab.size(), Pooling::kAttention), 40 + trial++);
      const TextSample s = MakeSample("s", words, vocab,
                                      LabelSet({0}, TaskMode::kSingleLabel));
      AttackConfig config;
      config.rho_max = 0.5;
      config.k = 2;
      config.constraint = mode;
      const Enumerated oracle = Enumerate(model, s, vocab, synonyms, config);
      const AttackResult r =
          BruteForceAttack(s, model, vocab, kIg, synonyms, config);
      EXPECT_NEAR(r.d_max, oracle.best, 1e-12) << "trial " << trial;
      EXPECT_EQ(r.adversarial.tokens, oracle.tokens) << "trial " << trial;
      EXPECT_GT(oracle.points, 1);
    }
  }
}

TEST(BruteForceTest, SinglePositionPicksTheBetterCandidate) {
  const Vocabulary vocab = SmallVocab();
  SynonymTable table;
  table.Set("pain", {"mild", "severe"});
  const auto model = ReferenceClassifier::Initialize(
      SmallArch(vocab.size(), Pooling::kAttention), 8);
  const TextSample s = MakeSample("s", {"pain", "the", "and"}, vocab,
                                  LabelSet({0}, TaskMode::kSingleLabel));
  AttackConfig config;
  config.rho_max = 1.0;
  config.k = 2;
  config.constraint = ConstraintMode::kNone;
  const LabelSet labels = model.Predict(s);
  const Eigen::VectorXd a = ComputeAttribution(model, s, labels, kIg).per_word;
  auto d = [&](const std::string& w) {
    return Cosine(ComputeAttribution(model,
                                     WithSubstitution(s, 0, w, vocab), labels,
                                     kIg).per_word,
                  a);
  };
  const double mild = d("mild"), severe = d("severe");
  const AttackResult r = BruteForceAttack(s, model, vocab, kIg, table, config);
  EXPECT_EQ(r.adversarial.tokens[0], mild > severe ? "mild" : "severe");
  EXPECT_NEAR(r.d_max, std::max(mild, severe), 1e-12);
}

TEST(BruteForceTest, NoCandidatesGivesIdentity) {
  const Vocabulary vocab = SmallVocab();
  const auto model = ReferenceClassifier::Initialize(
      SmallArch(vocab.size(), Pooling::kAttention), 8);
  const TextSample s = MakeSample("s", {"fails", "poor", "the"}, vocab,
                                  LabelSet({0}, TaskMode::kSingleLabel));
  AttackConfig config;
  config.rho_max = 1.0;
  config.k = 3;
  const AttackResult r =
      BruteForceAttack(s, model, vocab, kIg, SmallSynonyms(), config);
  EXPECT_EQ(r.n, 0);
  EXPECT_EQ(r.d_max, 0.0);
  EXPECT_EQ(r.adversarial.tokens, s.tokens);
}

TEST(BruteForceTest, GuardsLatticeSize) {
  const Vocabulary vocab = SmallVocab();
  const auto model = ReferenceClassifier::Initialize(
      SmallArch(vocab.size(), Pooling::kAttention), 8);
  const TextSample long_sample =
      MakeSample("s", std::vector<std::string>(11, "pain"), vocab,
                 LabelSet({0}, TaskMode::kSingleLabel));
  AttackConfig config;
  config.k = 3;
  EXPECT_THROW(BruteForceAttack(long_sample, model, vocab, kIg,
                                SmallSynonyms(), config),
               ConfigError);
  config.k = 4;
  const TextSample s =
      MakeSample("s", {"pain"}, vocab, LabelSet({0}, TaskMode::kSingleLabel));
  EXPECT_THROW(BruteForceAttack(s, model, vocab, kIg, SmallSynonyms(), config),
               ConfigError);
}

TEST(BruteForceTest, DominatesGreedy) {
  const Vocabulary vocab = SmallVocab();
  const SynonymTable synonyms = SmallSynonyms();
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const Instance inst = MakeInstance(200 + seed, 6, Pooling::kAttention);
    AttackConfig config;
    config.rho_max = 0.5;
    config.k = 2;
    const AttackResult greedy =
        DareAttack(inst.sample, inst.model, vocab, kIg, synonyms, config);
    const AttackResult brute =
        BruteForceAttack(inst.sample, inst.model, vocab, kIg, synonyms, config);
    EXPECT_LE(greedy.d_max, brute.d_max + 1e-12) << "seed " << seed;
    EXPECT_TRUE(brute.constraint_held);
  }
}

}  // namespace
}  // namespace attrobust
