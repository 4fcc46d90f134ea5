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


#ifndef ATTROBUST_DARE_H_
#define ATTROBUST_DARE_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "attrobust/attribution.h"
#include "attrobust/candidates.h"
#include "attrobust/classifier.h"
#include "attrobust/text_sample.h"
#include "attrobust/vocabulary.h"

namespace attrobust {

enum class ConstraintMode { kArgmaxEquality, kLabelSetEquality, kNone };

std::string_view ConstraintModeName(ConstraintMode mode);
ConstraintMode ParseConstraintMode(std::string_view name);
// argmax-equality for single-label tasks, label-set-equality otherwise.
ConstraintMode DefaultConstraintFor(TaskMode mode);

// The fixed English stop-word list shipped with the toolkit.
const std::unordered_set<std::string>& DefaultStopWords();

struct AttackConfig {
  double rho_max = 0.05;
  int k = 5;
  std::string distance = "cosine";  // the only supported distance
  ConstraintMode constraint = ConstraintMode::kArgmaxEquality;
  std::unordered_set<std::string> stop_words = DefaultStopWords();
  // Ranking perturbation: Gaussian with sigma = epsilon_sigma_scale times the
  // mean embedding-table row norm, drawn from epsilon_seed.
  uint64_t epsilon_seed = 0;
  double epsilon_sigma_scale = 0.01;
  // Drop candidates outside the classifier vocabulary instead of mapping
  // them to <unk>.
  bool strict_vocabulary = false;

  void Validate() const;
};

struct Substitution {
  int position = 0;
  std::string old_word;
  std::string new_word;
  double value_after = 0.0;  // objective (distance for DARE) after accepting
};

struct TraceStep {
  int position = 0;
  std::string candidate;
  bool feasible = false;
  bool accepted = false;
  double value = 0.0;
  std::string note;  // "stop-word", "extractor-error: ...", "oov", ...
};

struct AttackResult {
  TextSample adversarial;
  std::vector<Substitution> substitutions;
  double d_max = 0.0;
  int n = 0;
  bool constraint_held = true;
  std::vector<int> ranking;
  bool ranking_fallback = false;
  std::vector<TraceStep> trace;
  std::vector<int> skipped_positions;  // extractor failures
};

// True iff `candidate_logits` keeps the original prediction under `mode`.
bool PredictionConstraint(const LabelSet& original_labels,
                          const Eigen::RowVectorXd& candidate_logits,
                          ConstraintMode mode);

// Word importance = L2 norm of the rows of the gradient of
// d[A(s + eps), A(s)] w.r.t. the perturbed embeddings.
struct ImportanceRanking {
  std::vector<int> order;  // non-increasing importance, ties by position
  Eigen::VectorXd importance;
  bool fallback = false;   // loss-gradient ranking was used instead
};

ImportanceRanking RankWords(const ReferenceClassifier& model,
                            const TextSample& sample, const LabelSet& labels,
                            const AttributionConfig& attribution,
                            const AttackConfig& config);

// The fixed-seed Gaussian perturbation added to the embeddings before the
// ranking gradient is taken.
Matrix RankingNoise(const ReferenceClassifier& model, int rows,
                    const AttackConfig& config);

// Orders by non-increasing score; equal scores keep the lower position first.
std::vector<int> OrderByImportance(const Eigen::VectorXd& importance);

// Row norms of the gradient of the classification loss; used when the
// attribution-distance gradient is non-finite and by training attacks.
Eigen::VectorXd LossGradientImportance(const ReferenceClassifier& model,
                                       const TextSample& sample,
                                       const LabelSet& labels);

// The greedy loop skeleton shared by DARE and the training-time attacks:
// visit ranked non-stop-words, try each candidate in s_adv, keep a
// substitution when it is feasible and strictly improves the objective, stop
// once (n + 1) / |s| would exceed rho_max.
struct GreedyObjective {
  std::function<bool(const TextSample&)> feasible;  // empty = always true
  std::function<double(const TextSample&)> value;
  double initial = 0.0;  // objective value of the unmodified sample
};

AttackResult GreedySubstitutionSearch(const TextSample& sample,
                                      std::span<const int> ranking,
                                      const CandidateExtractor& extractor,
                                      const Vocabulary& vocab,
                                      const AttackConfig& config,
                                      const GreedyObjective& objective);

// Algorithm: rank words once on the original sample, then greedily maximize
// the attribution distance to A(s) under the prediction constraint.
AttackResult DareAttack(const TextSample& sample,
                        const ReferenceClassifier& model,
                        const Vocabulary& vocab,
                        const AttributionConfig& attribution,
                        const CandidateExtractor& extractor,
                        const AttackConfig& config);

// Exhaustive search over every combination of candidate substitutions within
// the rho budget. Requires |s| <= 10 and k <= 3.
AttackResult BruteForceAttack(const TextSample& sample,
                              const ReferenceClassifier& model,
                              const Vocabulary& vocab,
                              const AttributionConfig& attribution,
                              const CandidateExtractor& extractor,
                              const AttackConfig& config);

// Largest substitution count n with n / |s| <= rho_max.
int SubstitutionBudget(int length, double rho_max);

}  // namespace attrobust

#endif  // ATTROBUST_DARE_H_
