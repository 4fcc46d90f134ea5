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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "attrobust/errors.h"
#include "attrobust/metrics.h"

namespace attrobust {

using autodiff::Constant;
using autodiff::Leaf;

std::string_view ConstraintModeName(ConstraintMode mode) {
  switch (mode) {
    case ConstraintMode::kArgmaxEquality:
      return "argmax-equality";
    case ConstraintMode::kLabelSetEquality:
      return "label-set-equality";
    case ConstraintMode::kNone:
      return "none";
  }
  return "?";
}

ConstraintMode ParseConstraintMode(std::string_view name) {
  if (name == "argmax-equality") return ConstraintMode::kArgmaxEquality;
  if (name == "label-set-equality") return ConstraintMode::kLabelSetEquality;
  if (name == "none") return ConstraintMode::kNone;
  throw ConfigError("unknown constraint mode '" + std::string(name) + "'");
}

ConstraintMode DefaultConstraintFor(TaskMode mode) {
  return mode == TaskMode::kMultilabel ? ConstraintMode::kLabelSetEquality
                                       : ConstraintMode::kArgmaxEquality;
}

const std::unordered_set<std::string>& DefaultStopWords() {
  static const std::unordered_set<std::string> kWords = {
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you",
      "your", "yours", "yourself", "yourselves", "he", "him", "his",
      "himself", "she", "her", "hers", "herself", "it", "its", "itself",
      "they", "them", "their", "theirs", "themselves", "what", "which", "who",
      "whom", "this", "that", "these", "those", "am", "is", "are", "was",
      "were", "be", "been", "being", "have", "has", "had", "having", "do",
      "does", "did", "doing", "a", "an", "the", "and", "but", "if", "or",
      "because", "as", "until", "while", "of", "at", "by", "for", "with",
      "about", "against", "between", "into", "through", "during", "before",
      "after", "above", "below", "to", "from", "up", "down", "in", "out", "on",
      "off", "over", "under", "again", "further", "then", "once", "here",
      "there", "when", "where", "why", "how", "all", "any", "both", "each",
      "few", "more", "most", "other", "some", "such", "no", "nor", "not",
      "only", "own", "same", "so", "than", "too", "very", "s", "t", "can",
      "will", "just", "don", "should", "now", "d", "ll", "m", "o", "re", "ve",
      "y"};
  return kWords;
}

void AttackConfig::Validate() const {
  if (!(rho_max > 0.0 && rho_max <= 1.0)) {
    throw ConfigError("rho_max must lie in (0, 1]");
  }
  if (k < 1) throw ConfigError("k must be at least 1");
  if (distance != "cosine") {
    throw ConfigError("unsupported attribution distance '" + distance + "'");
  }
  if (!(epsilon_sigma_scale >= 0.0)) {
    throw ConfigError("epsilon_sigma_scale must be non-negative");
  }
}

int SubstitutionBudget(int length, double rho_max) {
  int n = 0;
  while (static_cast<double>(n + 1) / length <= rho_max) ++n;
  return n;
}

bool PredictionConstraint(const LabelSet& original_labels,
                          const Eigen::RowVectorXd& candidate_logits,
                          ConstraintMode mode) {
  switch (mode) {
    case ConstraintMode::kNone:
      return true;
    case ConstraintMode::kArgmaxEquality:
      return PredictFromLogits(candidate_logits, TaskMode::kSingleLabel)
                 .labels() == original_labels.labels();
    case ConstraintMode::kLabelSetEquality:
      return PredictFromLogits(candidate_logits, TaskMode::kMultilabel)
                 .labels() == original_labels.labels();
  }
  return false;
}

std::vector<int> OrderByImportance(const Eigen::VectorXd& importance) {
  std::vector<int> order(static_cast<size_t>(importance.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return importance(a) > importance(b);
  });
  return order;
}

Eigen::VectorXd LossGradientImportance(const ReferenceClassifier& model,
                                       const TextSample& sample,
                                       const LabelSet& labels) {
  Matrix grad = GradWrtEmbeddings(
      model.network(), model.Embed(sample),
      [&labels](const Network& net, const Var& x) {
        return ClassificationLoss(net.Logits(x), labels);
      });
  return grad.rowwise().norm();
}

Matrix RankingNoise(const ReferenceClassifier& model, int rows,
                    const AttackConfig& config) {
  const double mean_row_norm = model.params().embedding.rowwise().norm().mean();
  const double sigma = config.epsilon_sigma_scale * mean_row_norm;
  std::mt19937_64 rng(config.epsilon_seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  Matrix eps(rows, model.arch().embedding_dim);
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps.data()[i] = sigma * noise(rng);
  return eps;
}

ImportanceRanking RankWords(const ReferenceClassifier& model,
                            const TextSample& sample, const LabelSet& labels,
                            const AttributionConfig& attribution,
                            const AttackConfig& config) {
  if (sample.size() < 1) throw ShapeError("cannot rank an empty sample");
  ImportanceRanking ranking;
  const Matrix x = model.Embed(sample);
  const Matrix baseline =
      MakeBaseline(model, sample.size(), attribution.baseline);

  const Matrix eps = RankingNoise(model, sample.size(), config);

  try {
    const Network& net = model.network();
    Var reference = PerWordOnTape(AttributionOnTape(
        net, Leaf(x), baseline, labels, attribution, /*create_graph=*/false));
    Var perturbed = Leaf(x + eps);
    Var moved = PerWordOnTape(AttributionOnTape(
        net, perturbed, baseline, labels, attribution, /*create_graph=*/true));
    Var distance = CosineDistanceOnTape(moved, Constant(reference.value()));
    Matrix grad = autodiff::Gradient(distance, perturbed).value();
    if (!grad.allFinite()) throw NumericError("non-finite ranking gradient");
    ranking.importance = grad.rowwise().norm();
  } catch (const NumericError&) {
    ranking.fallback = true;
    ranking.importance = LossGradientImportance(model, sample, labels);
  }
  ranking.order = OrderByImportance(ranking.importance);
  return ranking;
}

AttackResult GreedySubstitutionSearch(const TextSample& sample,
                                      std::span<const int> ranking,
                                      const CandidateExtractor& extractor,
                                      const Vocabulary& vocab,
                                      const AttackConfig& config,
                                      const GreedyObjective& objective) {
  config.Validate();
  if (sample.size() < 1) throw ShapeError("cannot attack an empty sample");
  const double length = sample.size();
  AttackResult result;
  result.adversarial = sample;
  result.d_max = objective.initial;
  result.ranking.assign(ranking.begin(), ranking.end());

  auto budget_left = [&] { return (result.n + 1) / length <= config.rho_max; };
  for (int position : ranking) {
    if (!budget_left()) break;
    const std::string& word = sample.tokens[position];
    if (config.stop_words.count(word)) {
      result.trace.push_back({position, "", false, false, 0.0, "stop-word"});
      continue;
    }
    CandidateSet candidates;
    try {
      candidates = ExtractCandidates(extractor, position, sample, config.k);
    } catch (const ExtractorError& e) {
      result.skipped_positions.push_back(position);
      result.trace.push_back(
          {position, "", false, false, 0.0,
           std::string("extractor-error: ") + e.what()});
      continue;
    }
    for (const Candidate& candidate : candidates.candidates) {
      if (!budget_left()) break;
      TraceStep step{position, candidate.word, false, false, 0.0, ""};
      if (config.strict_vocabulary && !vocab.Contains(candidate.word)) {
        step.note = "oov";
        result.trace.push_back(step);
        continue;
      }
      TextSample trial =
          WithSubstitution(result.adversarial, position, candidate.word, vocab);
      step.feasible = !objective.feasible || objective.feasible(trial);
      if (!step.feasible) {
        step.note = "constraint";
        result.trace.push_back(step);
        continue;
      }
      step.value = objective.value(trial);
      if (step.value > result.d_max) {
        step.accepted = true;
        result.substitutions.push_back(
            {position, result.adversarial.tokens[position], candidate.word,
             step.value});
        result.adversarial = std::move(trial);
        result.d_max = step.value;
        ++result.n;
      }
      result.trace.push_back(step);
    }
  }
  return result;
}

namespace {

struct DareContext {
  LabelSet labels;
  AttributionMap original;
};

DareContext PrepareDare(const TextSample& sample,
                        const ReferenceClassifier& model,
                        const AttributionConfig& attribution,
                        const AttackConfig& config) {
  config.Validate();
  if (sample.size() < 1) throw ShapeError("cannot attack an empty sample");
  if (config.constraint == ConstraintMode::kArgmaxEquality &&
      model.arch().task_mode == TaskMode::kMultilabel) {
    throw ConfigError("argmax-equality constraint on a multilabel model");
  }
  DareContext ctx;
  ctx.labels = model.Predict(sample);
  if (ctx.labels.empty() && attribution.method != AttributionMethod::kAttention) {
    // Nothing predicted: attributions of an empty label set are all zero.
    ctx.original.per_word = Eigen::VectorXd::Zero(sample.size());
    ctx.original.per_embedding =
        Matrix::Zero(sample.size(), model.arch().embedding_dim);
    ctx.original.method = attribution.method;
    return ctx;
  }
  ctx.original = ComputeAttribution(model, sample, ctx.labels, attribution);
  return ctx;
}

double DistanceToOriginal(const ReferenceClassifier& model,
                          const TextSample& trial, const DareContext& ctx,
                          const AttributionConfig& attribution) {
  if (ctx.labels.empty() && attribution.method != AttributionMethod::kAttention) {
    return 0.0;
  }
  return AttributionDistance(
      ComputeAttribution(model, trial, ctx.labels, attribution).per_word,
      ctx.original.per_word);
}

}  // namespace

AttackResult DareAttack(const TextSample& sample,
                        const ReferenceClassifier& model,
                        const Vocabulary& vocab,
                        const AttributionConfig& attribution,
                        const CandidateExtractor& extractor,
                        const AttackConfig& config) {
  const DareContext ctx = PrepareDare(sample, model, attribution, config);
  ImportanceRanking ranking;
  if (ctx.labels.empty() && attribution.method != AttributionMethod::kAttention) {
    ranking.importance = Eigen::VectorXd::Zero(sample.size());
    ranking.order = OrderByImportance(ranking.importance);
  } else {
    ranking = RankWords(model, sample, ctx.labels, attribution, config);
  }

  GreedyObjective objective;
  objective.initial = 0.0;
  objective.feasible = [&](const TextSample& trial) {
    return PredictionConstraint(ctx.labels, model.Logits(trial),
                                config.constraint);
  };
  objective.value = [&](const TextSample& trial) {
    return DistanceToOriginal(model, trial, ctx, attribution);
  };
  AttackResult result = GreedySubstitutionSearch(sample, ranking.order,
                                                 extractor, vocab, config,
                                                 objective);
  result.ranking_fallback = ranking.fallback;
  result.constraint_held = PredictionConstraint(
      ctx.labels, model.Logits(result.adversarial), config.constraint);
  return result;
}

AttackResult BruteForceAttack(const TextSample& sample,
                              const ReferenceClassifier& model,
                              const Vocabulary& vocab,
                              const AttributionConfig& attribution,
                              const CandidateExtractor& extractor,
                              const AttackConfig& config) {
  if (sample.size() > 10 || config.k > 3) {
    throw ConfigError("brute-force attack limited to |s| <= 10 and k <= 3");
  }
  const DareContext ctx = PrepareDare(sample, model, attribution, config);

  struct Slot {
    int position;
    std::vector<std::string> words;
  };
  std::vector<Slot> slots;
  AttackResult result;
  result.adversarial = sample;
  for (int position = 0; position < sample.size(); ++position) {
    if (config.stop_words.count(sample.tokens[position])) continue;
    CandidateSet candidates;
    try {
      candidates = ExtractCandidates(extractor, position, sample, config.k);
    } catch (const ExtractorError&) {
      result.skipped_positions.push_back(position);
      continue;
    }
    Slot slot{position, {}};
    for (const Candidate& c : candidates.candidates) {
      if (config.strict_vocabulary && !vocab.Contains(c.word)) continue;
      slot.words.push_back(c.word);
    }
    if (!slot.words.empty()) slots.push_back(std::move(slot));
  }

  const int budget = SubstitutionBudget(sample.size(), config.rho_max);
  double best = 0.0;
  std::vector<std::pair<int, int>> best_choice;  // (slot, candidate)
  std::vector<std::pair<int, int>> choice;

  auto evaluate = [&]() {
    TextSample trial = sample;
    for (auto [slot, cand] : choice) {
      trial = WithSubstitution(trial, slots[slot].position,
                               slots[slot].words[cand], vocab);
    }
    if (!PredictionConstraint(ctx.labels, model.Logits(trial),
                              config.constraint)) {
      return;
    }
    const double d = DistanceToOriginal(model, trial, ctx, attribution);
    if (d > best) {
      best = d;
      best_choice = choice;
    }
  };
  // Every candidate assignment of one position set, odometer order.
  auto assign = [&](const std::vector<int>& set) {
    choice.clear();
    for (int s : set) choice.emplace_back(s, 0);
    while (true) {
      evaluate();
      size_t i = choice.size();
      while (i > 0) {
        --i;
        if (++choice[i].second < static_cast<int>(slots[choice[i].first].words.size())) {
          break;
        }
        choice[i].second = 0;
        if (i == 0) return;
      }
      if (choice.empty()) return;
    }
  };
  // Pre-order DFS over increasing slot indices visits position sets in
  // lexicographic order, so strict improvement keeps the smallest set.
  std::vector<int> set;
  std::function<void(int)> expand = [&](int next_slot) {
    if (static_cast<int>(set.size()) == budget) return;
    for (int s = next_slot; s < static_cast<int>(slots.size()); ++s) {
      set.push_back(s);
      assign(set);
      expand(s + 1);
      set.pop_back();
    }
  };
  expand(0);

  for (auto [slot, cand] : best_choice) {
    const int position = slots[slot].position;
    result.substitutions.push_back(
        {position, sample.tokens[position], slots[slot].words[cand], best});
    result.adversarial = WithSubstitution(result.adversarial, position,
                                          slots[slot].words[cand], vocab);
  }
  result.d_max = best;
  result.n = static_cast<int>(best_choice.size());
  result.constraint_held = PredictionConstraint(
      ctx.labels, model.Logits(result.adversarial), config.constraint);
  return result;
}

}  // namespace attrobust
