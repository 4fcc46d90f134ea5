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


#ifndef ATTROBUST_METRICS_H_
#define ATTROBUST_METRICS_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "attrobust/attribution.h"
#include "attrobust/candidates.h"
#include "attrobust/classifier.h"
#include "attrobust/dare.h"
#include "attrobust/vocabulary.h"

namespace attrobust {

// 1 - cosine similarity of two per-word vectors, in [0, 2]. Two zero vectors
// are at distance 0; exactly one zero vector gives 1.
double AttributionDistance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
double AttributionDistance(const AttributionMap& a, const AttributionMap& b);

// Cosine similarity with the same zero-vector conventions (1 and 0).
double CosineSimilarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Differentiable counterpart of AttributionDistance on column vectors.
Var CosineDistanceOnTape(const Var& a, const Var& b);

// Raw text -> fixed-length vector.
class SentenceEncoder {
 public:
  virtual ~SentenceEncoder() = default;
  virtual std::string name() const = 0;
  virtual std::string domain() const { return "general"; }
  virtual int dimension() const = 0;
  virtual Eigen::VectorXd Encode(const std::string& text) const = 0;
};

// TF-IDF-weighted mean of the classifier's embedding rows. Document
// frequencies come from `corpus`; idf(w) = ln((1 + N) / (1 + df(w))) + 1.
// Tokens outside the vocabulary use the <unk> row and the idf of an unseen
// word.
class TfidfEmbeddingEncoder : public SentenceEncoder {
 public:
  TfidfEmbeddingEncoder(const ReferenceClassifier& model,
                        const Vocabulary& vocab,
                        std::span<const TextSample> corpus);
  std::string name() const override { return "tfidf-embedding"; }
  int dimension() const override { return static_cast<int>(embedding_.cols()); }
  Eigen::VectorXd Encode(const std::string& text) const override;
  double Idf(const std::string& word) const;

 private:
  Matrix embedding_;
  const Vocabulary* vocab_;
  std::map<std::string, int> document_frequency_;
  int documents_ = 0;
};

struct RobustnessPolicy {
  double distance_floor = 1e-3;  // lower bound on d_s

  void Validate() const;
};

double SentenceSimilarity(const std::string& a, const std::string& b,
                          const SentenceEncoder& encoder);
// max(floor, 1 - cosine(encoder(a), encoder(b))).
double SentenceDistance(const std::string& a, const std::string& b,
                        const SentenceEncoder& encoder,
                        const RobustnessPolicy& policy);

// d_max / d_s at the adversary found by the attack; 0 when no substitution
// was accepted.
double RobustnessConstant(const AttackResult& result,
                          const TextSample& original,
                          const SentenceEncoder& encoder,
                          const RobustnessPolicy& policy);

struct RobustnessRow {
  std::string regime;
  std::string method;
  int fold = 0;
  std::string sample_id;
  double cosine = 0.0;      // cos(A_adv, A) = 1 - d_max
  double similarity = 0.0;  // encoder cosine of the two texts
  double r = 0.0;
  int n = 0;
  int length = 0;
};

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

MeanStd ComputeMeanStd(std::span<const double> values);

struct AggregateRow {
  std::string regime;
  std::string method;
  int count = 0;
  MeanStd cosine;
  MeanStd similarity;
  MeanStd r;
};

struct AttackRecord {
  std::string regime;
  std::string method;
  int fold = 0;
  std::string sample_id;
  AttackResult result;
  double wall_seconds = 0.0;
};

struct RobustnessReport {
  std::vector<RobustnessRow> rows;
  std::vector<AggregateRow> aggregates;
  std::vector<AttackRecord> transcripts;
  int failures = 0;
  std::vector<std::string> failure_messages;
};

// Groups rows by (regime, method) in order of first appearance.
std::vector<AggregateRow> Aggregate(std::span<const RobustnessRow> rows);

struct RobustnessRequest {
  std::string regime = "vanilla";
  int fold = 0;
  std::vector<AttributionMethod> methods;
  AttributionConfig attribution;  // method field is overridden per method
  AttackConfig attack;
  RobustnessPolicy policy;
  int threads = 1;
};

// Runs the attack for every sample and method, emitting one row each.
// Samples whose attack throws are excluded and counted in `failures`.
RobustnessReport DatasetRobustness(const ReferenceClassifier& model,
                                   const Vocabulary& vocab,
                                   std::span<const TextSample> samples,
                                   const CandidateExtractor& extractor,
                                   const SentenceEncoder& encoder,
                                   const RobustnessRequest& request);

}  // namespace attrobust

#endif  // ATTROBUST_METRICS_H_
