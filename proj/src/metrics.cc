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


#include "attrobust/metrics.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <set>
#include <thread>

#include "attrobust/errors.h"

namespace attrobust {

double CosineSimilarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) {
    throw ShapeError("cosine of vectors with different lengths (" +
                     std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 && nb == 0.0) return 1.0;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

double AttributionDistance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return 1.0 - CosineSimilarity(a, b);
}

double AttributionDistance(const AttributionMap& a, const AttributionMap& b) {
  return AttributionDistance(a.per_word, b.per_word);
}

Var CosineDistanceOnTape(const Var& a, const Var& b) {
  using namespace autodiff;
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("attribution distance of maps with different lengths");
  }
  const double na = a.value().norm();
  const double nb = b.value().norm();
  if (na == 0.0 && nb == 0.0) return Constant(0.0);
  if (na == 0.0 || nb == 0.0) return Constant(1.0);
  Var denom = Sqrt(Mul(Dot(a, a), Dot(b, b)));
  return AddScalar(Neg(Mul(Dot(a, b), Reciprocal(denom))), 1.0);
}

TfidfEmbeddingEncoder::TfidfEmbeddingEncoder(const ReferenceClassifier& model,
                                             const Vocabulary& vocab,
                                             std::span<const TextSample> corpus)
    : embedding_(model.params().embedding), vocab_(&vocab) {
  if (vocab.size() != embedding_.rows()) {
    throw ConfigError("encoder vocabulary does not match the embedding table");
  }
  for (const TextSample& s : corpus) {
    std::set<std::string> unique(s.tokens.begin(), s.tokens.end());
    for (const std::string& w : unique) ++document_frequency_[w];
  }
  documents_ = static_cast<int>(corpus.size());
}

double TfidfEmbeddingEncoder::Idf(const std::string& word) const {
  auto it = document_frequency_.find(word);
  const int df = it == document_frequency_.end() ? 0 : it->second;
  return std::log((1.0 + documents_) / (1.0 + df)) + 1.0;
}

Eigen::VectorXd TfidfEmbeddingEncoder::Encode(const std::string& text) const {
  const std::vector<std::string> tokens = SplitWhitespace(text);
  if (tokens.empty()) throw ConfigError("cannot encode an empty text");
  std::map<std::string, int> term_frequency;
  for (const std::string& t : tokens) ++term_frequency[t];
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(embedding_.cols());
  double weight_sum = 0.0;
  for (const auto& [word, count] : term_frequency) {
    const double weight = static_cast<double>(count) / tokens.size() * Idf(word);
    sum += weight * embedding_.row(vocab_->Id(word)).transpose();
    weight_sum += weight;
  }
  return sum / weight_sum;
}

void RobustnessPolicy::Validate() const {
  if (!(distance_floor > 0.0)) {
    throw ConfigError("sentence distance floor must be positive");
  }
}

double SentenceSimilarity(const std::string& a, const std::string& b,
                          const SentenceEncoder& encoder) {
  if (a.empty() || b.empty()) throw ConfigError("empty text");
  return CosineSimilarity(encoder.Encode(a), encoder.Encode(b));
}

double SentenceDistance(const std::string& a, const std::string& b,
                        const SentenceEncoder& encoder,
                        const RobustnessPolicy& policy) {
  policy.Validate();
  return std::max(policy.distance_floor,
                  1.0 - SentenceSimilarity(a, b, encoder));
}

double RobustnessConstant(const AttackResult& result,
                          const TextSample& original,
                          const SentenceEncoder& encoder,
                          const RobustnessPolicy& policy) {
  if (result.n == 0 || result.d_max <= 0.0) return 0.0;
  return result.d_max / SentenceDistance(result.adversarial.Text(),
                                         original.Text(), encoder, policy);
}

MeanStd ComputeMeanStd(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / values.size();
  double sq = 0.0;
  for (double v : values) sq += (v - out.mean) * (v - out.mean);
  out.stddev = std::sqrt(sq / values.size());
  return out;
}

std::vector<AggregateRow> Aggregate(std::span<const RobustnessRow> rows) {
  std::vector<std::pair<std::string, std::string>> keys;
  for (const RobustnessRow& row : rows) {
    std::pair<std::string, std::string> key{row.regime, row.method};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      keys.push_back(key);
    }
  }
  std::vector<AggregateRow> out;
  for (const auto& [regime, method] : keys) {
    std::vector<double> cos, sim, r;
    for (const RobustnessRow& row : rows) {
      if (row.regime != regime || row.method != method) continue;
      cos.push_back(row.cosine);
      sim.push_back(row.similarity);
      r.push_back(row.r);
    }
    out.push_back({regime, method, static_cast<int>(cos.size()),
                   ComputeMeanStd(cos), ComputeMeanStd(sim),
                   ComputeMeanStd(r)});
  }
  return out;
}

RobustnessReport DatasetRobustness(const ReferenceClassifier& model,
                                   const Vocabulary& vocab,
                                   std::span<const TextSample> samples,
                                   const CandidateExtractor& extractor,
                                   const SentenceEncoder& encoder,
                                   const RobustnessRequest& request) {
  if (samples.empty()) throw ConfigError("robustness of an empty dataset");
  if (request.methods.empty()) throw ConfigError("no attribution methods");
  request.policy.Validate();
  request.attack.Validate();

  struct Job {
    size_t sample;
    AttributionMethod method;
  };
  std::vector<Job> jobs;
  for (AttributionMethod m : request.methods) {
    for (size_t i = 0; i < samples.size(); ++i) jobs.push_back({i, m});
  }
  struct Outcome {
    bool ok = false;
    std::string error;
    RobustnessRow row;
    AttackRecord record;
  };
  std::vector<Outcome> outcomes(jobs.size());

  auto run = [&](size_t j) {
    const TextSample& sample = samples[jobs[j].sample];
    AttributionConfig attribution = request.attribution;
    attribution.method = jobs[j].method;
    Outcome& out = outcomes[j];
    try {
      const auto start = std::chrono::steady_clock::now();
      AttackResult result = DareAttack(sample, model, vocab, attribution,
                                       extractor, request.attack);
      const double seconds = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
      out.row.regime = request.regime;
      out.row.method = std::string(MethodTag(jobs[j].method));
      out.row.fold = request.fold;
      out.row.sample_id = sample.id;
      out.row.cosine = 1.0 - result.d_max;
      out.row.similarity =
          SentenceSimilarity(result.adversarial.Text(), sample.Text(), encoder);
      out.row.r = RobustnessConstant(result, sample, encoder, request.policy);
      out.row.n = result.n;
      out.row.length = sample.size();
      out.record = AttackRecord{request.regime, out.row.method, request.fold,
                                sample.id, std::move(result), seconds};
      out.ok = true;
    } catch (const std::exception& e) {
      out.error = sample.id + " [" + std::string(MethodTag(jobs[j].method)) +
                  "]: " + e.what();
    }
  };

  const int threads = std::max(1, request.threads);
  if (threads == 1) {
    for (size_t j = 0; j < jobs.size(); ++j) run(j);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (size_t j = next++; j < jobs.size(); j = next++) run(j);
      });
    }
    for (std::thread& t : pool) t.join();
  }

  RobustnessReport report;
  for (Outcome& out : outcomes) {
    if (!out.ok) {
      ++report.failures;
      report.failure_messages.push_back(std::move(out.error));
      continue;
    }
    report.rows.push_back(std::move(out.row));
    report.transcripts.push_back(std::move(out.record));
  }
  report.aggregates = Aggregate(report.rows);
  return report;
}

}  // namespace attrobust
