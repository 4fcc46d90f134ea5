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


#ifndef ATTROBUST_ATTRIBUTION_H_
#define ATTROBUST_ATTRIBUTION_H_

#include <string_view>

#include "attrobust/classifier.h"
#include "attrobust/text_sample.h"

namespace attrobust {

enum class AttributionMethod {
  kSaliency,
  kDeepLift,
  kIntegratedGradients,
  kAttention,
};

// "S", "DL", "IG", "A".
std::string_view MethodTag(AttributionMethod method);
AttributionMethod ParseMethod(std::string_view tag);

enum class BaselineKind { kZero, kPad };

struct AttributionConfig {
  AttributionMethod method = AttributionMethod::kIntegratedGradients;
  int ig_steps = 50;
  BaselineKind baseline = BaselineKind::kZero;

  bool operator==(const AttributionConfig&) const = default;
};

// Per-word and raw per-embedding scores. per_word(i) is the row sum of
// per_embedding.row(i).
struct AttributionMap {
  Eigen::VectorXd per_word;
  Matrix per_embedding;
  AttributionMethod method = AttributionMethod::kSaliency;
  LabelSet labels;
};

// Reference input for IG and DeepLIFT: all zeros, or the <pad> row repeated.
Matrix MakeBaseline(const ReferenceClassifier& model, int length,
                    BaselineKind kind);
Matrix MakeBaseline(const Network& network, int length, BaselineKind kind);

// Per-embedding attribution of `embeddings` as a tape expression. With
// `create_graph`, the result stays differentiable w.r.t. the embeddings and
// any trainable parameters of `network`. Label sets with several labels
// yield the sum of the single-label maps.
Var AttributionOnTape(const Network& network, const Var& embeddings,
                      const Matrix& baseline, const LabelSet& labels,
                      const AttributionConfig& config, bool create_graph);

// Row sums of a per-embedding tape expression (n x 1).
Var PerWordOnTape(const Var& per_embedding);

// |d(sum of selected logits)/de|, elementwise.
AttributionMap Saliency(const ReferenceClassifier& model,
                        const TextSample& sample, const LabelSet& labels);

// Riemann right-sum IG along the straight path from the baseline.
AttributionMap IntegratedGradients(const ReferenceClassifier& model,
                                   const TextSample& sample,
                                   const LabelSet& labels,
                                   const AttributionConfig& config);

// Linear rule on affine maps, Rescale rule on the ReLU. For attention pooling
// the attention weights of the actual input are held constant.
AttributionMap DeepLiftRescale(const ReferenceClassifier& model,
                               const TextSample& sample,
                               const LabelSet& labels, BaselineKind baseline);

// Pooling attention weight per word; rejects mean-pool models.
AttributionMap AttentionAttribution(const ReferenceClassifier& model,
                                    const TextSample& sample);

// Elementwise sum of the single-label maps of `labels`.
AttributionMap MultilabelAttribution(const ReferenceClassifier& model,
                                     const TextSample& sample,
                                     const LabelSet& labels,
                                     const AttributionConfig& config);

// Dispatches on config.method; label sets are summed as in
// MultilabelAttribution.
AttributionMap ComputeAttribution(const ReferenceClassifier& model,
                                  const TextSample& sample,
                                  const LabelSet& labels,
                                  const AttributionConfig& config);

// Same as above for an explicit embedding matrix.
AttributionMap ComputeAttribution(const ReferenceClassifier& model,
                                  const Matrix& embeddings,
                                  const LabelSet& labels,
                                  const AttributionConfig& config);

}  // namespace attrobust

#endif  // ATTROBUST_ATTRIBUTION_H_
