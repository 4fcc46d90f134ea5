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


#ifndef ATTROBUST_CLASSIFIER_H_
#define ATTROBUST_CLASSIFIER_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "attrobust/autodiff.h"
#include "attrobust/text_sample.h"

namespace attrobust {

using autodiff::Matrix;
using autodiff::Var;

enum class Pooling { kMean, kAttention };

std::string_view PoolingName(Pooling pooling);
Pooling ParsePooling(std::string_view name);

struct ArchitectureConfig {
  int vocab_size = 0;
  int embedding_dim = 16;
  int hidden_dim = 32;
  int attention_dim = 16;
  int num_classes = 2;
  Pooling pooling = Pooling::kAttention;
  TaskMode task_mode = TaskMode::kSingleLabel;

  bool operator==(const ArchitectureConfig&) const = default;
};

// Raw parameter storage. Row-vector biases; attention tensors are empty for
// the mean-pooling variant.
struct ModelParameters {
  Matrix embedding;    // vocab x h
  Matrix attention_w;  // h x a
  Matrix attention_b;  // 1 x a
  Matrix attention_v;  // a x 1
  Matrix hidden_w;     // h x hidden
  Matrix hidden_b;     // 1 x hidden
  Matrix output_w;     // hidden x classes
  Matrix output_b;     // 1 x classes

  // Declared order, shared by the checkpoint format and the optimizer. The
  // attention tensors are skipped for mean pooling.
  std::vector<Matrix*> Ordered(Pooling pooling);
  std::vector<const Matrix*> Ordered(Pooling pooling) const;
};

struct ParameterVars {
  Var embedding, attention_w, attention_b, attention_v;
  Var hidden_w, hidden_b, output_w, output_b;

  std::vector<Var> Ordered(Pooling pooling) const;
};

// The classifier f composed with the embedding lookup E, expressed on the
// autodiff tape. Cheap to copy.
class Network {
 public:
  Network(ArchitectureConfig arch, ParameterVars vars)
      : arch_(arch), vars_(std::move(vars)) {}

  const ArchitectureConfig& arch() const { return arch_; }
  const ParameterVars& vars() const { return vars_; }

  Var Embed(std::span<const int> ids) const;
  // Attention distribution over positions (n x 1). Requires attention pooling.
  Var AttentionWeights(const Var& embeddings) const;
  // Pooled representation (1 x h). With `fixed_attention`, the given
  // weights are used in place of the ones computed from `embeddings`.
  Var Pool(const Var& embeddings, const Var* fixed_attention = nullptr) const;
  Var HiddenPreActivation(const Var& pooled) const;  // 1 x hidden
  Var OutputFromHidden(const Var& activation) const;  // 1 x classes
  Var Logits(const Var& embeddings) const;

 private:
  ArchitectureConfig arch_;
  ParameterVars vars_;
};

class ReferenceClassifier {
 public:
  ReferenceClassifier(ArchitectureConfig arch, ModelParameters params);

  // Deterministic initialization from `seed`.
  static ReferenceClassifier Initialize(const ArchitectureConfig& arch,
                                        uint64_t seed);

  const ArchitectureConfig& arch() const { return arch_; }
  const ModelParameters& params() const { return params_; }
  // Frozen view: parameters are tape constants.
  const Network& network() const { return network_; }
  // Fresh view whose parameters are differentiable leaves.
  Network TrainableNetwork() const;

  // Row i of the result is the embedding row of word i of the sample.
  Matrix Embed(const TextSample& sample) const;
  Matrix Embed(std::span<const int> ids) const;
  Eigen::RowVectorXd Forward(const Matrix& embeddings) const;
  Eigen::RowVectorXd Logits(const TextSample& sample) const;
  LabelSet Predict(const TextSample& sample) const;

 private:
  ArchitectureConfig arch_;
  ModelParameters params_;
  Network network_;
};

// Single-label: argmax, ties toward the lower index. Multilabel: every class
// whose sigmoid exceeds 0.5, i.e. logit > 0.
LabelSet PredictFromLogits(const Eigen::RowVectorXd& logits, TaskMode mode);

// Scalar whose gradient is wanted, built on the given network/embeddings.
using EmbeddingObjective =
    std::function<Var(const Network& network, const Var& embeddings)>;

// Gradient of `objective` w.r.t. the embedding matrix. Throws NumericError
// naming the first position holding a non-finite entry.
Matrix GradWrtEmbeddings(const Network& network, const Matrix& embeddings,
                         const EmbeddingObjective& objective);

// Sum of the logits of `labels`: the scalar every attribution explains.
Var TargetLogitSum(const Var& logits, const LabelSet& labels);

// Cross entropy (single-label) or mean binary cross entropy over classes
// (multilabel), on logits.
Var ClassificationLoss(const Var& logits, const LabelSet& labels);

}  // namespace attrobust

#endif  // ATTROBUST_CLASSIFIER_H_
