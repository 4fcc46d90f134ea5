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

#include <cmath>
#include <random>
#include <string>

#include "attrobust/errors.h"

namespace attrobust {

using autodiff::Add;
using autodiff::AddRowBroadcast;
using autodiff::BroadcastCols;
using autodiff::Constant;
using autodiff::Leaf;
using autodiff::MatMul;
using autodiff::Mul;
using autodiff::Relu;
using autodiff::Scale;
using autodiff::SoftmaxColumn;
using autodiff::SumRows;
using autodiff::Tanh;

std::string_view PoolingName(Pooling pooling) {
  return pooling == Pooling::kMean ? "mean" : "attention";
}

Pooling ParsePooling(std::string_view name) {
  if (name == "mean") return Pooling::kMean;
  if (name == "attention") return Pooling::kAttention;
  throw ConfigError("unknown pooling '" + std::string(name) + "'");
}

std::vector<Matrix*> ModelParameters::Ordered(Pooling pooling) {
  std::vector<Matrix*> out{&embedding};
  if (pooling == Pooling::kAttention) {
    out.insert(out.end(), {&attention_w, &attention_b, &attention_v});
  }
  out.insert(out.end(), {&hidden_w, &hidden_b, &output_w, &output_b});
  return out;
}

std::vector<const Matrix*> ModelParameters::Ordered(Pooling pooling) const {
  std::vector<const Matrix*> out;
  for (Matrix* m : const_cast<ModelParameters*>(this)->Ordered(pooling)) {
    out.push_back(m);
  }
  return out;
}

std::vector<Var> ParameterVars::Ordered(Pooling pooling) const {
  std::vector<Var> out{embedding};
  if (pooling == Pooling::kAttention) {
    out.insert(out.end(), {attention_w, attention_b, attention_v});
  }
  out.insert(out.end(), {hidden_w, hidden_b, output_w, output_b});
  return out;
}

Var Network::Embed(std::span<const int> ids) const {
  if (ids.empty()) throw ShapeError("cannot embed an empty sample");
  try {
    return autodiff::GatherRows(vars_.embedding, ids);
  } catch (const std::out_of_range& e) {
    throw LookupError(e.what());
  }
}

Var Network::AttentionWeights(const Var& embeddings) const {
  if (arch_.pooling != Pooling::kAttention) {
    throw ConfigError("attention weights requested from a mean-pool model");
  }
  Var projected =
      Tanh(AddRowBroadcast(MatMul(embeddings, vars_.attention_w),
                           vars_.attention_b));
  return SoftmaxColumn(MatMul(projected, vars_.attention_v));
}

Var Network::Pool(const Var& embeddings, const Var* fixed_attention) const {
  if (embeddings.cols() != arch_.embedding_dim) {
    throw ShapeError("embedding width " + std::to_string(embeddings.cols()) +
                     " does not match model width " +
                     std::to_string(arch_.embedding_dim));
  }
  if (embeddings.rows() == 0) throw ShapeError("empty embedding matrix");
  if (arch_.pooling == Pooling::kMean && fixed_attention == nullptr) {
    return Scale(SumRows(embeddings), 1.0 / embeddings.rows());
  }
  Var weights = fixed_attention ? *fixed_attention : AttentionWeights(embeddings);
  if (weights.rows() != embeddings.rows()) {
    throw ShapeError("attention weights do not match sequence length");
  }
  return SumRows(Mul(embeddings, BroadcastCols(weights, embeddings.cols())));
}

Var Network::HiddenPreActivation(const Var& pooled) const {
  return AddRowBroadcast(MatMul(pooled, vars_.hidden_w), vars_.hidden_b);
}

Var Network::OutputFromHidden(const Var& activation) const {
  return AddRowBroadcast(MatMul(activation, vars_.output_w), vars_.output_b);
}

Var Network::Logits(const Var& embeddings) const {
  return OutputFromHidden(Relu(HiddenPreActivation(Pool(embeddings))));
}

namespace {

ParameterVars WrapParameters(const ModelParameters& p, bool trainable) {
  auto wrap = [trainable](const Matrix& m) {
    return trainable ? Leaf(m) : Constant(m);
  };
  ParameterVars v;
  v.embedding = wrap(p.embedding);
  v.attention_w = wrap(p.attention_w);
  v.attention_b = wrap(p.attention_b);
  v.attention_v = wrap(p.attention_v);
  v.hidden_w = wrap(p.hidden_w);
  v.hidden_b = wrap(p.hidden_b);
  v.output_w = wrap(p.output_w);
  v.output_b = wrap(p.output_b);
  return v;
}

void CheckShape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ShapeError(std::string("parameter ") + name + " has shape " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                     ", expected " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
}

}  // namespace

ReferenceClassifier::ReferenceClassifier(ArchitectureConfig arch,
                                         ModelParameters params)
    : arch_(arch),
      params_(std::move(params)),
      network_(arch_, WrapParameters(params_, /*trainable=*/false)) {
  const int h = arch_.embedding_dim;
  CheckShape(params_.embedding, arch_.vocab_size, h, "embedding");
  if (arch_.pooling == Pooling::kAttention) {
    CheckShape(params_.attention_w, h, arch_.attention_dim, "attention_w");
    CheckShape(params_.attention_b, 1, arch_.attention_dim, "attention_b");
    CheckShape(params_.attention_v, arch_.attention_dim, 1, "attention_v");
  }
  CheckShape(params_.hidden_w, h, arch_.hidden_dim, "hidden_w");
  CheckShape(params_.hidden_b, 1, arch_.hidden_dim, "hidden_b");
  CheckShape(params_.output_w, arch_.hidden_dim, arch_.num_classes, "output_w");
  CheckShape(params_.output_b, 1, arch_.num_classes, "output_b");
  for (const Matrix* m : params_.Ordered(arch_.pooling)) {
    if (!m->allFinite()) throw NumericError("non-finite model parameter");
  }
}

ReferenceClassifier ReferenceClassifier::Initialize(
    const ArchitectureConfig& arch, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> embed_dist(0.0, 0.5);
  auto xavier = [&rng](int in, int out) {
    const double bound = std::sqrt(6.0 / (in + out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Matrix m(in, out);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
    return m;
  };
  ModelParameters p;
  p.embedding.resize(arch.vocab_size, arch.embedding_dim);
  for (Eigen::Index i = 0; i < p.embedding.size(); ++i) {
    p.embedding.data()[i] = embed_dist(rng);
  }
  if (arch.vocab_size > Vocabulary::kPadId) {
    p.embedding.row(Vocabulary::kPadId).setZero();
  }
  if (arch.pooling == Pooling::kAttention) {
    p.attention_w = xavier(arch.embedding_dim, arch.attention_dim);
    p.attention_b = Matrix::Zero(1, arch.attention_dim);
    p.attention_v = xavier(arch.attention_dim, 1);
  }
  p.hidden_w = xavier(arch.embedding_dim, arch.hidden_dim);
  p.hidden_b = Matrix::Zero(1, arch.hidden_dim);
  p.output_w = xavier(arch.hidden_dim, arch.num_classes);
  p.output_b = Matrix::Zero(1, arch.num_classes);
  return ReferenceClassifier(arch, std::move(p));
}

Network ReferenceClassifier::TrainableNetwork() const {
  return Network(arch_, WrapParameters(params_, /*trainable=*/true));
}

Matrix ReferenceClassifier::Embed(std::span<const int> ids) const {
  if (ids.empty()) throw ShapeError("cannot embed an empty sample");
  Matrix out(static_cast<Eigen::Index>(ids.size()), arch_.embedding_dim);
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= arch_.vocab_size) {
      throw LookupError("word id " + std::to_string(ids[i]) +
                        " outside embedding table of " +
                        std::to_string(arch_.vocab_size) + " rows");
    }
    out.row(static_cast<Eigen::Index>(i)) = params_.embedding.row(ids[i]);
  }
  return out;
}

Matrix ReferenceClassifier::Embed(const TextSample& sample) const {
  return Embed(sample.ids);
}

Eigen::RowVectorXd ReferenceClassifier::Forward(const Matrix& embeddings) const {
  Eigen::RowVectorXd logits = network_.Logits(Constant(embeddings)).value();
  if (!logits.allFinite()) throw NumericError("non-finite logits");
  return logits;
}

Eigen::RowVectorXd ReferenceClassifier::Logits(const TextSample& sample) const {
  return Forward(Embed(sample));
}

LabelSet ReferenceClassifier::Predict(const TextSample& sample) const {
  return PredictFromLogits(Logits(sample), arch_.task_mode);
}

LabelSet PredictFromLogits(const Eigen::RowVectorXd& logits, TaskMode mode) {
  std::vector<int> labels;
  if (mode == TaskMode::kSingleLabel) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < logits.size(); ++i) {
      if (logits(i) > logits(best)) best = i;
    }
    labels.push_back(static_cast<int>(best));
  } else {
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
      if (logits(i) > 0.0) labels.push_back(static_cast<int>(i));
    }
  }
  return LabelSet(std::move(labels), mode);
}

Matrix GradWrtEmbeddings(const Network& network, const Matrix& embeddings,
                         const EmbeddingObjective& objective) {
  Var x = Leaf(embeddings);
  Var value = objective(network, x);
  Matrix grad = autodiff::Gradient(value, x).value();
  for (Eigen::Index i = 0; i < grad.rows(); ++i) {
    if (!grad.row(i).allFinite()) {
      throw NumericError("non-finite gradient at word position " +
                         std::to_string(i));
    }
  }
  return grad;
}

Var TargetLogitSum(const Var& logits, const LabelSet& labels) {
  Matrix mask = Matrix::Zero(1, logits.cols());
  for (int l : labels.labels()) {
    if (l < 0 || l >= logits.cols()) {
      throw LookupError("label " + std::to_string(l) + " outside logits");
    }
    mask(0, l) = 1.0;
  }
  return autodiff::Dot(logits, Constant(mask));
}

Var ClassificationLoss(const Var& logits, const LabelSet& labels) {
  Matrix target = Matrix::Zero(1, logits.cols());
  for (int l : labels.labels()) {
    if (l < 0 || l >= logits.cols()) {
      throw LookupError("label " + std::to_string(l) + " outside logits");
    }
    target(0, l) = 1.0;
  }
  if (labels.mode() == TaskMode::kSingleLabel) {
    return Scale(autodiff::Dot(autodiff::LogSoftmaxRow(logits),
                               Constant(target)),
                 -1.0);
  }
  // softplus(z) - y z, averaged over classes.
  Var per_class =
      autodiff::Sub(autodiff::Softplus(logits), Mul(logits, Constant(target)));
  return Scale(autodiff::SumAll(per_class), 1.0 / logits.cols());
}

}  // namespace attrobust
