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


#include "attrobust/attribution.h"

#include <cmath>
#include <string>

#include "attrobust/errors.h"

namespace attrobust {

using autodiff::Add;
using autodiff::BroadcastCols;
using autodiff::BroadcastRows;
using autodiff::Constant;
using autodiff::Detach;
using autodiff::Leaf;
using autodiff::MatMul;
using autodiff::Mul;
using autodiff::Relu;
using autodiff::Scale;
using autodiff::Sub;
using autodiff::Transpose;

namespace {

constexpr double kRescaleTolerance = 1e-7;

Var SaliencyTape(const Network& net, const Var& x, const LabelSet& label,
                 bool create_graph) {
  Var target = TargetLogitSum(net.Logits(x), label);
  return autodiff::Abs(autodiff::Gradient(target, x, create_graph));
}

Var IntegratedGradientsTape(const Network& net, const Var& x,
                            const Matrix& baseline, const LabelSet& label,
                            int steps, bool create_graph) {
  if (steps < 1) throw ConfigError("ig_steps must be at least 1");
  Var base = Constant(baseline);
  Var delta = Sub(x, base);
  Var sum;
  for (int k = 1; k <= steps; ++k) {
    Var point = Add(base, Scale(delta, static_cast<double>(k) / steps));
    Var target = TargetLogitSum(net.Logits(point), label);
    Var grad = autodiff::Gradient(target, point, create_graph);
    sum = sum.defined() ? Add(sum, grad) : grad;
  }
  return Mul(delta, Scale(sum, 1.0 / steps));
}

Var DeepLiftTape(const Network& net, const Var& x, const Matrix& baseline,
                 const LabelSet& label) {
  const Eigen::Index n = x.rows();
  const Eigen::Index h = x.cols();
  Var base = Constant(baseline);
  Var row_weight;  // n x 1 weight of each position in the pooled vector
  Var pooled, pooled_base;
  if (net.arch().pooling == Pooling::kAttention) {
    Var alpha = Detach(net.AttentionWeights(x));
    pooled = net.Pool(x, &alpha);
    pooled_base = net.Pool(base, &alpha);
    row_weight = alpha;
  } else {
    pooled = net.Pool(x);
    pooled_base = net.Pool(base);
    row_weight = Constant(Matrix::Constant(n, 1, 1.0 / n));
  }
  Var z = net.HiddenPreActivation(pooled);
  Var z_base = net.HiddenPreActivation(pooled_base);
  Var dz = Sub(z, z_base);
  Var da = Sub(Relu(z), Relu(z_base));

  // Rescale multiplier da/dz, falling back to the local ReLU gradient where
  // the input difference vanishes.
  const Matrix& dz_value = dz.value();
  Matrix fallback(dz_value.rows(), dz_value.cols());
  for (Eigen::Index i = 0; i < dz_value.size(); ++i) {
    const bool small = std::abs(dz_value.data()[i]) < kRescaleTolerance;
    fallback.data()[i] = small && z.value().data()[i] > 0.0 ? 1.0 : 0.0;
  }
  Var multiplier = Add(Mul(da, autodiff::SafeReciprocal(dz, kRescaleTolerance)),
                       Constant(fallback));

  Matrix label_mask = Matrix::Zero(net.arch().num_classes, 1);
  for (int l : label.labels()) label_mask(l, 0) = 1.0;
  Var output_weight = MatMul(net.vars().output_w, Constant(label_mask));  // H x 1
  Var unit = Mul(multiplier, Transpose(output_weight));                   // 1 x H
  Var per_dim = Transpose(MatMul(net.vars().hidden_w, Transpose(unit)));  // 1 x h
  Var scale = Mul(BroadcastCols(row_weight, h), BroadcastRows(per_dim, n));
  return Mul(Sub(x, base), scale);
}

Var AttentionTape(const Network& net, const Var& x) {
  if (net.arch().pooling != Pooling::kAttention) {
    throw ConfigError("attention attribution requires an attention-pool model");
  }
  Var alpha = net.AttentionWeights(x);
  return BroadcastCols(Scale(alpha, 1.0 / x.cols()), x.cols());
}

Var SingleLabelTape(const Network& net, const Var& x, const Matrix& baseline,
                    const LabelSet& label, const AttributionConfig& config,
                    bool create_graph) {
  switch (config.method) {
    case AttributionMethod::kSaliency:
      return SaliencyTape(net, x, label, create_graph);
    case AttributionMethod::kIntegratedGradients:
      return IntegratedGradientsTape(net, x, baseline, label, config.ig_steps,
                                     create_graph);
    case AttributionMethod::kDeepLift:
      return DeepLiftTape(net, x, baseline, label);
    case AttributionMethod::kAttention:
      return AttentionTape(net, x);
  }
  throw ConfigError("unsupported attribution method");
}

AttributionMap ToMap(const Var& per_embedding, AttributionMethod method,
                     const LabelSet& labels) {
  AttributionMap map;
  map.per_embedding = per_embedding.value();
  map.per_word = map.per_embedding.rowwise().sum();
  map.method = method;
  map.labels = labels;
  for (Eigen::Index i = 0; i < map.per_embedding.rows(); ++i) {
    if (!map.per_embedding.row(i).allFinite()) {
      throw NumericError("non-finite attribution at word position " +
                         std::to_string(i));
    }
  }
  return map;
}

}  // namespace

std::string_view MethodTag(AttributionMethod method) {
  switch (method) {
    case AttributionMethod::kSaliency:
      return "S";
    case AttributionMethod::kDeepLift:
      return "DL";
    case AttributionMethod::kIntegratedGradients:
      return "IG";
    case AttributionMethod::kAttention:
      return "A";
  }
  return "?";
}

AttributionMethod ParseMethod(std::string_view tag) {
  if (tag == "S") return AttributionMethod::kSaliency;
  if (tag == "DL") return AttributionMethod::kDeepLift;
  if (tag == "IG") return AttributionMethod::kIntegratedGradients;
  if (tag == "A") return AttributionMethod::kAttention;
  throw ConfigError("unknown attribution method '" + std::string(tag) +
                    "' (expected S, DL, IG or A)");
}

Matrix MakeBaseline(const Network& network, int length, BaselineKind kind) {
  const int h = network.arch().embedding_dim;
  if (kind == BaselineKind::kZero) return Matrix::Zero(length, h);
  return network.vars().embedding.value().row(Vocabulary::kPadId).replicate(
      length, 1);
}

Matrix MakeBaseline(const ReferenceClassifier& model, int length,
                    BaselineKind kind) {
  return MakeBaseline(model.network(), length, kind);
}

Var AttributionOnTape(const Network& network, const Var& embeddings,
                      const Matrix& baseline, const LabelSet& labels,
                      const AttributionConfig& config, bool create_graph) {
  if (labels.empty() && config.method != AttributionMethod::kAttention) {
    throw ConfigError("attribution needs a nonempty label set");
  }
  if (baseline.rows() != embeddings.rows() ||
      baseline.cols() != embeddings.cols()) {
    throw ShapeError("baseline shape does not match the input embeddings");
  }
  Var x = embeddings.requires_grad() ? embeddings : Leaf(embeddings.value());
  if (labels.size() <= 1) {
    return SingleLabelTape(network, x, baseline, labels, config, create_graph);
  }
  Var sum;
  for (int l : labels.labels()) {
    LabelSet single({l}, TaskMode::kSingleLabel);
    Var map = SingleLabelTape(network, x, baseline, single, config, create_graph);
    sum = sum.defined() ? Add(sum, map) : map;
  }
  return sum;
}

Var PerWordOnTape(const Var& per_embedding) {
  return autodiff::SumCols(per_embedding);
}

AttributionMap ComputeAttribution(const ReferenceClassifier& model,
                                  const Matrix& embeddings,
                                  const LabelSet& labels,
                                  const AttributionConfig& config) {
  Matrix baseline = MakeBaseline(model, static_cast<int>(embeddings.rows()),
                                 config.baseline);
  Var per_embedding = AttributionOnTape(model.network(), Leaf(embeddings),
                                        baseline, labels, config,
                                        /*create_graph=*/false);
  return ToMap(per_embedding, config.method, labels);
}

AttributionMap ComputeAttribution(const ReferenceClassifier& model,
                                  const TextSample& sample,
                                  const LabelSet& labels,
                                  const AttributionConfig& config) {
  return ComputeAttribution(model, model.Embed(sample), labels, config);
}

AttributionMap Saliency(const ReferenceClassifier& model,
                        const TextSample& sample, const LabelSet& labels) {
  if (labels.empty()) throw ConfigError("saliency needs a nonempty label set");
  Var x = Leaf(model.Embed(sample));
  return ToMap(SaliencyTape(model.network(), x, labels, false),
               AttributionMethod::kSaliency, labels);
}

AttributionMap IntegratedGradients(const ReferenceClassifier& model,
                                   const TextSample& sample,
                                   const LabelSet& labels,
                                   const AttributionConfig& config) {
  if (labels.empty()) throw ConfigError("IG needs a nonempty label set");
  Matrix x = model.Embed(sample);
  Matrix baseline =
      MakeBaseline(model, static_cast<int>(x.rows()), config.baseline);
  return ToMap(IntegratedGradientsTape(model.network(), Leaf(x), baseline,
                                       labels, config.ig_steps, false),
               AttributionMethod::kIntegratedGradients, labels);
}

AttributionMap DeepLiftRescale(const ReferenceClassifier& model,
                               const TextSample& sample,
                               const LabelSet& labels, BaselineKind baseline) {
  if (labels.empty()) throw ConfigError("DeepLIFT needs a nonempty label set");
  Matrix x = model.Embed(sample);
  Matrix base = MakeBaseline(model, static_cast<int>(x.rows()), baseline);
  return ToMap(DeepLiftTape(model.network(), Constant(x), base, labels),
               AttributionMethod::kDeepLift, labels);
}

AttributionMap AttentionAttribution(const ReferenceClassifier& model,
                                    const TextSample& sample) {
  return ToMap(AttentionTape(model.network(), Constant(model.Embed(sample))),
               AttributionMethod::kAttention, LabelSet());
}

AttributionMap MultilabelAttribution(const ReferenceClassifier& model,
                                     const TextSample& sample,
                                     const LabelSet& labels,
                                     const AttributionConfig& config) {
  if (labels.empty()) throw ConfigError("empty label set");
  return ComputeAttribution(model, sample, labels, config);
}

}  // namespace attrobust
