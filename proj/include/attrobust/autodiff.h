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

// A small reverse-mode automatic differentiation tape over dense matrices.
//
// Every backward rule is itself written in terms of differentiable ops, so
// gradients can be differentiated again (double backprop). This is what lets
// the robust trainer minimize a distance between attribution maps that are
// themselves gradients of the classifier.
//
// Graph nodes are immutable once built; concurrent graph construction and
// differentiation from several threads is safe as long as each thread builds
// its own graph (shared leaves are read-only).

#ifndef ATTROBUST_AUTODIFF_H_
#define ATTROBUST_AUTODIFF_H_

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace attrobust::autodiff {

using Matrix = Eigen::MatrixXd;

class Var;
// Receives the upstream gradient and a per-input flag telling which input
// gradients are actually consumed; unneeded entries may be left undefined.
using BackwardFn = std::function<std::vector<Var>(
    const Var& upstream, const std::vector<char>& needed)>;

struct Node {
  Matrix value;
  std::vector<Var> inputs;
  // Maps the gradient w.r.t. this node onto gradients w.r.t. `inputs`. An
  // undefined Var in the result means "no gradient flows to that input".
  BackwardFn backward;
  bool requires_grad = false;
};

class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  bool defined() const { return node_ != nullptr; }
  const Matrix& value() const { return node_->value; }
  Eigen::Index rows() const { return node_->value.rows(); }
  Eigen::Index cols() const { return node_->value.cols(); }
  double scalar() const { return node_->value(0, 0); }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  const Node* node() const { return node_.get(); }

 private:
  std::shared_ptr<const Node> node_;
};

// Leaves.
Var Constant(Matrix value);
Var Constant(double value);
Var Leaf(Matrix value);  // requires grad
Var Detach(const Var& v);

// Gradients of the scalar `output` w.r.t. each entry of `wrt`. Entries of
// `wrt` may be leaves or intermediate nodes. With `create_graph`, the
// returned gradients are themselves differentiable. Nodes not reachable from
// the output receive zero gradients.
std::vector<Var> Gradients(const Var& output, std::span<const Var> wrt,
                           bool create_graph = false);
Var Gradient(const Var& output, const Var& wrt, bool create_graph = false);

// Elementwise arithmetic (shapes must match).
Var Add(const Var& a, const Var& b);
Var Sub(const Var& a, const Var& b);
Var Mul(const Var& a, const Var& b);
Var Scale(const Var& a, double factor);
Var AddScalar(const Var& a, double offset);
Var Neg(const Var& a);
Var Reciprocal(const Var& a);
// 1/a where |a| >= tolerance, 0 elsewhere (zero derivative there too).
Var SafeReciprocal(const Var& a, double tolerance);
Var Square(const Var& a);
Var Sqrt(const Var& a);
Var Exp(const Var& a);
Var Log(const Var& a);
Var Abs(const Var& a);
Var Relu(const Var& a);
Var Tanh(const Var& a);
Var Sigmoid(const Var& a);
Var Softplus(const Var& a);

// Linear algebra and reshaping.
Var MatMul(const Var& a, const Var& b);
Var Transpose(const Var& a);
Var AddRowBroadcast(const Var& a, const Var& row);  // (n x k) + (1 x k)
Var SumRows(const Var& a);                          // (n x k) -> (1 x k)
Var SumCols(const Var& a);                          // (n x k) -> (n x 1)
Var SumAll(const Var& a);                           // -> (1 x 1)
Var BroadcastRows(const Var& row, Eigen::Index rows);
Var BroadcastCols(const Var& col, Eigen::Index cols);
Var BroadcastScalar(const Var& s, Eigen::Index rows, Eigen::Index cols);
Var GatherRows(const Var& table, std::span<const int> ids);
Var ScatterAddRows(const Var& rows, std::span<const int> ids,
                   Eigen::Index table_rows);

// Softmax over the entries of a column vector (n x 1).
Var SoftmaxColumn(const Var& a);
// Log-softmax over the entries of a row vector (1 x k).
Var LogSoftmaxRow(const Var& a);

// Composite helpers.
Var Dot(const Var& a, const Var& b);  // sum of elementwise product, 1 x 1
Var ScalarMul(const Var& s, const Var& a);  // (1 x 1) * (n x k)
Var Divide(const Var& a, const Var& b);     // elementwise

}  // namespace attrobust::autodiff

#endif  // ATTROBUST_AUTODIFF_H_
