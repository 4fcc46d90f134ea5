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

#include "attrobust/autodiff.h"

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace attrobust::autodiff {
namespace {

Var MakeOp(Matrix value, std::vector<Var> inputs, BackwardFn backward) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  bool requires_grad = false;
  for (const Var& in : inputs) requires_grad = requires_grad || in.requires_grad();
  node->requires_grad = requires_grad;
  if (requires_grad) {
    node->inputs = std::move(inputs);
    node->backward = std::move(backward);
  }
  return Var(std::move(node));
}

void CheckSameShape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(
        std::string(op) + ": shape mismatch (" + std::to_string(a.rows()) +
        "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
        "x" + std::to_string(b.cols()) + ")");
  }
}

Var Ones(Eigen::Index rows, Eigen::Index cols) {
  return Constant(Matrix::Ones(rows, cols));
}

}  // namespace

Var Constant(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  return Var(std::move(node));
}

Var Constant(double value) { return Constant(Matrix::Constant(1, 1, value)); }

Var Leaf(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  return Var(std::move(node));
}

Var Detach(const Var& v) { return Constant(v.value()); }

std::vector<Var> Gradients(const Var& output, std::span<const Var> wrt,
                           bool create_graph) {
  if (output.rows() != 1 || output.cols() != 1) {
    throw std::invalid_argument("Gradients: output must be a 1x1 scalar");
  }
  std::vector<Var> result;
  result.reserve(wrt.size());
  if (!output.requires_grad()) {
    for (const Var& w : wrt) {
      result.push_back(Constant(Matrix::Zero(w.rows(), w.cols())));
    }
    return result;
  }

  std::unordered_set<const Node*> targets;
  for (const Var& w : wrt) targets.insert(w.node());

  // Iterative post-order DFS; inputs precede their consumers in `order`.
  std::vector<const Node*> order;
  std::unordered_map<const Node*, bool> relevant;
  {
    std::vector<std::pair<const Node*, size_t>> stack;
    std::unordered_set<const Node*> visited;
    stack.emplace_back(output.node(), 0);
    visited.insert(output.node());
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < node->inputs.size()) {
        const Node* child = node->inputs[next++].node();
        if (child->requires_grad && visited.insert(child).second) {
          stack.emplace_back(child, 0);
        }
        continue;
      }
      bool rel = targets.count(node) > 0;
      for (const Var& in : node->inputs) {
        auto it = relevant.find(in.node());
        if (it != relevant.end() && it->second) rel = true;
      }
      relevant[node] = rel;
      order.push_back(node);
      stack.pop_back();
    }
  }

  std::unordered_map<const Node*, Var> grads;
  grads[output.node()] = Ones(1, 1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Node* node = *it;
    if (!relevant[node] || !node->backward) continue;
    auto g_it = grads.find(node);
    if (g_it == grads.end()) continue;
    Var upstream = create_graph ? g_it->second : Detach(g_it->second);
    std::vector<char> needed(node->inputs.size(), 0);
    bool any = false;
    for (size_t i = 0; i < node->inputs.size(); ++i) {
      const Var& in = node->inputs[i];
      needed[i] = in.requires_grad() && relevant[in.node()];
      any = any || needed[i];
    }
    if (!any) continue;
    std::vector<Var> in_grads = node->backward(upstream, needed);
    for (size_t i = 0; i < node->inputs.size(); ++i) {
      if (!needed[i] || i >= in_grads.size() || !in_grads[i].defined()) continue;
      Var g = create_graph ? in_grads[i] : Detach(in_grads[i]);
      const Node* in = node->inputs[i].node();
      auto acc = grads.find(in);
      if (acc == grads.end()) {
        grads.emplace(in, std::move(g));
      } else {
        acc->second = create_graph ? Add(acc->second, g)
                                   : Constant(acc->second.value() + g.value());
      }
    }
  }

  for (const Var& w : wrt) {
    auto it = grads.find(w.node());
    if (it == grads.end()) {
      result.push_back(Constant(Matrix::Zero(w.rows(), w.cols())));
    } else {
      result.push_back(it->second);
    }
  }
  return result;
}

Var Gradient(const Var& output, const Var& wrt, bool create_graph) {
  std::vector<Var> one{wrt};
  return Gradients(output, one, create_graph).front();
}

Var Add(const Var& a, const Var& b) {
  CheckSameShape(a, b, "Add");
  return MakeOp(a.value() + b.value(), {a, b},
                [](const Var& g, const std::vector<char>&) {
                  return std::vector<Var>{g, g};
                });
}

Var Sub(const Var& a, const Var& b) {
  CheckSameShape(a, b, "Sub");
  return MakeOp(a.value() - b.value(), {a, b},
                [](const Var& g, const std::vector<char>& need) {
                  return std::vector<Var>{g, need[1] ? Neg(g) : Var()};
                });
}

Var Mul(const Var& a, const Var& b) {
  CheckSameShape(a, b, "Mul");
  return MakeOp(a.value().cwiseProduct(b.value()), {a, b},
                [a, b](const Var& g, const std::vector<char>& need) {
                  return std::vector<Var>{need[0] ? Mul(g, b) : Var(),
                                          need[1] ? Mul(g, a) : Var()};
                });
}

Var Scale(const Var& a, double factor) {
  return MakeOp(a.value() * factor, {a},
                [factor](const Var& g, const std::vector<char>&) {
                  return std::vector<Var>{Scale(g, factor)};
                });
}

Var AddScalar(const Var& a, double offset) {
  return MakeOp(a.value().array() + offset, {a},
                [](const Var& g, const std::vector<char>&) {
                  return std::vector<Var>{g};
                });
}

Var Neg(const Var& a) { return Scale(a, -1.0); }

Var Reciprocal(const Var& a) {
  return MakeOp(a.value().cwiseInverse(), {a},
                [a](const Var& g, const std::vector<char>&) {
                  return std::vector<Var>{Neg(Mul(g, Square(Reciprocal(a))))};
                });
}

Var SafeReciprocal(const Var& a, double tolerance) {
  Matrix mask = (a.value().array().abs() >= tolerance).cast<double>();
  Matrix safe = (mask.array() > 0).select(a.value(), 1.0);
  Matrix value = safe.cwiseInverse().cwiseProduct(mask);
  return MakeOp(std::move(value), {a},
                [a, tolerance](const Var& g, const std::vector<char>&) {
                  Var r = SafeReciprocal(a, tolerance);
                  return std::vector<Var>{Neg(Mul(g, Square(r)))};
                });
}

Var Square(const Var& a) {
  return MakeOp(a.value().array().square(), {a},
                [a](const Var& g, const std::vector<char>&) {
                  return std::vector<Var>{Scale(Mul(g, a), 2.0)};
                });
}

Var Sqrt(const Var& a) {
  return MakeOp(a.value().array().sqrt(), {a},
                [a](const Var& g, const std::vector<char>&) {
                  return std::vector<Var>{
                      Scale(Mul(g, Reciprocal(Sqrt(a))), 0.5)};
                });
}

Var Exp(const Var& a) {
  return MakeOp(a.value().array().exp(), {a},
                [a](const Var& g, const std::vector<char>&) {
                  return std::vector<Var>{Mul(g, Exp(a))};
                });
}

Var Log(const Var& a) {
  return MakeOp(a.value().array().log(), {a},
                [a](const Var& g, const std::vector<char>&) {
                  return std::vector<Var>{Mul(g, Reciprocal(a))};
                });
}

Var Abs(const Var& a) {
  Matrix sign = a.value().array().sign();
  return MakeOp(a.value().cwiseAbs(), {a},
                [sign](const Var& g, const std::vector<char>&) {
                  return std::vector<Var>{Mul(g, Constant(sign))};
                });
}

Var Relu(const Var& a) {
  Matrix mask = (a.value().array() > 0.0).cast<double>();
  Matrix value = a.value().cwiseProduct(mask);
  return MakeOp(std::move(value), {a},
                [mask](const Var& g, const std::vector<char>&) {
                  return std::vector<Var>{Mul(g, Constant(mask))};
                });
}

Var Tanh(const Var& a) {
  return MakeOp(a.value().array().tanh(), {a},
                [a](const Var& g, const std::vector<char>&) {
                  Var t = Tanh(a);
                  Var one = Ones(a.rows(), a.cols());
                  return std::vector<Var>{Mul(g, Sub(one, Square(t)))};
                });
}

Var Sigmoid(const Var& a) {
  Matrix value = (1.0 + (-a.value().array()).exp()).inverse();
  return MakeOp(std::move(value), {a},
                [a](const Var& g, const std::vector<char>&) {
                  Var s = Sigmoid(a);
                  Var one = Ones(a.rows(), a.cols());
                  return std::vector<Var>{Mul(g, Mul(s, Sub(one, s)))};
                });
}

Var Softplus(const Var& a) {
  // log(1 + e^x) = max(x, 0) + log1p(e^{-|x|})
  Matrix value = a.value().unaryExpr([](double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
  });
  return MakeOp(std::move(value), {a},
                [a](const Var& g, const std::vector<char>&) {
                  return std::vector<Var>{Mul(g, Sigmoid(a))};
                });
}

Var MatMul(const Var& a, const Var& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("MatMul: inner dimension mismatch");
  }
  return MakeOp(a.value() * b.value(), {a, b},
                [a, b](const Var& g, const std::vector<char>& need) {
                  return std::vector<Var>{
                      need[0] ? MatMul(g, Transpose(b)) : Var(),
                      need[1] ? MatMul(Transpose(a), g) : Var()};
                });
}

Var Transpose(const Var& a) {
  return MakeOp(a.value().transpose(), {a},
                [](const Var& g, const std::vector<char>&) {
                  return std::vector<Var>{Transpose(g)};
                });
}

Var AddRowBroadcast(const Var& a, const Var& row) {
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw std::invalid_argument("AddRowBroadcast: row shape mismatch");
  }
  Matrix value = a.value().rowwise() + row.value().row(0);
  return MakeOp(std::move(value), {a, row},
                [](const Var& g, const std::vector<char>& need) {
                  return std::vector<Var>{g, need[1] ? SumRows(g) : Var()};
                });
}

Var SumRows(const Var& a) {
  const Eigen::Index rows = a.rows();
  return MakeOp(a.value().colwise().sum(), {a},
                [rows](const Var& g, const std::vector<char>&) {
                  return std::vector<Var>{BroadcastRows(g, rows)};
                });
}

Var SumCols(const Var& a) {
  const Eigen::Index cols = a.cols();
  return MakeOp(a.value().rowwise().sum(), {a},
                [cols](const Var& g, const std::vector<char>&) {
                  return std::vector<Var>{BroadcastCols(g, cols)};
                });
}

Var SumAll(const Var& a) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  return MakeOp(Matrix::Constant(1, 1, a.value().sum()), {a},
                [rows, cols](const Var& g, const std::vector<char>&) {
                  return std::vector<Var>{BroadcastScalar(g, rows, cols)};
                });
}

Var BroadcastRows(const Var& row, Eigen::Index rows) {
  if (row.rows() != 1) throw std::invalid_argument("BroadcastRows: not a row");
  return MakeOp(row.value().replicate(rows, 1), {row},
                [](const Var& g, const std::vector<char>&) {
                  return std::vector<Var>{SumRows(g)};
                });
}

Var BroadcastCols(const Var& col, Eigen::Index cols) {
  if (col.cols() != 1) throw std::invalid_argument("BroadcastCols: not a column");
  return MakeOp(col.value().replicate(1, cols), {col},
                [](const Var& g, const std::vector<char>&) {
                  return std::vector<Var>{SumCols(g)};
                });
}

Var BroadcastScalar(const Var& s, Eigen::Index rows, Eigen::Index cols) {
  if (s.rows() != 1 || s.cols() != 1) {
    throw std::invalid_argument("BroadcastScalar: not a scalar");
  }
  return MakeOp(Matrix::Constant(rows, cols, s.scalar()), {s},
                [](const Var& g, const std::vector<char>&) {
                  return std::vector<Var>{SumAll(g)};
                });
}

Var GatherRows(const Var& table, std::span<const int> ids) {
  Matrix value(static_cast<Eigen::Index>(ids.size()), table.cols());
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= table.rows()) {
      throw std::out_of_range("GatherRows: id " + std::to_string(ids[i]) +
                              " outside table of " +
                              std::to_string(table.rows()) + " rows");
    }
    value.row(static_cast<Eigen::Index>(i)) = table.value().row(ids[i]);
  }
  std::vector<int> owned(ids.begin(), ids.end());
  const Eigen::Index table_rows = table.rows();
  return MakeOp(std::move(value), {table},
                [owned, table_rows](const Var& g, const std::vector<char>&) {
                  return std::vector<Var>{
                      ScatterAddRows(g, owned, table_rows)};
                });
}

Var ScatterAddRows(const Var& rows, std::span<const int> ids,
                   Eigen::Index table_rows) {
  Matrix value = Matrix::Zero(table_rows, rows.cols());
  for (size_t i = 0; i < ids.size(); ++i) {
    value.row(ids[i]) += rows.value().row(static_cast<Eigen::Index>(i));
  }
  std::vector<int> owned(ids.begin(), ids.end());
  return MakeOp(std::move(value), {rows},
                [owned](const Var& g, const std::vector<char>&) {
                  return std::vector<Var>{GatherRows(g, owned)};
                });
}

Var SoftmaxColumn(const Var& a) {
  if (a.cols() != 1) throw std::invalid_argument("SoftmaxColumn: not a column");
  Eigen::VectorXd shifted = a.value().col(0).array() - a.value().maxCoeff();
  Eigen::VectorXd e = shifted.array().exp();
  Matrix value = e / e.sum();
  return MakeOp(std::move(value), {a},
                [a](const Var& g, const std::vector<char>&) {
                  Var y = SoftmaxColumn(a);
                  Var inner = BroadcastScalar(Dot(g, y), a.rows(), 1);
                  return std::vector<Var>{Mul(y, Sub(g, inner))};
                });
}

Var LogSoftmaxRow(const Var& a) {
  if (a.rows() != 1) throw std::invalid_argument("LogSoftmaxRow: not a row");
  const double max = a.value().maxCoeff();
  const double lse =
      max + std::log((a.value().array() - max).exp().sum());
  return MakeOp(a.value().array() - lse, {a},
                [a](const Var& g, const std::vector<char>&) {
                  Var softmax = Exp(LogSoftmaxRow(a));
                  Var total = BroadcastScalar(SumAll(g), 1, a.cols());
                  return std::vector<Var>{Sub(g, Mul(softmax, total))};
                });
}

Var Dot(const Var& a, const Var& b) { return SumAll(Mul(a, b)); }

Var ScalarMul(const Var& s, const Var& a) {
  return Mul(BroadcastScalar(s, a.rows(), a.cols()), a);
}

Var Divide(const Var& a, const Var& b) { return Mul(a, Reciprocal(b)); }

}  // namespace attrobust::autodiff
