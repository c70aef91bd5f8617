// include/bwex/autograd.h

// Copyright 2026  bwex authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef BWEX_AUTOGRAD_H_
#define BWEX_AUTOGRAD_H_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bwex/array.h"

namespace bwex {
namespace ag {

// Reverse-mode autodiff over Array values.  Backward functions are written in
// terms of the ops below, so calling Grad with create_graph=true yields
// gradients that are themselves differentiable; the gradient-penalty losses
// rely on that for their parameter gradients.

class Tensor;

using BackwardFn = std::function<std::vector<Tensor>(
    const Tensor& grad, const Tensor& self)>;

struct Node {
  Array value;
  bool requires_grad = false;
  std::vector<Tensor> parents;
  BackwardFn backward;
  std::unique_ptr<Array> leaf_grad;  // Backward() accumulation target
  const char* op = "leaf";
};

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> n) : node_(std::move(n)) {}
  // Leaf constructor; requires_grad marks a trainable parameter.
  explicit Tensor(Array value, bool requires_grad = false);

  bool Defined() const { return node_ != nullptr; }
  const Array& Value() const { return node_->value; }
  // Direct mutation is only legal for leaves (parameter updates).
  Array& MutableValue();
  const std::vector<int64_t>& Dims() const { return node_->value.dims; }
  int64_t NumEl() const { return node_->value.NumEl(); }
  bool RequiresGrad() const { return Defined() && node_->requires_grad; }
  bool IsLeaf() const { return Defined() && !node_->backward; }

  // Leaf gradient accumulated by Backward(); lazily zero-initialized.
  Array& Grad();
  void ZeroGrad();

  std::shared_ptr<Node> node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

// Graph recording switch (thread-local).  Ops executed while disabled produce
// constants; Grad/Backward use this to avoid building second-order graphs
// unless asked to.
bool GradModeEnabled();
struct NoGradGuard {
  NoGradGuard();
  ~NoGradGuard();
  bool saved;
};

Tensor Constant(Array value);
Tensor Detach(const Tensor& x);

// --- elementwise binary (numpy-style broadcasting, rank <= 3) ---
Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Div(const Tensor& a, const Tensor& b);

// --- scalar forms ---
Tensor AddScalar(const Tensor& a, double s);
Tensor MulScalar(const Tensor& a, double s);
Tensor Neg(const Tensor& a);

// --- elementwise unary ---
Tensor Relu(const Tensor& a);
Tensor LeakyRelu(const Tensor& a, double negative_slope);
Tensor Sigmoid(const Tensor& a);
Tensor Tanh(const Tensor& a);
Tensor Exp(const Tensor& a);
Tensor Log(const Tensor& a);
Tensor Sqrt(const Tensor& a);
Tensor Square(const Tensor& a);
Tensor Abs(const Tensor& a);
Tensor Softplus(const Tensor& a);
Tensor ClampMin(const Tensor& a, double lo);

// --- reductions / shape ---
Tensor SumAll(const Tensor& a);                    // -> shape {1}
Tensor MeanAll(const Tensor& a);                   // -> shape {1}
// Sum over the axes marked true; keeps reduced axes as size 1.
Tensor ReduceSum(const Tensor& a, const std::vector<bool>& axes);
Tensor ReduceMean(const Tensor& a, const std::vector<bool>& axes);
Tensor BroadcastTo(const Tensor& a, const std::vector<int64_t>& dims);
// Sums a gradient down to a target shape (inverse of broadcasting).
Tensor ReduceToShape(const Tensor& g, const std::vector<int64_t>& dims);
Tensor Reshape(const Tensor& a, const std::vector<int64_t>& dims);
Tensor PadTime(const Tensor& x, int64_t left, int64_t right);
Tensor SliceTime(const Tensor& x, int64_t start, int64_t len);
Tensor SliceChannels(const Tensor& x, int64_t start, int64_t count);
Tensor PadChannels(const Tensor& x, int64_t before, int64_t after);
Tensor ConcatChannels(const Tensor& a, const Tensor& b);
// Non-differentiable max over all elements (plain value).
double MaxAllValue(const Array& a);
Array ReduceMaxArray(const Array& a, const std::vector<bool>& axes);

// --- convolution family (closed under differentiation) ---
struct ConvGeom {
  int64_t stride = 1;
  int64_t dilation = 1;
  int64_t groups = 1;
  int64_t pad_left = 0;
  int64_t pad_right = 0;
};
// x: (B, Cin, T), w: (Cout, Cin/groups, K) -> (B, Cout, T')
Tensor Conv1d(const Tensor& x, const Tensor& w, const ConvGeom& geom);
// Adjoint of Conv1d in its input: x: (B, Cout, T'), w as above -> (B, Cin, T).
// Also serves as the transposed convolution with torch weight layout
// (Cin_t = Cout here).
Tensor ConvTranspose1d(const Tensor& x, const Tensor& w, const ConvGeom& geom,
                       int64_t out_len);
// b: (C); adds per-channel bias to (B, C, T).
Tensor BiasAdd(const Tensor& x, const Tensor& b);

// --- pooling / folding ---
Tensor AvgPool1d(const Tensor& x, int64_t factor);
// (B, 1, T) -> (B*p, 1, ceil(T/p)); phase r of sample j is x[., ., j*p + r].
Tensor FoldPeriod(const Tensor& x, int64_t period);

// --- autodiff drivers ---
// d(output)/d(wrt); output must be scalar unless grad_output is supplied.
std::vector<Tensor> Grad(const Tensor& output, const std::vector<Tensor>& wrt,
                         bool create_graph = false,
                         const Tensor& grad_output = Tensor());
// Accumulates gradients of a scalar loss into every reachable leaf.
void Backward(const Tensor& loss);

}  // namespace ag
}  // namespace bwex

#endif  // BWEX_AUTOGRAD_H_
