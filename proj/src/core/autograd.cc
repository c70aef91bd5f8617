// src/core/autograd.cc

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

#include "bwex/autograd.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "bwex/kernels.h"

namespace bwex {
namespace ag {

namespace {

thread_local bool g_grad_enabled = true;

Tensor MakeOp(Array value, std::vector<Tensor> parents, BackwardFn bwd,
              const char* name) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  bool rg = false;
  if (g_grad_enabled) {
    for (const Tensor& p : parents) {
      if (p.RequiresGrad()) rg = true;
    }
  }
  node->requires_grad = rg;
  if (rg) {
    node->parents = std::move(parents);
    node->backward = std::move(bwd);
    node->op = name;
  }
  return Tensor(std::move(node));
}

void PadDims3(const std::vector<int64_t>& dims, int64_t out[3]) {
  out[0] = out[1] = out[2] = 1;
  const int r = static_cast<int>(dims.size());
  BWEX_CHECK(r >= 1 && r <= 3, "tensor rank must be 1..3, got ", r);
  for (int i = 0; i < r; ++i) out[3 - r + i] = dims[static_cast<size_t>(i)];
}

template <typename F>
Array BinaryEval(const Array& a, const Array& b, F f, const char* name) {
  int64_t ad[3], bd[3], od[3];
  PadDims3(a.dims, ad);
  PadDims3(b.dims, bd);
  for (int i = 0; i < 3; ++i) {
    BWEX_CHECK(ad[i] == bd[i] || ad[i] == 1 || bd[i] == 1, name,
               ": incompatible shapes ", ShapeStr(a.dims), " vs ", ShapeStr(b.dims));
    od[i] = std::max(ad[i], bd[i]);
  }
  const int out_rank = std::max(a.Rank(), b.Rank());
  std::vector<int64_t> odims(od + (3 - out_rank), od + 3);
  Array out(odims);
  if (a.dims == b.dims) {
    const int64_t n = a.NumEl();
    for (int64_t i = 0; i < n; ++i) out.v[static_cast<size_t>(i)] = f(a.v[static_cast<size_t>(i)], b.v[static_cast<size_t>(i)]);
    return out;
  }
  int64_t idx = 0;
  for (int64_t i0 = 0; i0 < od[0]; ++i0) {
    const int64_t a0 = (ad[0] == 1) ? 0 : i0, b0 = (bd[0] == 1) ? 0 : i0;
    for (int64_t i1 = 0; i1 < od[1]; ++i1) {
      const int64_t a1 = (ad[1] == 1) ? 0 : i1, b1 = (bd[1] == 1) ? 0 : i1;
      const double* ar = a.Data() + (a0 * ad[1] + a1) * ad[2];
      const double* br = b.Data() + (b0 * bd[1] + b1) * bd[2];
      if (ad[2] == od[2] && bd[2] == od[2]) {
        for (int64_t i2 = 0; i2 < od[2]; ++i2) out.v[static_cast<size_t>(idx++)] = f(ar[i2], br[i2]);
      } else {
        for (int64_t i2 = 0; i2 < od[2]; ++i2) {
          out.v[static_cast<size_t>(idx++)] = f(ar[(ad[2] == 1) ? 0 : i2], br[(bd[2] == 1) ? 0 : i2]);
        }
      }
    }
  }
  return out;
}

template <typename F>
Array UnaryEval(const Array& a, F f) {
  Array out(a.dims);
  const int64_t n = a.NumEl();
  for (int64_t i = 0; i < n; ++i) out.v[static_cast<size_t>(i)] = f(a.v[static_cast<size_t>(i)]);
  return out;
}

// Elementwise mask computed from an input value; used for piecewise-linear
// activations whose second derivative is zero almost everywhere.
template <typename F>
Tensor MaskOf(const Array& a, F f) {
  return Constant(UnaryEval(a, f));
}

kernels::ConvSpec BuildConvSpec(const std::vector<int64_t>& xdims,
                                const std::vector<int64_t>& wdims,
                                const ConvGeom& g) {
  BWEX_CHECK(xdims.size() == 3 && wdims.size() == 3, "conv expects rank-3 input and weight");
  kernels::ConvSpec s;
  s.batch = xdims[0];
  s.in_ch = xdims[1];
  s.in_len = xdims[2];
  s.out_ch = wdims[0];
  s.kernel = wdims[2];
  s.stride = g.stride;
  s.dilation = g.dilation;
  s.groups = g.groups;
  s.pad_left = g.pad_left;
  s.pad_right = g.pad_right;
  BWEX_CHECK(wdims[1] * g.groups == s.in_ch, "conv weight in_ch mismatch: weight ",
             ShapeStr(wdims), " groups ", g.groups, " input ", ShapeStr(xdims));
  s.out_len = kernels::ConvOutLen(s);
  return s;
}

Tensor ConvGradWeightOp(const Tensor& xrole, const Tensor& gyrole,
                        const ConvGeom& geom, const std::vector<int64_t>& wdims);

}  // namespace

Tensor::Tensor(Array value, bool requires_grad) {
  node_ = std::make_shared<Node>();
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
}

Array& Tensor::MutableValue() {
  BWEX_CHECK(IsLeaf(), "only leaf tensors may be mutated");
  return node_->value;
}

Array& Tensor::Grad() {
  BWEX_CHECK(IsLeaf(), "gradients accumulate only on leaves");
  if (!node_->leaf_grad) {
    node_->leaf_grad = std::make_unique<Array>(node_->value.dims);
  }
  return *node_->leaf_grad;
}

void Tensor::ZeroGrad() {
  if (node_ && node_->leaf_grad) {
    for (double& x : node_->leaf_grad->v) x = 0.0;
  }
}

bool GradModeEnabled() { return g_grad_enabled; }
NoGradGuard::NoGradGuard() : saved(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = saved; }

Tensor Constant(Array value) { return Tensor(std::move(value), false); }

Tensor Detach(const Tensor& x) { return Constant(x.Value()); }

// ---------------------------------------------------------------------------
// Elementwise binary
// ---------------------------------------------------------------------------

Tensor Add(const Tensor& a, const Tensor& b) {
  Array out = BinaryEval(a.Value(), b.Value(), [](double x, double y) { return x + y; }, "add");
  std::vector<int64_t> adims = a.Dims(), bdims = b.Dims();
  return MakeOp(std::move(out), {a, b},
                [adims, bdims](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{ReduceToShape(g, adims),
                                             ReduceToShape(g, bdims)};
                },
                "add");
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  Array out = BinaryEval(a.Value(), b.Value(), [](double x, double y) { return x - y; }, "sub");
  std::vector<int64_t> adims = a.Dims(), bdims = b.Dims();
  return MakeOp(std::move(out), {a, b},
                [adims, bdims](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{ReduceToShape(g, adims),
                                             ReduceToShape(Neg(g), bdims)};
                },
                "sub");
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  Array out = BinaryEval(a.Value(), b.Value(), [](double x, double y) { return x * y; }, "mul");
  Tensor ac = a, bc = b;
  return MakeOp(std::move(out), {a, b},
                [ac, bc](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{ReduceToShape(Mul(g, bc), ac.Dims()),
                                             ReduceToShape(Mul(g, ac), bc.Dims())};
                },
                "mul");
}

Tensor Div(const Tensor& a, const Tensor& b) {
  Array out = BinaryEval(a.Value(), b.Value(), [](double x, double y) { return x / y; }, "div");
  Tensor ac = a, bc = b;
  return MakeOp(std::move(out), {a, b},
                [ac, bc](const Tensor& g, const Tensor&) {
                  Tensor ga = ReduceToShape(Div(g, bc), ac.Dims());
                  Tensor gb = ReduceToShape(
                      Neg(Div(Mul(g, ac), Mul(bc, bc))), bc.Dims());
                  return std::vector<Tensor>{ga, gb};
                },
                "div");
}

Tensor AddScalar(const Tensor& a, double s) {
  return MakeOp(UnaryEval(a.Value(), [s](double x) { return x + s; }), {a},
                [](const Tensor& g, const Tensor&) { return std::vector<Tensor>{g}; },
                "add_scalar");
}

Tensor MulScalar(const Tensor& a, double s) {
  return MakeOp(UnaryEval(a.Value(), [s](double x) { return x * s; }), {a},
                [s](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{MulScalar(g, s)};
                },
                "mul_scalar");
}

Tensor Neg(const Tensor& a) { return MulScalar(a, -1.0); }

// ---------------------------------------------------------------------------
// Elementwise unary
// ---------------------------------------------------------------------------

Tensor Relu(const Tensor& a) {
  Tensor ac = a;
  return MakeOp(UnaryEval(a.Value(), [](double x) { return x > 0.0 ? x : 0.0; }), {a},
                [ac](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{
                      Mul(g, MaskOf(ac.Value(), [](double x) { return x > 0.0 ? 1.0 : 0.0; }))};
                },
                "relu");
}

Tensor LeakyRelu(const Tensor& a, double slope) {
  Tensor ac = a;
  return MakeOp(UnaryEval(a.Value(), [slope](double x) { return x > 0.0 ? x : slope * x; }),
                {a},
                [ac, slope](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{Mul(
                      g, MaskOf(ac.Value(), [slope](double x) { return x > 0.0 ? 1.0 : slope; }))};
                },
                "leaky_relu");
}

Tensor Sigmoid(const Tensor& a) {
  auto sig = [](double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  };
  return MakeOp(UnaryEval(a.Value(), sig), {a},
                [](const Tensor& g, const Tensor& self) {
                  return std::vector<Tensor>{
                      Mul(g, Mul(self, AddScalar(Neg(self), 1.0)))};
                },
                "sigmoid");
}

Tensor Tanh(const Tensor& a) {
  return MakeOp(UnaryEval(a.Value(), [](double x) { return std::tanh(x); }), {a},
                [](const Tensor& g, const Tensor& self) {
                  return std::vector<Tensor>{
                      Mul(g, AddScalar(Neg(Square(self)), 1.0))};
                },
                "tanh");
}

Tensor Exp(const Tensor& a) {
  return MakeOp(UnaryEval(a.Value(), [](double x) { return std::exp(x); }), {a},
                [](const Tensor& g, const Tensor& self) {
                  return std::vector<Tensor>{Mul(g, self)};
                },
                "exp");
}

Tensor Log(const Tensor& a) {
  Tensor ac = a;
  return MakeOp(UnaryEval(a.Value(), [](double x) { return std::log(x); }), {a},
                [ac](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{Div(g, ac)};
                },
                "log");
}

Tensor Sqrt(const Tensor& a) {
  return MakeOp(UnaryEval(a.Value(), [](double x) { return std::sqrt(x); }), {a},
                [](const Tensor& g, const Tensor& self) {
                  return std::vector<Tensor>{Div(g, MulScalar(self, 2.0))};
                },
                "sqrt");
}

Tensor Square(const Tensor& a) {
  Tensor ac = a;
  return MakeOp(UnaryEval(a.Value(), [](double x) { return x * x; }), {a},
                [ac](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{Mul(g, MulScalar(ac, 2.0))};
                },
                "square");
}

Tensor Abs(const Tensor& a) {
  Tensor ac = a;
  return MakeOp(UnaryEval(a.Value(), [](double x) { return std::fabs(x); }), {a},
                [ac](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{Mul(
                      g, MaskOf(ac.Value(), [](double x) { return x >= 0.0 ? 1.0 : -1.0; }))};
                },
                "abs");
}

Tensor Softplus(const Tensor& a) {
  auto sp = [](double x) {
    // log(1 + e^x), overflow-safe on both tails.
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
  };
  Tensor ac = a;
  return MakeOp(UnaryEval(a.Value(), sp), {a},
                [ac](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{Mul(g, Sigmoid(ac))};
                },
                "softplus");
}

Tensor ClampMin(const Tensor& a, double lo) {
  Tensor ac = a;
  return MakeOp(UnaryEval(a.Value(), [lo](double x) { return x < lo ? lo : x; }), {a},
                [ac, lo](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{Mul(
                      g, MaskOf(ac.Value(), [lo](double x) { return x >= lo ? 1.0 : 0.0; }))};
                },
                "clamp_min");
}

// ---------------------------------------------------------------------------
// Reductions and shape ops
// ---------------------------------------------------------------------------

Tensor SumAll(const Tensor& a) {
  double acc = 0.0;
  for (double x : a.Value().v) acc += x;
  std::vector<int64_t> adims = a.Dims();
  return MakeOp(Array::Scalar(acc), {a},
                [adims](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{BroadcastTo(g, adims)};
                },
                "sum_all");
}

Tensor MeanAll(const Tensor& a) {
  return MulScalar(SumAll(a), 1.0 / static_cast<double>(a.NumEl()));
}

Tensor ReduceSum(const Tensor& a, const std::vector<bool>& axes) {
  BWEX_CHECK(static_cast<int>(axes.size()) == a.Value().Rank(),
             "axes mask must match rank");
  int64_t ad[3];
  PadDims3(a.Dims(), ad);
  bool ax[3] = {false, false, false};
  const int r = a.Value().Rank();
  for (int i = 0; i < r; ++i) ax[3 - r + i] = axes[static_cast<size_t>(i)];
  std::vector<int64_t> odims = a.Dims();
  for (int i = 0; i < r; ++i) {
    if (axes[static_cast<size_t>(i)]) odims[static_cast<size_t>(i)] = 1;
  }
  Array out(odims);
  const Array& av = a.Value();
  const int64_t o1 = ax[1] ? 1 : ad[1], o2 = ax[2] ? 1 : ad[2];
  for (int64_t i0 = 0; i0 < ad[0]; ++i0) {
    for (int64_t i1 = 0; i1 < ad[1]; ++i1) {
      const double* arow = av.Data() + (i0 * ad[1] + i1) * ad[2];
      for (int64_t i2 = 0; i2 < ad[2]; ++i2) {
        const int64_t j0 = ax[0] ? 0 : i0, j1 = ax[1] ? 0 : i1, j2 = ax[2] ? 0 : i2;
        out.v[static_cast<size_t>((j0 * o1 + j1) * o2 + j2)] += arow[i2];
      }
    }
  }
  std::vector<int64_t> adims = a.Dims();
  return MakeOp(std::move(out), {a},
                [adims](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{BroadcastTo(g, adims)};
                },
                "reduce_sum");
}

Tensor ReduceMean(const Tensor& a, const std::vector<bool>& axes) {
  int64_t count = 1;
  for (size_t i = 0; i < axes.size(); ++i) {
    if (axes[i]) count *= a.Dims()[i];
  }
  return MulScalar(ReduceSum(a, axes), 1.0 / static_cast<double>(count));
}

Tensor BroadcastTo(const Tensor& a, const std::vector<int64_t>& dims) {
  if (a.Dims() == dims) return a;
  Array target(dims);
  Array out = BinaryEval(a.Value(), target, [](double x, double) { return x; }, "broadcast_to");
  BWEX_CHECK(out.dims == dims, "broadcast_to: ", ShapeStr(a.Dims()), " does not broadcast to ",
             ShapeStr(dims));
  std::vector<int64_t> adims = a.Dims();
  return MakeOp(std::move(out), {a},
                [adims](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{ReduceToShape(g, adims)};
                },
                "broadcast_to");
}

Tensor ReduceToShape(const Tensor& g, const std::vector<int64_t>& dims) {
  if (g.Dims() == dims) return g;
  int64_t gd[3], td[3];
  PadDims3(g.Dims(), gd);
  PadDims3(dims, td);
  std::vector<bool> axes(static_cast<size_t>(g.Value().Rank()), false);
  const int r = g.Value().Rank();
  for (int i = 0; i < 3; ++i) {
    if (td[i] == 1 && gd[i] != 1) {
      int gi = i - (3 - r);
      BWEX_CHECK(gi >= 0, "reduce_to_shape: rank mismatch");
      axes[static_cast<size_t>(gi)] = true;
    } else {
      BWEX_CHECK(td[i] == gd[i], "reduce_to_shape: ", ShapeStr(g.Dims()), " vs ",
                 ShapeStr(dims));
    }
  }
  return Reshape(ReduceSum(g, axes), dims);
}

Tensor Reshape(const Tensor& a, const std::vector<int64_t>& dims) {
  if (a.Dims() == dims) return a;
  int64_t n = 1;
  for (int64_t d : dims) n *= d;
  BWEX_CHECK(n == a.NumEl(), "reshape element count mismatch");
  Array out(dims, a.Value().v);
  std::vector<int64_t> adims = a.Dims();
  return MakeOp(std::move(out), {a},
                [adims](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{Reshape(g, adims)};
                },
                "reshape");
}

Tensor PadTime(const Tensor& x, int64_t left, int64_t right) {
  BWEX_CHECK(x.Value().Rank() == 3 && left >= 0 && right >= 0, "pad_time misuse");
  const Array& a = x.Value();
  const int64_t B = a.Dim(0), C = a.Dim(1), T = a.Dim(2);
  Array out({B, C, T + left + right});
  for (int64_t b = 0; b < B; ++b) {
    for (int64_t c = 0; c < C; ++c) {
      const double* src = a.Data() + (b * C + c) * T;
      double* dst = out.Data() + (b * C + c) * (T + left + right) + left;
      for (int64_t t = 0; t < T; ++t) dst[t] = src[t];
    }
  }
  return MakeOp(std::move(out), {x},
                [left, T](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{SliceTime(g, left, T)};
                },
                "pad_time");
}

Tensor SliceTime(const Tensor& x, int64_t start, int64_t len) {
  BWEX_CHECK(x.Value().Rank() == 3, "slice_time expects rank 3");
  const Array& a = x.Value();
  const int64_t B = a.Dim(0), C = a.Dim(1), T = a.Dim(2);
  BWEX_CHECK(start >= 0 && len > 0 && start + len <= T, "slice_time out of range");
  Array out({B, C, len});
  for (int64_t b = 0; b < B; ++b) {
    for (int64_t c = 0; c < C; ++c) {
      const double* src = a.Data() + (b * C + c) * T + start;
      double* dst = out.Data() + (b * C + c) * len;
      for (int64_t t = 0; t < len; ++t) dst[t] = src[t];
    }
  }
  return MakeOp(std::move(out), {x},
                [start, len, T](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{PadTime(g, start, T - start - len)};
                },
                "slice_time");
}

Tensor SliceChannels(const Tensor& x, int64_t start, int64_t count) {
  BWEX_CHECK(x.Value().Rank() == 3, "slice_channels expects rank 3");
  const Array& a = x.Value();
  const int64_t B = a.Dim(0), C = a.Dim(1), T = a.Dim(2);
  BWEX_CHECK(start >= 0 && count > 0 && start + count <= C, "slice_channels out of range");
  Array out({B, count, T});
  for (int64_t b = 0; b < B; ++b) {
    for (int64_t c = 0; c < count; ++c) {
      const double* src = a.Data() + (b * C + start + c) * T;
      double* dst = out.Data() + (b * count + c) * T;
      for (int64_t t = 0; t < T; ++t) dst[t] = src[t];
    }
  }
  return MakeOp(std::move(out), {x},
                [start, count, C](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{PadChannels(g, start, C - start - count)};
                },
                "slice_channels");
}

Tensor PadChannels(const Tensor& x, int64_t before, int64_t after) {
  BWEX_CHECK(x.Value().Rank() == 3 && before >= 0 && after >= 0, "pad_channels misuse");
  const Array& a = x.Value();
  const int64_t B = a.Dim(0), C = a.Dim(1), T = a.Dim(2);
  Array out({B, C + before + after, T});
  for (int64_t b = 0; b < B; ++b) {
    for (int64_t c = 0; c < C; ++c) {
      const double* src = a.Data() + (b * C + c) * T;
      double* dst = out.Data() + ((b * (C + before + after)) + before + c) * T;
      for (int64_t t = 0; t < T; ++t) dst[t] = src[t];
    }
  }
  return MakeOp(std::move(out), {x},
                [before, C](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{SliceChannels(g, before, C)};
                },
                "pad_channels");
}

Tensor ConcatChannels(const Tensor& a, const Tensor& b) {
  BWEX_CHECK(a.Value().Rank() == 3 && b.Value().Rank() == 3, "concat expects rank 3");
  const int64_t B = a.Dims()[0], Ca = a.Dims()[1], T = a.Dims()[2];
  const int64_t Cb = b.Dims()[1];
  BWEX_CHECK(b.Dims()[0] == B && b.Dims()[2] == T, "concat shape mismatch");
  Array out({B, Ca + Cb, T});
  for (int64_t bb = 0; bb < B; ++bb) {
    double* dst = out.Data() + bb * (Ca + Cb) * T;
    const double* pa = a.Value().Data() + bb * Ca * T;
    const double* pb = b.Value().Data() + bb * Cb * T;
    for (int64_t i = 0; i < Ca * T; ++i) dst[i] = pa[i];
    for (int64_t i = 0; i < Cb * T; ++i) dst[Ca * T + i] = pb[i];
  }
  return MakeOp(std::move(out), {a, b},
                [Ca, Cb](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{SliceChannels(g, 0, Ca),
                                             SliceChannels(g, Ca, Cb)};
                },
                "concat_channels");
}

double MaxAllValue(const Array& a) {
  double m = a.v.empty() ? 0.0 : a.v[0];
  for (double x : a.v) m = std::max(m, x);
  return m;
}

Array ReduceMaxArray(const Array& a, const std::vector<bool>& axes) {
  BWEX_CHECK(static_cast<int>(axes.size()) == a.Rank(), "axes mask must match rank");
  int64_t ad[3];
  PadDims3(a.dims, ad);
  bool ax[3] = {false, false, false};
  const int r = a.Rank();
  for (int i = 0; i < r; ++i) ax[3 - r + i] = axes[static_cast<size_t>(i)];
  std::vector<int64_t> odims = a.dims;
  for (int i = 0; i < r; ++i) {
    if (axes[static_cast<size_t>(i)]) odims[static_cast<size_t>(i)] = 1;
  }
  Array out = Array::Full(odims, -std::numeric_limits<double>::infinity());
  const int64_t o1 = ax[1] ? 1 : ad[1], o2 = ax[2] ? 1 : ad[2];
  for (int64_t i0 = 0; i0 < ad[0]; ++i0) {
    for (int64_t i1 = 0; i1 < ad[1]; ++i1) {
      for (int64_t i2 = 0; i2 < ad[2]; ++i2) {
        const int64_t j0 = ax[0] ? 0 : i0, j1 = ax[1] ? 0 : i1, j2 = ax[2] ? 0 : i2;
        double& slot = out.v[static_cast<size_t>((j0 * o1 + j1) * o2 + j2)];
        slot = std::max(slot, a.v[static_cast<size_t>((i0 * ad[1] + i1) * ad[2] + i2)]);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Convolutions
// ---------------------------------------------------------------------------

Tensor Conv1d(const Tensor& x, const Tensor& w, const ConvGeom& geom) {
  kernels::ConvSpec s = BuildConvSpec(x.Dims(), w.Dims(), geom);
  Array out({s.batch, s.out_ch, s.out_len});
  kernels::Conv1dForward(s, x.Value().Data(), w.Value().Data(), out.Data());
  Tensor xc = x, wc = w;
  const int64_t in_len = s.in_len;
  return MakeOp(std::move(out), {x, w},
                [xc, wc, geom, in_len](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{
                      ConvTranspose1d(g, wc, geom, in_len),
                      ConvGradWeightOp(xc, g, geom, wc.Dims())};
                },
                "conv1d");
}

Tensor ConvTranspose1d(const Tensor& x, const Tensor& w, const ConvGeom& geom,
                       int64_t out_len) {
  // x plays the conv-output role; the result plays the conv-input role.
  std::vector<int64_t> xd = x.Dims();
  BWEX_CHECK(xd.size() == 3 && w.Dims().size() == 3, "conv_transpose expects rank 3");
  std::vector<int64_t> in_role_dims = {xd[0], w.Dims()[1] * geom.groups, out_len};
  kernels::ConvSpec s = BuildConvSpec(in_role_dims, w.Dims(), geom);
  BWEX_CHECK(s.out_ch == xd[1], "conv_transpose channel mismatch");
  BWEX_CHECK(s.out_len == xd[2], "conv_transpose length mismatch: expected ", s.out_len,
             " got ", xd[2]);
  Array out({s.batch, s.in_ch, s.in_len});
  kernels::Conv1dGradInput(s, x.Value().Data(), w.Value().Data(), out.Data());
  Tensor xc = x, wc = w;
  return MakeOp(std::move(out), {x, w},
                [xc, wc, geom](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{
                      Conv1d(g, wc, geom),
                      ConvGradWeightOp(g, xc, geom, wc.Dims())};
                },
                "conv_transpose1d");
}

namespace {

Tensor ConvGradWeightOp(const Tensor& xrole, const Tensor& gyrole,
                        const ConvGeom& geom, const std::vector<int64_t>& wdims) {
  kernels::ConvSpec s = BuildConvSpec(xrole.Dims(), wdims, geom);
  BWEX_CHECK(gyrole.Dims()[0] == s.batch && gyrole.Dims()[1] == s.out_ch &&
                 gyrole.Dims()[2] == s.out_len,
             "grad-weight shape mismatch");
  Array out(wdims);
  kernels::Conv1dGradWeight(s, xrole.Value().Data(), gyrole.Value().Data(), out.Data());
  Tensor xc = xrole, gc = gyrole;
  const int64_t in_len = s.in_len;
  return MakeOp(std::move(out), {xrole, gyrole},
                [xc, gc, geom, in_len](const Tensor& uw, const Tensor&) {
                  return std::vector<Tensor>{
                      ConvTranspose1d(gc, uw, geom, in_len),
                      Conv1d(xc, uw, geom)};
                },
                "conv_grad_weight");
}

}  // namespace

Tensor BiasAdd(const Tensor& x, const Tensor& b) {
  BWEX_CHECK(x.Value().Rank() == 3 && b.Value().Rank() == 1, "bias_add shapes");
  const int64_t B = x.Dims()[0], C = x.Dims()[1], T = x.Dims()[2];
  BWEX_CHECK(b.Dims()[0] == C, "bias size mismatch");
  Array out = x.Value();
  for (int64_t bb = 0; bb < B; ++bb) {
    for (int64_t c = 0; c < C; ++c) {
      double* row = out.Data() + (bb * C + c) * T;
      const double bv = b.Value().v[static_cast<size_t>(c)];
      for (int64_t t = 0; t < T; ++t) row[t] += bv;
    }
  }
  return MakeOp(std::move(out), {x, b},
                [C](const Tensor& g, const Tensor&) {
                  Tensor gb = Reshape(ReduceSum(g, {true, false, true}), {C});
                  return std::vector<Tensor>{g, gb};
                },
                "bias_add");
}

// ---------------------------------------------------------------------------
// Pooling and period folding
// ---------------------------------------------------------------------------

namespace {
Tensor SpreadScale(const Tensor& x, int64_t factor, double scale);
}

Tensor AvgPool1d(const Tensor& x, int64_t factor) {
  BWEX_CHECK(x.Value().Rank() == 3 && factor > 0, "avg_pool misuse");
  const int64_t B = x.Dims()[0], C = x.Dims()[1], T = x.Dims()[2];
  BWEX_CHECK(T % factor == 0, "avg_pool requires length divisible by factor");
  const int64_t To = T / factor;
  Array out({B, C, To});
  for (int64_t bc = 0; bc < B * C; ++bc) {
    const double* src = x.Value().Data() + bc * T;
    double* dst = out.Data() + bc * To;
    for (int64_t t = 0; t < To; ++t) {
      double acc = 0.0;
      for (int64_t k = 0; k < factor; ++k) acc += src[t * factor + k];
      dst[t] = acc / static_cast<double>(factor);
    }
  }
  return MakeOp(std::move(out), {x},
                [factor](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{
                      SpreadScale(g, factor, 1.0 / static_cast<double>(factor))};
                },
                "avg_pool1d");
}

namespace {

// y[t] = x[t / factor] * scale; adjoint of AvgPool1d up to the scale.
Tensor SpreadScale(const Tensor& x, int64_t factor, double scale) {
  const int64_t B = x.Dims()[0], C = x.Dims()[1], T = x.Dims()[2];
  Array out({B, C, T * factor});
  for (int64_t bc = 0; bc < B * C; ++bc) {
    const double* src = x.Value().Data() + bc * T;
    double* dst = out.Data() + bc * T * factor;
    for (int64_t t = 0; t < T * factor; ++t) dst[t] = src[t / factor] * scale;
  }
  return MakeOp(std::move(out), {x},
                [factor, scale](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{
                      MulScalar(AvgPool1d(g, factor), static_cast<double>(factor) * scale)};
                },
                "spread_scale");
}

Tensor UnfoldPeriodOp(const Tensor& y, int64_t period, int64_t batch, int64_t len);

}  // namespace

Tensor FoldPeriod(const Tensor& x, int64_t period) {
  BWEX_CHECK(x.Value().Rank() == 3 && x.Dims()[1] == 1, "fold_period expects (B,1,T)");
  BWEX_CHECK(period > 0, "period must be positive");
  const int64_t B = x.Dims()[0], T = x.Dims()[2];
  const int64_t Tp = (T + period - 1) / period;
  Array out({B * period, 1, Tp});
  for (int64_t b = 0; b < B; ++b) {
    const double* src = x.Value().Data() + b * T;
    for (int64_t r = 0; r < period; ++r) {
      double* dst = out.Data() + (b * period + r) * Tp;
      for (int64_t j = 0; j < Tp; ++j) {
        const int64_t t = j * period + r;
        dst[j] = (t < T) ? src[t] : 0.0;
      }
    }
  }
  return MakeOp(std::move(out), {x},
                [period, B, T](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{UnfoldPeriodOp(g, period, B, T)};
                },
                "fold_period");
}

namespace {

Tensor UnfoldPeriodOp(const Tensor& y, int64_t period, int64_t batch, int64_t len) {
  const int64_t Tp = y.Dims()[2];
  BWEX_CHECK(y.Dims()[0] == batch * period && y.Dims()[1] == 1, "unfold shape mismatch");
  Array out({batch, 1, len});
  for (int64_t b = 0; b < batch; ++b) {
    double* dst = out.Data() + b * len;
    for (int64_t r = 0; r < period; ++r) {
      const double* src = y.Value().Data() + (b * period + r) * Tp;
      for (int64_t j = 0; j < Tp; ++j) {
        const int64_t t = j * period + r;
        if (t < len) dst[t] = src[j];
      }
    }
  }
  return MakeOp(std::move(out), {y},
                [period](const Tensor& g, const Tensor&) {
                  return std::vector<Tensor>{FoldPeriod(g, period)};
                },
                "unfold_period");
}

}  // namespace

// ---------------------------------------------------------------------------
// Drivers
// ---------------------------------------------------------------------------

namespace {

std::vector<std::shared_ptr<Node>> TopoOrder(const std::shared_ptr<Node>& root) {
  std::vector<std::shared_ptr<Node>> order;
  if (!root->requires_grad) return order;
  std::unordered_set<Node*> visited;
  // (node, next parent index) stack for iterative post-order.
  std::vector<std::pair<std::shared_ptr<Node>, size_t>> stack;
  stack.emplace_back(root, 0);
  visited.insert(root.get());
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (idx < node->parents.size()) {
      const Tensor& p = node->parents[idx++];
      if (p.RequiresGrad() && !visited.count(p.node().get())) {
        visited.insert(p.node().get());
        stack.emplace_back(p.node(), 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;  // parents before children; reverse for backprop
}

void SweepBackward(const Tensor& output, const Tensor& seed, bool create_graph,
                   std::unordered_map<Node*, Tensor>* grads,
                   std::vector<std::shared_ptr<Node>>* order_out) {
  std::vector<std::shared_ptr<Node>> order = TopoOrder(output.node());
  (*grads)[output.node().get()] = seed;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = it->get();
    if (!n->backward) continue;
    auto found = grads->find(n);
    if (found == grads->end()) continue;
    Tensor g = found->second;
    std::vector<Tensor> pgrads;
    if (create_graph) {
      pgrads = n->backward(g, Tensor(*it));
    } else {
      NoGradGuard guard;
      pgrads = n->backward(g, Tensor(*it));
    }
    BWEX_CHECK(pgrads.size() == n->parents.size(), "backward arity mismatch in op ", n->op);
    for (size_t i = 0; i < n->parents.size(); ++i) {
      const Tensor& p = n->parents[i];
      if (!p.RequiresGrad()) continue;
      BWEX_CHECK(pgrads[i].Defined(), "missing parent grad in op ", n->op);
      BWEX_CHECK(pgrads[i].Dims() == p.Dims(), "grad shape mismatch in op ", n->op, ": ",
                 ShapeStr(pgrads[i].Dims()), " vs ", ShapeStr(p.Dims()));
      auto slot = grads->find(p.node().get());
      if (slot == grads->end()) {
        (*grads)[p.node().get()] = pgrads[i];
      } else if (create_graph) {
        slot->second = Add(slot->second, pgrads[i]);
      } else {
        NoGradGuard guard;
        slot->second = Add(slot->second, pgrads[i]);
      }
    }
  }
  if (order_out != nullptr) *order_out = std::move(order);
}

}  // namespace

std::vector<Tensor> Grad(const Tensor& output, const std::vector<Tensor>& wrt,
                         bool create_graph, const Tensor& grad_output) {
  BWEX_CHECK(output.Defined(), "grad of undefined tensor");
  Tensor seed = grad_output;
  if (!seed.Defined()) {
    BWEX_CHECK(output.NumEl() == 1, "grad of non-scalar requires grad_output");
    seed = Constant(Array::Full(output.Dims(), 1.0));
  } else {
    BWEX_CHECK(seed.Dims() == output.Dims(), "grad_output shape mismatch");
  }
  std::unordered_map<Node*, Tensor> grads;
  if (output.RequiresGrad()) {
    SweepBackward(output, seed, create_graph, &grads, nullptr);
  }
  std::vector<Tensor> result;
  result.reserve(wrt.size());
  for (const Tensor& t : wrt) {
    auto it = grads.find(t.node().get());
    if (it != grads.end()) {
      result.push_back(it->second);
    } else {
      result.push_back(Constant(Array(t.Dims())));
    }
  }
  return result;
}

void Backward(const Tensor& loss) {
  BWEX_CHECK(loss.Defined() && loss.NumEl() == 1, "backward expects a scalar loss");
  if (!loss.RequiresGrad()) return;
  Tensor seed = Constant(Array::Full(loss.Dims(), 1.0));
  std::unordered_map<Node*, Tensor> grads;
  std::vector<std::shared_ptr<Node>> order;
  SweepBackward(loss, seed, /*create_graph=*/false, &grads, &order);
  for (const auto& node : order) {
    if (node->backward || !node->requires_grad) continue;  // leaves only
    auto it = grads.find(node.get());
    if (it == grads.end()) continue;
    if (!node->leaf_grad) {
      node->leaf_grad = std::make_unique<Array>(node->value.dims);
    }
    const Array& g = it->second.Value();
    Array& acc = *node->leaf_grad;
    for (size_t i = 0; i < acc.v.size(); ++i) acc.v[i] += g.v[i];
  }
}

}  // namespace ag
}  // namespace bwex
