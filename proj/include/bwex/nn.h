// include/bwex/nn.h

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

#ifndef BWEX_NN_H_
#define BWEX_NN_H_

#include <map>
#include <string>
#include <vector>

#include "bwex/autograd.h"
#include "bwex/rng.h"

namespace bwex {
namespace nn {

// A named trainable tensor.  Copies share the underlying node, so optimizer
// updates through one handle are visible through all of them.
struct Parameter {
  std::string name;
  ag::Tensor t;
};

int64_t CountParams(const std::vector<Parameter>& params);

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)); the conventional default for
// convolutional and linear weights.
void InitUniformFanIn(Array* w, int64_t fan_in, Rng* rng);

class Conv1dLayer {
 public:
  Conv1dLayer() = default;
  Conv1dLayer(std::string name, int64_t in_ch, int64_t out_ch, int64_t kernel,
              ag::ConvGeom geom, bool bias, Rng* rng);
  ag::Tensor Forward(const ag::Tensor& x) const;
  void CollectParams(std::vector<Parameter>* out) const;
  const ag::Tensor& Weight() const { return weight_; }

 private:
  std::string name_;
  ag::ConvGeom geom_;
  ag::Tensor weight_;  // (out_ch, in_ch/groups, kernel)
  ag::Tensor bias_;    // (out_ch) when enabled
  bool has_bias_ = false;
};

class ConvTranspose1dLayer {
 public:
  ConvTranspose1dLayer() = default;
  ConvTranspose1dLayer(std::string name, int64_t in_ch, int64_t out_ch,
                       int64_t kernel, ag::ConvGeom geom, bool bias, Rng* rng);
  // Output length is fully determined by the adjoint geometry:
  // (T-1)*stride + (kernel-1)*dilation + 1 - pad_left - pad_right.
  ag::Tensor Forward(const ag::Tensor& x) const;
  void CollectParams(std::vector<Parameter>* out) const;

 private:
  std::string name_;
  ag::ConvGeom geom_;
  int64_t kernel_ = 0;
  ag::Tensor weight_;  // (in_ch, out_ch/groups, kernel)
  ag::Tensor bias_;    // (out_ch) when enabled
  bool has_bias_ = false;
};

// Fully connected layer on (B, D) tensors, realized as a width-1 convolution.
class LinearLayer {
 public:
  LinearLayer() = default;
  LinearLayer(std::string name, int64_t in_dim, int64_t out_dim, bool bias,
              Rng* rng);
  ag::Tensor Forward(const ag::Tensor& x) const;
  void CollectParams(std::vector<Parameter>* out) const;
  const ag::Tensor& Weight() const { return weight_; }

 private:
  std::string name_;
  int64_t in_dim_ = 0, out_dim_ = 0;
  ag::Tensor weight_;  // (out_dim, in_dim, 1)
  ag::Tensor bias_;
  bool has_bias_ = false;
};

// Single shared slope, initialized to 0.25.
class PReLULayer {
 public:
  PReLULayer() = default;
  explicit PReLULayer(std::string name);
  ag::Tensor Forward(const ag::Tensor& x) const;
  void CollectParams(std::vector<Parameter>* out) const;

 private:
  std::string name_;
  ag::Tensor a_;
};

// Global layer norm: per-sample statistics over channels and time, then a
// per-channel affine transform.
class GlobalLayerNormLayer {
 public:
  GlobalLayerNormLayer() = default;
  GlobalLayerNormLayer(std::string name, int64_t channels, double eps = 1e-8);
  ag::Tensor Forward(const ag::Tensor& x) const;
  void CollectParams(std::vector<Parameter>* out) const;

 private:
  std::string name_;
  double eps_ = 1e-8;
  ag::Tensor gamma_;  // (1, C, 1)
  ag::Tensor beta_;   // (1, C, 1)
};

// Channel layer norm: statistics over channels at each time step, then a
// per-channel affine transform.  Unlike global layer norm this keeps the
// network causal in extent: an output frame depends only on input frames
// inside its convolutional receptive field.
class ChannelLayerNormLayer {
 public:
  ChannelLayerNormLayer() = default;
  ChannelLayerNormLayer(std::string name, int64_t channels, double eps = 1e-8);
  ag::Tensor Forward(const ag::Tensor& x) const;
  void CollectParams(std::vector<Parameter>* out) const;

 private:
  std::string name_;
  double eps_ = 1e-8;
  ag::Tensor gamma_;  // (1, C, 1)
  ag::Tensor beta_;   // (1, C, 1)
};

// Adam with bias correction.  State serializes into named arrays so training
// resumes bit for bit from a checkpoint.
class Adam {
 public:
  Adam() = default;
  Adam(std::vector<Parameter> params, double lr, double beta1 = 0.9,
       double beta2 = 0.999, double eps = 1e-8);
  void Step();
  void ZeroGrad();
  void SetLr(double lr) { lr_ = lr; }
  double Lr() const { return lr_; }
  int64_t StepCount() const { return t_; }
  const std::vector<Parameter>& Params() const { return params_; }

  // State keys are "opt.<prefix>.m.<param>", "opt.<prefix>.v.<param>" and
  // "opt.<prefix>.t".
  void SaveState(const std::string& prefix, std::map<std::string, Array>* out) const;
  void LoadState(const std::string& prefix, const std::map<std::string, Array>& in);

 private:
  std::vector<Parameter> params_;
  std::vector<Array> m_, v_;
  double lr_ = 1e-3, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  int64_t t_ = 0;
};

// Scales all gradients so their global l2 norm is at most max_norm.
// Returns the norm before clipping.
double ClipGradNorm(const std::vector<Parameter>& params, double max_norm);

// Copies parameter values (used for divergence-recovery snapshots).
std::map<std::string, Array> SnapshotValues(const std::vector<Parameter>& params);
void RestoreValues(const std::map<std::string, Array>& snap,
                   const std::vector<Parameter>& params);

}  // namespace nn
}  // namespace bwex

#endif  // BWEX_NN_H_
