// src/core/nn.cc

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

#include "bwex/nn.h"

#include <cmath>

namespace bwex {
namespace nn {

using ag::Tensor;

int64_t CountParams(const std::vector<Parameter>& params) {
  int64_t n = 0;
  for (const Parameter& p : params) n += p.t.NumEl();
  return n;
}

void InitUniformFanIn(Array* w, int64_t fan_in, Rng* rng) {
  BWEX_CHECK(fan_in > 0, "fan_in must be positive");
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (double& x : w->v) x = (2.0 * rng->Uniform() - 1.0) * bound;
}

Conv1dLayer::Conv1dLayer(std::string name, int64_t in_ch, int64_t out_ch,
                         int64_t kernel, ag::ConvGeom geom, bool bias, Rng* rng)
    : name_(std::move(name)), geom_(geom), has_bias_(bias) {
  BWEX_CHECK(in_ch % geom.groups == 0, "in_ch not divisible by groups");
  Array w({out_ch, in_ch / geom.groups, kernel});
  const int64_t fan_in = (in_ch / geom.groups) * kernel;
  InitUniformFanIn(&w, fan_in, rng);
  weight_ = Tensor(std::move(w), /*requires_grad=*/true);
  if (bias) {
    Array b({out_ch});
    InitUniformFanIn(&b, fan_in, rng);
    bias_ = Tensor(std::move(b), /*requires_grad=*/true);
  }
}

Tensor Conv1dLayer::Forward(const Tensor& x) const {
  Tensor y = ag::Conv1d(x, weight_, geom_);
  if (has_bias_) y = ag::BiasAdd(y, bias_);
  return y;
}

void Conv1dLayer::CollectParams(std::vector<Parameter>* out) const {
  out->push_back({name_ + ".w", weight_});
  if (has_bias_) out->push_back({name_ + ".b", bias_});
}

ConvTranspose1dLayer::ConvTranspose1dLayer(std::string name, int64_t in_ch,
                                           int64_t out_ch, int64_t kernel,
                                           ag::ConvGeom geom, bool bias, Rng* rng)
    : name_(std::move(name)), geom_(geom), kernel_(kernel), has_bias_(bias) {
  BWEX_CHECK(out_ch % geom.groups == 0, "out_ch not divisible by groups");
  Array w({in_ch, out_ch / geom.groups, kernel});
  const int64_t fan_in = (out_ch / geom.groups) * kernel;
  InitUniformFanIn(&w, fan_in, rng);
  weight_ = Tensor(std::move(w), /*requires_grad=*/true);
  if (bias) {
    Array b({out_ch});
    InitUniformFanIn(&b, fan_in, rng);
    bias_ = Tensor(std::move(b), /*requires_grad=*/true);
  }
}

Tensor ConvTranspose1dLayer::Forward(const Tensor& x) const {
  const int64_t t_in = x.Dims()[2];
  const int64_t out_len = (t_in - 1) * geom_.stride + (kernel_ - 1) * geom_.dilation +
                          1 - geom_.pad_left - geom_.pad_right;
  BWEX_CHECK(out_len > 0, "transposed conv produces empty output");
  Tensor y = ag::ConvTranspose1d(x, weight_, geom_, out_len);
  if (has_bias_) y = ag::BiasAdd(y, bias_);
  return y;
}

void ConvTranspose1dLayer::CollectParams(std::vector<Parameter>* out) const {
  out->push_back({name_ + ".w", weight_});
  if (has_bias_) out->push_back({name_ + ".b", bias_});
}

LinearLayer::LinearLayer(std::string name, int64_t in_dim, int64_t out_dim,
                         bool bias, Rng* rng)
    : name_(std::move(name)), in_dim_(in_dim), out_dim_(out_dim), has_bias_(bias) {
  Array w({out_dim, in_dim, 1});
  InitUniformFanIn(&w, in_dim, rng);
  weight_ = Tensor(std::move(w), /*requires_grad=*/true);
  if (bias) {
    Array b({out_dim});
    InitUniformFanIn(&b, in_dim, rng);
    bias_ = Tensor(std::move(b), /*requires_grad=*/true);
  }
}

Tensor LinearLayer::Forward(const Tensor& x) const {
  BWEX_CHECK(x.Value().Rank() == 2 && x.Dims()[1] == in_dim_,
             "linear expects (B, ", in_dim_, "), got ", ShapeStr(x.Dims()));
  const int64_t batch = x.Dims()[0];
  Tensor h = ag::Reshape(x, {batch, in_dim_, 1});
  Tensor y = ag::Conv1d(h, weight_, ag::ConvGeom());
  if (has_bias_) y = ag::BiasAdd(y, bias_);
  return ag::Reshape(y, {batch, out_dim_});
}

void LinearLayer::CollectParams(std::vector<Parameter>* out) const {
  out->push_back({name_ + ".w", weight_});
  if (has_bias_) out->push_back({name_ + ".b", bias_});
}

PReLULayer::PReLULayer(std::string name) : name_(std::move(name)) {
  a_ = Tensor(Array::Full({1}, 0.25), /*requires_grad=*/true);
}

Tensor PReLULayer::Forward(const Tensor& x) const {
  // max(0, x) + a * min(0, x)
  return ag::Sub(ag::Relu(x), ag::Mul(a_, ag::Relu(ag::Neg(x))));
}

void PReLULayer::CollectParams(std::vector<Parameter>* out) const {
  out->push_back({name_ + ".a", a_});
}

GlobalLayerNormLayer::GlobalLayerNormLayer(std::string name, int64_t channels,
                                           double eps)
    : name_(std::move(name)), eps_(eps) {
  gamma_ = Tensor(Array::Full({1, channels, 1}, 1.0), /*requires_grad=*/true);
  beta_ = Tensor(Array({1, channels, 1}), /*requires_grad=*/true);
}

Tensor GlobalLayerNormLayer::Forward(const Tensor& x) const {
  const std::vector<bool> over_ct = {false, true, true};
  Tensor mu = ag::ReduceMean(x, over_ct);
  Tensor centered = ag::Sub(x, mu);
  Tensor var = ag::ReduceMean(ag::Square(centered), over_ct);
  Tensor xhat = ag::Div(centered, ag::Sqrt(ag::AddScalar(var, eps_)));
  return ag::Add(ag::Mul(xhat, gamma_), beta_);
}

void GlobalLayerNormLayer::CollectParams(std::vector<Parameter>* out) const {
  out->push_back({name_ + ".gamma", gamma_});
  out->push_back({name_ + ".beta", beta_});
}

ChannelLayerNormLayer::ChannelLayerNormLayer(std::string name, int64_t channels,
                                             double eps)
    : name_(std::move(name)), eps_(eps) {
  gamma_ = Tensor(Array::Full({1, channels, 1}, 1.0), /*requires_grad=*/true);
  beta_ = Tensor(Array({1, channels, 1}), /*requires_grad=*/true);
}

Tensor ChannelLayerNormLayer::Forward(const Tensor& x) const {
  const std::vector<bool> over_c = {false, true, false};
  Tensor mu = ag::ReduceMean(x, over_c);
  Tensor centered = ag::Sub(x, mu);
  Tensor var = ag::ReduceMean(ag::Square(centered), over_c);
  Tensor xhat = ag::Div(centered, ag::Sqrt(ag::AddScalar(var, eps_)));
  return ag::Add(ag::Mul(xhat, gamma_), beta_);
}

void ChannelLayerNormLayer::CollectParams(std::vector<Parameter>* out) const {
  out->push_back({name_ + ".gamma", gamma_});
  out->push_back({name_ + ".beta", beta_});
}

Adam::Adam(std::vector<Parameter> params, double lr, double beta1, double beta2,
           double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Parameter& p : params_) {
    m_.emplace_back(p.t.Dims());
    v_.emplace_back(p.t.Dims());
  }
}

void Adam::Step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (size_t i = 0; i < params_.size(); ++i) {
    Parameter& p = params_[i];
    const Array& g = p.t.Grad();
    Array& val = p.t.MutableValue();
    Array& m = m_[i];
    Array& v = v_[i];
    for (size_t j = 0; j < val.v.size(); ++j) {
      const double gj = g.v[j];
      m.v[j] = beta1_ * m.v[j] + (1.0 - beta1_) * gj;
      v.v[j] = beta2_ * v.v[j] + (1.0 - beta2_) * gj * gj;
      const double mhat = m.v[j] / bc1;
      const double vhat = v.v[j] / bc2;
      val.v[j] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

void Adam::ZeroGrad() {
  for (Parameter& p : params_) p.t.ZeroGrad();
}

void Adam::SaveState(const std::string& prefix, std::map<std::string, Array>* out) const {
  for (size_t i = 0; i < params_.size(); ++i) {
    (*out)["opt." + prefix + ".m." + params_[i].name] = m_[i];
    (*out)["opt." + prefix + ".v." + params_[i].name] = v_[i];
  }
  (*out)["opt." + prefix + ".t"] = Array::Scalar(static_cast<double>(t_));
}

void Adam::LoadState(const std::string& prefix, const std::map<std::string, Array>& in) {
  for (size_t i = 0; i < params_.size(); ++i) {
    auto mi = in.find("opt." + prefix + ".m." + params_[i].name);
    auto vi = in.find("opt." + prefix + ".v." + params_[i].name);
    BWEX_CHECK(mi != in.end() && vi != in.end(), "optimizer state missing for ",
               params_[i].name);
    BWEX_CHECK(mi->second.dims == params_[i].t.Dims(), "optimizer state shape mismatch");
    m_[i] = mi->second;
    v_[i] = vi->second;
  }
  auto ti = in.find("opt." + prefix + ".t");
  BWEX_CHECK(ti != in.end(), "optimizer step count missing");
  t_ = static_cast<int64_t>(ti->second.v[0]);
}

double ClipGradNorm(const std::vector<Parameter>& params, double max_norm) {
  double sq = 0.0;
  for (const Parameter& p : params) {
    Tensor t = p.t;
    const Array& g = t.Grad();
    for (double x : g.v) sq += x * x;
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (const Parameter& p : params) {
      Tensor t = p.t;
      for (double& x : t.Grad().v) x *= scale;
    }
  }
  return norm;
}

std::map<std::string, Array> SnapshotValues(const std::vector<Parameter>& params) {
  std::map<std::string, Array> snap;
  for (const Parameter& p : params) snap[p.name] = p.t.Value();
  return snap;
}

void RestoreValues(const std::map<std::string, Array>& snap,
                   const std::vector<Parameter>& params) {
  for (const Parameter& p : params) {
    auto it = snap.find(p.name);
    BWEX_CHECK(it != snap.end(), "snapshot missing parameter ", p.name);
    BWEX_CHECK(it->second.dims == p.t.Dims(), "snapshot shape mismatch for ", p.name);
    Tensor t = p.t;
    t.MutableValue() = it->second;
  }
}

}  // namespace nn
}  // namespace bwex
