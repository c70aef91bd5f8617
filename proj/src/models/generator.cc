// src/models/generator.cc

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

#include "bwex/models.h"

#include <string>
#include <utility>
#include <vector>

#include "bwex/common.h"

namespace bwex {

using ag::Tensor;

void ValidateGeneratorConfig(const GeneratorConfig& c) {
  BWEX_CHECK(c.enc_channels > 0, "enc_channels must be positive");
  BWEX_CHECK(c.enc_kernel > 0, "enc_kernel must be positive");
  BWEX_CHECK(c.enc_stride > 0, "enc_stride must be positive");
  BWEX_CHECK(c.enc_kernel >= c.enc_stride, "enc_kernel must cover the stride");
  BWEX_CHECK((c.enc_kernel - c.enc_stride) % 2 == 0,
             "enc_kernel minus enc_stride must be even for symmetric padding");
  BWEX_CHECK(c.sep_stacks > 0, "sep_stacks must be positive");
  BWEX_CHECK(c.sep_layers_per_stack > 0, "sep_layers_per_stack must be positive");
  BWEX_CHECK(c.sep_in_channels > 0, "sep_in_channels must be positive");
  BWEX_CHECK(c.sep_hidden_channels > 0, "sep_hidden_channels must be positive");
  BWEX_CHECK(c.dilation_growth > 0, "dilation_growth must be positive");
  BWEX_CHECK(c.dec_out_channels == 1, "decoder emits a single waveform channel");
}

std::string GeneratorConfigJson(const GeneratorConfig& c) {
  return StrCat("{\"enc_channels\":", c.enc_channels,
                ",\"enc_kernel\":", c.enc_kernel,
                ",\"enc_stride\":", c.enc_stride,
                ",\"sep_stacks\":", c.sep_stacks,
                ",\"sep_layers_per_stack\":", c.sep_layers_per_stack,
                ",\"sep_in_channels\":", c.sep_in_channels,
                ",\"sep_hidden_channels\":", c.sep_hidden_channels,
                ",\"dilation_growth\":", c.dilation_growth,
                ",\"dec_out_channels\":", c.dec_out_channels, "}");
}

Generator::Generator(const GeneratorConfig& c, uint64_t seed) : config_(c) {
  ValidateGeneratorConfig(c);
  Rng rng(seed);
  const int64_t pad = (c.enc_kernel - c.enc_stride) / 2;

  ag::ConvGeom enc_geom;
  enc_geom.stride = c.enc_stride;
  enc_geom.pad_left = pad;
  enc_geom.pad_right = pad;
  encoder_ = nn::Conv1dLayer("gen.enc", 1, c.enc_channels, c.enc_kernel,
                             enc_geom, /*bias=*/false, &rng);
  enc_norm_ = nn::ChannelLayerNormLayer("gen.enc_norm", c.enc_channels);
  bottleneck_ = nn::Conv1dLayer("gen.bottleneck", c.enc_channels,
                                c.sep_in_channels, 1, ag::ConvGeom(),
                                /*bias=*/true, &rng);

  const int64_t total_layers = c.sep_stacks * c.sep_layers_per_stack;
  for (int64_t s = 0; s < c.sep_stacks; ++s) {
    for (int64_t l = 0; l < c.sep_layers_per_stack; ++l) {
      const int64_t index = s * c.sep_layers_per_stack + l;
      Block b;
      b.dilation = 1;
      for (int64_t e = 0; e < l / 2; ++e) b.dilation *= c.dilation_growth;
      const std::string p = StrCat("gen.block", index, ".");
      b.in1x1 = nn::Conv1dLayer(p + "in", c.sep_in_channels,
                                c.sep_hidden_channels, 1, ag::ConvGeom(),
                                true, &rng);
      b.prelu1 = nn::PReLULayer(p + "prelu1");
      b.norm1 = nn::ChannelLayerNormLayer(p + "norm1", c.sep_hidden_channels);
      ag::ConvGeom dw_geom;
      dw_geom.dilation = b.dilation;
      dw_geom.groups = c.sep_hidden_channels;
      dw_geom.pad_left = b.dilation;
      dw_geom.pad_right = b.dilation;
      b.depthwise = nn::Conv1dLayer(p + "dw", c.sep_hidden_channels,
                                    c.sep_hidden_channels, 3, dw_geom, true,
                                    &rng);
      b.prelu2 = nn::PReLULayer(p + "prelu2");
      b.norm2 = nn::ChannelLayerNormLayer(p + "norm2", c.sep_hidden_channels);
      b.has_residual = index + 1 < total_layers;
      if (b.has_residual) {
        b.residual = nn::Conv1dLayer(p + "res", c.sep_hidden_channels,
                                     c.sep_in_channels, 1, ag::ConvGeom(),
                                     true, &rng);
      }
      b.skip = nn::Conv1dLayer(p + "skip", c.sep_hidden_channels,
                               c.sep_in_channels, 1, ag::ConvGeom(), true,
                               &rng);
      blocks_.push_back(std::move(b));
    }
  }

  out_prelu_ = nn::PReLULayer("gen.out_prelu");
  mask_ = nn::Conv1dLayer("gen.mask", c.sep_in_channels, c.enc_channels, 1,
                          ag::ConvGeom(), true, &rng);
  ag::ConvGeom dec_geom;
  dec_geom.stride = c.enc_stride;
  dec_geom.pad_left = pad;
  dec_geom.pad_right = pad;
  decoder_ = nn::ConvTranspose1dLayer("gen.dec", c.enc_channels,
                                      c.dec_out_channels, c.enc_kernel,
                                      dec_geom, /*bias=*/true, &rng);
}

Tensor Generator::Forward(const Tensor& x) const {
  BWEX_CHECK(x.Value().Rank() == 3 && x.Dims()[1] == 1,
             "generator expects (B, 1, L), got ", ShapeStr(x.Dims()));
  const int64_t in_len = x.Dims()[2];
  BWEX_CHECK(in_len >= config_.enc_kernel, "input length ", in_len,
             " shorter than the encoder kernel ", config_.enc_kernel);

  const int64_t stride = config_.enc_stride;
  const int64_t padded = (in_len + stride - 1) / stride * stride;
  Tensor h = x;
  if (padded != in_len) h = ag::PadTime(h, 0, padded - in_len);

  Tensor enc = encoder_.Forward(h);  // (B, C, padded / stride)
  Tensor y = bottleneck_.Forward(enc_norm_.Forward(enc));
  Tensor skip_sum;
  for (const Block& b : blocks_) {
    Tensor t = b.norm1.Forward(b.prelu1.Forward(b.in1x1.Forward(y)));
    t = b.norm2.Forward(b.prelu2.Forward(b.depthwise.Forward(t)));
    if (b.has_residual) y = ag::Add(y, b.residual.Forward(t));
    Tensor s = b.skip.Forward(t);
    skip_sum = skip_sum.Defined() ? ag::Add(skip_sum, s) : s;
  }
  Tensor mask = ag::Sigmoid(mask_.Forward(out_prelu_.Forward(skip_sum)));
  Tensor out = decoder_.Forward(ag::Mul(mask, enc));  // (B, 1, padded)
  if (padded != in_len) out = ag::SliceTime(out, 0, in_len);
  return out;
}

std::vector<nn::Parameter> Generator::Params() const {
  std::vector<nn::Parameter> p;
  encoder_.CollectParams(&p);
  enc_norm_.CollectParams(&p);
  bottleneck_.CollectParams(&p);
  for (const Block& b : blocks_) {
    b.in1x1.CollectParams(&p);
    b.prelu1.CollectParams(&p);
    b.norm1.CollectParams(&p);
    b.depthwise.CollectParams(&p);
    b.prelu2.CollectParams(&p);
    b.norm2.CollectParams(&p);
    if (b.has_residual) b.residual.CollectParams(&p);
    b.skip.CollectParams(&p);
  }
  out_prelu_.CollectParams(&p);
  mask_.CollectParams(&p);
  decoder_.CollectParams(&p);
  return p;
}

}  // namespace bwex
