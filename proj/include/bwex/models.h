// include/bwex/models.h

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

#ifndef BWEX_MODELS_H_
#define BWEX_MODELS_H_

#include <string>
#include <vector>

#include "bwex/autograd.h"
#include "bwex/nn.h"

namespace bwex {

// Time-domain mask-and-resynthesize upsampler: strided conv encoder, a stack
// of dilated depthwise blocks producing a sigmoid mask over the encoder
// representation, and a transposed-conv decoder back to one channel.
struct GeneratorConfig {
  int64_t enc_channels = 128;
  int64_t enc_kernel = 16;   // samples
  int64_t enc_stride = 8;    // samples
  int64_t sep_stacks = 1;
  int64_t sep_layers_per_stack = 8;
  int64_t sep_in_channels = 128;
  int64_t sep_hidden_channels = 512;
  // Depthwise dilation doubles every second layer (1,1,2,2,4,4,...), keeping
  // the receptive field at 32 ms for the default depth.
  int64_t dilation_growth = 2;
  int64_t dec_out_channels = 1;
};

void ValidateGeneratorConfig(const GeneratorConfig& c);
std::string GeneratorConfigJson(const GeneratorConfig& c);

class Generator {
 public:
  Generator() = default;
  Generator(const GeneratorConfig& c, uint64_t seed);

  // (B, 1, L) -> (B, 1, L) for any L >= enc_kernel.  Input is padded to a
  // stride multiple internally and the tail is trimmed back.
  ag::Tensor Forward(const ag::Tensor& x) const;

  std::vector<nn::Parameter> Params() const;
  const GeneratorConfig& Config() const { return config_; }

 private:
  struct Block {
    nn::Conv1dLayer in1x1;
    nn::PReLULayer prelu1;
    nn::ChannelLayerNormLayer norm1;
    nn::Conv1dLayer depthwise;
    nn::PReLULayer prelu2;
    nn::ChannelLayerNormLayer norm2;
    nn::Conv1dLayer residual;  // absent on the last block (skip-only)
    nn::Conv1dLayer skip;
    bool has_residual = false;
    int64_t dilation = 1;
  };

  GeneratorConfig config_;
  nn::Conv1dLayer encoder_;
  nn::ChannelLayerNormLayer enc_norm_;
  nn::Conv1dLayer bottleneck_;
  std::vector<Block> blocks_;
  nn::PReLULayer out_prelu_;
  nn::Conv1dLayer mask_;
  nn::ConvTranspose1dLayer decoder_;
};

// Near-perfect-reconstruction 4-band filter bank built from a Kaiser-windowed
// prototype, cosine-modulated per band.  Analysis and synthesis are plain
// convolutions so gradients flow through both.
class Pqmf {
 public:
  Pqmf();  // 4 bands, order-62 prototype

  // (B, 1, T) -> (B, 4, ceil(T/4)); input is zero-padded to a multiple of 4.
  ag::Tensor Analysis(const ag::Tensor& x) const;
  // (B, 4, T4) -> (B, 1, out_len).
  ag::Tensor Synthesis(const ag::Tensor& subbands, int64_t out_len) const;

  static constexpr int64_t kBands = 4;
  // Coefficient count of the order-62 prototype; the odd length centers the
  // filter on an integer sample, which the reconstruction accuracy needs.
  static constexpr int64_t kTaps = 63;

 private:
  ag::Tensor analysis_;   // (4, 1, 62)
  ag::Tensor synthesis_;  // (4, 1, 62), time-reversed modulation, gain 4
};

enum class DiscKind {
  kPwg,
  kMelgan,
  kMelganMs,
  kHifiganMp,
  kHifiganMs,
  kHifiganMsmp,
  kStylemelgan,
};

DiscKind DiscKindFromString(const std::string& s);
std::string DiscKindToString(DiscKind k);

struct DiscriminatorConfig {
  DiscKind kind = DiscKind::kPwg;
  std::vector<int64_t> periods = {2, 3, 5, 7};  // hifigan_mp sub-discriminators
};

void ValidateDiscriminatorConfig(const DiscriminatorConfig& c);
std::string DiscriminatorConfigJson(const DiscriminatorConfig& c);

// One sub-discriminator's outputs: the final score map plus every hidden
// post-activation tensor ordered shallow to deep (feature-matching input).
struct SubOutput {
  ag::Tensor score;
  std::vector<ag::Tensor> activations;
};

class Discriminator {
 public:
  Discriminator() = default;
  Discriminator(const DiscriminatorConfig& c, uint64_t seed);

  // (B, 1, T) -> one SubOutput per sub-discriminator.
  std::vector<SubOutput> Forward(const ag::Tensor& x) const;

  int64_t NumSubs() const { return static_cast<int64_t>(subs_.size()); }
  std::vector<nn::Parameter> Params() const;
  const DiscriminatorConfig& Config() const { return config_; }

 private:
  enum class InputTransform { kIdentity, kAvgPool, kFoldPeriod, kPqmfBand };

  struct Sub {
    std::vector<nn::Conv1dLayer> layers;
    double slope = 0.1;
    InputTransform transform = InputTransform::kIdentity;
    int64_t transform_arg = 0;  // pool factor, fold period, or band index
  };

  SubOutput RunSub(const Sub& sub, const ag::Tensor& x) const;

  DiscriminatorConfig config_;
  std::vector<Sub> subs_;
  Pqmf pqmf_;  // stylemelgan input analysis
};

}  // namespace bwex

#endif  // BWEX_MODELS_H_
