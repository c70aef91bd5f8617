// src/models/discriminator.cc

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

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bwex/common.h"

namespace bwex {

using ag::Tensor;

DiscKind DiscKindFromString(const std::string& s) {
  if (s == "pwg") return DiscKind::kPwg;
  if (s == "melgan") return DiscKind::kMelgan;
  if (s == "melgan_ms") return DiscKind::kMelganMs;
  if (s == "hifigan_mp") return DiscKind::kHifiganMp;
  if (s == "hifigan_ms") return DiscKind::kHifiganMs;
  if (s == "hifigan_msmp") return DiscKind::kHifiganMsmp;
  if (s == "stylemelgan") return DiscKind::kStylemelgan;
  throw InvalidArgument(StrCat("unknown discriminator kind: ", s));
}

std::string DiscKindToString(DiscKind k) {
  switch (k) {
    case DiscKind::kPwg: return "pwg";
    case DiscKind::kMelgan: return "melgan";
    case DiscKind::kMelganMs: return "melgan_ms";
    case DiscKind::kHifiganMp: return "hifigan_mp";
    case DiscKind::kHifiganMs: return "hifigan_ms";
    case DiscKind::kHifiganMsmp: return "hifigan_msmp";
    case DiscKind::kStylemelgan: return "stylemelgan";
  }
  throw InvalidArgument("unknown discriminator kind enum value");
}

void ValidateDiscriminatorConfig(const DiscriminatorConfig& c) {
  DiscKindToString(c.kind);  // rejects out-of-range enum values
  if (c.kind == DiscKind::kHifiganMp || c.kind == DiscKind::kHifiganMsmp) {
    BWEX_CHECK(!c.periods.empty(), "periods must be nonempty");
    std::set<int64_t> seen;
    for (int64_t p : c.periods) {
      BWEX_CHECK(p > 0, "periods must be positive, got ", p);
      BWEX_CHECK(seen.insert(p).second, "duplicate period ", p);
    }
  }
}

std::string DiscriminatorConfigJson(const DiscriminatorConfig& c) {
  std::string periods;
  for (size_t i = 0; i < c.periods.size(); ++i) {
    periods += (i ? "," : "");
    periods += StrCat(c.periods[i]);
  }
  return StrCat("{\"kind\":\"", DiscKindToString(c.kind), "\",\"periods\":[",
                periods, "]}");
}

namespace {

struct LayerSpec {
  int64_t out_ch;
  int64_t kernel;
  int64_t stride = 1;
  int64_t dilation = 1;
  int64_t groups = 1;
};

std::vector<nn::Conv1dLayer> BuildLadder(const std::string& prefix,
                                         const std::vector<LayerSpec>& specs,
                                         Rng* rng) {
  std::vector<nn::Conv1dLayer> layers;
  int64_t in_ch = 1;
  for (size_t i = 0; i < specs.size(); ++i) {
    const LayerSpec& s = specs[i];
    ag::ConvGeom g;
    g.stride = s.stride;
    g.dilation = s.dilation;
    g.groups = s.groups;
    g.pad_left = (s.kernel - 1) / 2 * s.dilation;
    g.pad_right = (s.kernel - 1) / 2 * s.dilation;
    layers.emplace_back(StrCat(prefix, ".layer", i), in_ch, s.out_ch, s.kernel,
                        g, /*bias=*/true, rng);
    in_ch = s.out_ch;
  }
  return layers;
}

// Ten dilated layers at constant width; dilation rises linearly over the
// interior layers.
std::vector<LayerSpec> PwgSpecs() {
  std::vector<LayerSpec> specs;
  specs.push_back({80, 3});
  for (int64_t i = 2; i <= 9; ++i) specs.push_back({80, 3, 1, i - 1});
  specs.push_back({1, 3});
  return specs;
}

// Seven layers; the four stride-4 stages use channel grouping of in/4.  The
// channel ladder is capped for the subband variant so the four-sub bank
// lands on its published size.
std::vector<LayerSpec> MelganSpecs(int64_t cap) {
  const int64_t raw[] = {16, 64, 256, 1024, 1024, 1024, 1};
  const int64_t kernels[] = {15, 41, 41, 41, 41, 5, 3};
  std::vector<LayerSpec> specs;
  int64_t in_ch = 1;
  for (int i = 0; i < 7; ++i) {
    LayerSpec s;
    s.out_ch = std::min(raw[i], cap);
    s.kernel = kernels[i];
    if (i >= 1 && i <= 4) {
      s.stride = 4;
      s.groups = in_ch / 4;
    }
    specs.push_back(s);
    in_ch = s.out_ch;
  }
  return specs;
}

// Six stride-3 stages applied per period phase.
std::vector<LayerSpec> HifiganMpSpecs() {
  const int64_t ch[] = {4, 16, 64, 256, 1024, 1};
  std::vector<LayerSpec> specs;
  for (int i = 0; i < 6; ++i) specs.push_back({ch[i], 5, 3});
  return specs;
}

// Eight layers with the published kernel/stride/channel ladders; grouping on
// the strided interior follows the reference convention.
std::vector<LayerSpec> HifiganMsSpecs() {
  const int64_t ch[] = {16, 16, 32, 64, 128, 256, 512, 1};
  const int64_t kernels[] = {15, 41, 41, 41, 41, 41, 5, 3};
  const int64_t strides[] = {1, 2, 2, 4, 4, 1, 1, 1};
  const int64_t groups[] = {1, 4, 16, 16, 16, 16, 1, 1};
  std::vector<LayerSpec> specs;
  int64_t in_ch = 1;
  for (int i = 0; i < 8; ++i) {
    LayerSpec s;
    s.out_ch = ch[i];
    s.kernel = kernels[i];
    s.stride = strides[i];
    s.groups = std::min(groups[i], in_ch);
    specs.push_back(s);
    in_ch = s.out_ch;
  }
  return specs;
}

}  // namespace

Discriminator::Discriminator(const DiscriminatorConfig& c, uint64_t seed)
    : config_(c) {
  ValidateDiscriminatorConfig(c);
  Rng rng(seed);
  const std::string base = StrCat("disc.", DiscKindToString(c.kind));

  auto add_mp_subs = [&]() {
    for (size_t i = 0; i < c.periods.size(); ++i) {
      Sub s;
      s.layers = BuildLadder(StrCat(base, ".sub", subs_.size()),
                             HifiganMpSpecs(), &rng);
      s.slope = 0.1;
      s.transform = InputTransform::kFoldPeriod;
      s.transform_arg = c.periods[i];
      subs_.push_back(std::move(s));
    }
  };
  auto add_ms_subs = [&]() {
    for (int64_t i = 0; i < 3; ++i) {
      Sub s;
      s.layers = BuildLadder(StrCat(base, ".sub", subs_.size()),
                             HifiganMsSpecs(), &rng);
      s.slope = 0.1;
      s.transform = InputTransform::kAvgPool;
      s.transform_arg = int64_t{1} << i;  // scales 1, 2, 4
      subs_.push_back(std::move(s));
    }
  };

  switch (c.kind) {
    case DiscKind::kPwg: {
      Sub s;
      s.layers = BuildLadder(base + ".sub0", PwgSpecs(), &rng);
      s.slope = 0.2;
      subs_.push_back(std::move(s));
      break;
    }
    case DiscKind::kMelgan: {
      Sub s;
      s.layers = BuildLadder(base + ".sub0", MelganSpecs(1024), &rng);
      s.slope = 0.2;
      subs_.push_back(std::move(s));
      break;
    }
    case DiscKind::kMelganMs: {
      // All three sub-discriminators run at the same downsampling scale of
      // four; they differ only in their weights.
      for (int64_t i = 0; i < 3; ++i) {
        Sub s;
        s.layers = BuildLadder(StrCat(base, ".sub", i), MelganSpecs(1024), &rng);
        s.slope = 0.2;
        s.transform = InputTransform::kAvgPool;
        s.transform_arg = 4;
        subs_.push_back(std::move(s));
      }
      break;
    }
    case DiscKind::kHifiganMp:
      add_mp_subs();
      break;
    case DiscKind::kHifiganMs:
      add_ms_subs();
      break;
    case DiscKind::kHifiganMsmp:
      add_mp_subs();
      add_ms_subs();
      break;
    case DiscKind::kStylemelgan: {
      for (int64_t i = 0; i < Pqmf::kBands; ++i) {
        Sub s;
        s.layers = BuildLadder(StrCat(base, ".sub", i), MelganSpecs(512), &rng);
        s.slope = 0.2;
        s.transform = InputTransform::kPqmfBand;
        s.transform_arg = i;
        subs_.push_back(std::move(s));
      }
      break;
    }
  }
}

SubOutput Discriminator::RunSub(const Sub& sub, const Tensor& x) const {
  SubOutput out;
  Tensor h = x;
  for (size_t i = 0; i < sub.layers.size(); ++i) {
    h = sub.layers[i].Forward(h);
    if (i + 1 < sub.layers.size()) {
      h = ag::LeakyRelu(h, sub.slope);
      out.activations.push_back(h);
    }
  }
  out.score = h;
  return out;
}

std::vector<SubOutput> Discriminator::Forward(const Tensor& x) const {
  BWEX_CHECK(x.Value().Rank() == 3 && x.Dims()[1] == 1,
             "discriminator expects (B, 1, T), got ", ShapeStr(x.Dims()));
  BWEX_CHECK(!subs_.empty(), "discriminator is not initialized");

  Tensor bands;  // computed once, shared by all subband subs
  std::vector<SubOutput> outputs;
  outputs.reserve(subs_.size());
  for (const Sub& sub : subs_) {
    Tensor in;
    switch (sub.transform) {
      case InputTransform::kIdentity:
        in = x;
        break;
      case InputTransform::kAvgPool:
        in = (sub.transform_arg == 1) ? x : ag::AvgPool1d(x, sub.transform_arg);
        break;
      case InputTransform::kFoldPeriod:
        in = ag::FoldPeriod(x, sub.transform_arg);
        break;
      case InputTransform::kPqmfBand:
        if (!bands.Defined()) bands = pqmf_.Analysis(x);
        in = ag::SliceChannels(bands, sub.transform_arg, 1);
        break;
    }
    outputs.push_back(RunSub(sub, in));
  }
  return outputs;
}

std::vector<nn::Parameter> Discriminator::Params() const {
  std::vector<nn::Parameter> p;
  for (const Sub& sub : subs_) {
    for (const nn::Conv1dLayer& l : sub.layers) l.CollectParams(&p);
  }
  return p;
}

}  // namespace bwex
