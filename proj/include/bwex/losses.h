// include/bwex/losses.h

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

#ifndef BWEX_LOSSES_H_
#define BWEX_LOSSES_H_

#include <functional>
#include <string>
#include <vector>

#include "bwex/autograd.h"
#include "bwex/models.h"
#include "bwex/rng.h"

namespace bwex {

// Supervision losses compare a reference waveform with an estimate; fm and
// afm compare intermediate activations instead and need an activation source.
enum class SupKind { kMae, kMse, kMrstft, kFm, kAfm };
// Adversarial objectives; wgan_gp adds an input-gradient penalty, dcl couples
// real and fake scores contrastively.
enum class AdvKind { kNonsat, kLsgan, kHinge, kWganGp, kDcl };

SupKind SupKindFromString(const std::string& s);
std::string SupKindToString(SupKind k);
AdvKind AdvKindFromString(const std::string& s);
std::string AdvKindToString(AdvKind k);

// Weights of a composite GAN objective.  The generator descends
//   adv_g + lambda_sup * sup + lambda_cyc * cycle + lambda_id * identity
// and the discriminator descends adv_d (+ gp_weight * gradient penalty for
// wgan_gp).  gp_clip is the global-norm bound applied to discriminator
// parameter gradients before each optimizer step.
struct LossSpec {
  SupKind sup_kind = SupKind::kMae;
  AdvKind adv_kind = AdvKind::kLsgan;
  double lambda_sup = 0.1;
  double lambda_cyc = 10.0;
  double lambda_id = 0.0;
  double gp_weight = 10.0;
  double gp_clip = 0.001;
};

void ValidateLossSpec(const LossSpec& spec);
std::string LossSpecJson(const LossSpec& spec);
LossSpec LossSpecFromJson(const std::string& json);

struct StftRes {
  int64_t fft = 0;
  int64_t hop = 0;
  int64_t win = 0;
};

// Multi-resolution STFT loss settings.  eps_mag floors magnitudes inside the
// log terms so silence stays finite.
struct MrstftConfig {
  std::vector<StftRes> resolutions = {{1024, 120, 600},
                                      {2048, 240, 1200},
                                      {512, 50, 240}};
  double eps_mag = 1e-7;
};

// Differentiable one-sided STFT magnitude of (B, 1, T) waveforms via a
// DFT-basis convolution with a periodic Hann window; frames start at t = 0
// and advance by hop, so T must be at least win.
// Returns (B, fft/2 + 1, frames).
ag::Tensor StftMagnitude(const ag::Tensor& x, int64_t fft, int64_t hop,
                         int64_t win);

// Spectral convergence (Frobenius-relative magnitude error) and log-magnitude
// L1 mean for one resolution; x is the reference.
struct MrstftParts {
  ag::Tensor sc;
  ag::Tensor mag;
};
MrstftParts MrstftResolutionLoss(const ag::Tensor& x, const ag::Tensor& x_hat,
                                 const StftRes& res, double eps_mag);

// Maps a waveform batch to a list of intermediate activations.
using ActivationFn =
    std::function<std::vector<ag::Tensor>(const ag::Tensor&)>;

// Supervision loss; aux is required exactly for fm and afm, where the loss is
// the unweighted sum over layers of mean absolute activation differences.
// All reductions are means over batch and time.
ag::Tensor SupLoss(SupKind kind, const ag::Tensor& x, const ag::Tensor& x_hat,
                   const ActivationFn& aux = nullptr,
                   const MrstftConfig& mrstft = MrstftConfig());

// Discriminator-side adversarial loss on one score batch pair.  Score maps
// are reduced by per-sample means for dcl and by global means otherwise.
// gp_term must be supplied exactly for wgan_gp and is added verbatim, so the
// caller scales it by gp_weight.
ag::Tensor AdvLossD(AdvKind kind, const ag::Tensor& d_real,
                    const ag::Tensor& d_fake,
                    const ag::Tensor* gp_term = nullptr);

// Generator-side adversarial loss; dcl swaps the real and fake roles and is
// the only kind that needs d_real.
ag::Tensor AdvLossG(AdvKind kind, const ag::Tensor& d_fake,
                    const ag::Tensor* d_real = nullptr);

// Scalar-per-sample critic view of a network: any output map is reduced to a
// per-sample sum before the input gradient is taken.
using CriticFn = std::function<ag::Tensor(const ag::Tensor&)>;

// E[(||d critic / d x|| - 1)^2] on per-sample random convex combinations of
// real and fake.  The input gradient is built with a differentiable graph, so
// the penalty carries exact second-order gradients into the critic
// parameters.  Leaf gradient accumulators are not touched.
ag::Tensor GradientPenalty(const CriticFn& critic, const ag::Tensor& real,
                           const ag::Tensor& fake, Rng* rng);

using GenFn = std::function<ag::Tensor(const ag::Tensor&)>;
using DiscFn = std::function<std::vector<SubOutput>(const ag::Tensor&)>;

// Composite objective values for one batch.  g_loss and d_loss are separate
// graphs: the discriminator sees detached fakes.  The double fields record
// already-evaluated components for history logs.
struct GanLosses {
  ag::Tensor g_loss;
  ag::Tensor d_loss;
  double adv_g_value = 0.0;
  double adv_d_value = 0.0;
  double sup_value = 0.0;
  double cyc_value = 0.0;
  double id_value = 0.0;
};

// Conditional GAN on paired (a, b): g = adv_g + lambda_sup * sup(b, G(a))
// (+ lambda_id * sup(b, G(b)) when lambda_id > 0); d = adv_d on real b vs
// detached G(a).  Multi-sub discriminator scores are averaged; fm compares
// activations across all subs; afm requires afm_aux.
GanLosses CganObjective(const LossSpec& spec, const GenFn& gen,
                        const DiscFn& dis, const ag::Tensor& a,
                        const ag::Tensor& b, Rng* rng,
                        const ActivationFn& afm_aux = nullptr);

// CycleGAN on possibly unpaired (a, b) with generators in both directions.
// g = adv_g(A->B) + adv_g(B->A) + lambda_cyc * L1 cycle + lambda_id * L1
// identity (+ lambda_sup * paired supervision both ways when
// paired_supervision is set); d = sum of both discriminators' losses.
GanLosses CycleganObjective(const LossSpec& spec, const GenFn& g_ab,
                            const GenFn& g_ba, const DiscFn& d_a,
                            const DiscFn& d_b, const ag::Tensor& a,
                            const ag::Tensor& b, Rng* rng,
                            bool paired_supervision = false);

}  // namespace bwex

#endif  // BWEX_LOSSES_H_
