// src/losses/losses.cc

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

#include "bwex/losses.h"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bwex/common.h"

namespace bwex {
namespace {

using ag::Tensor;

// Guard inside sqrt of summed squares; far below eps_mag so the magnitude
// floor, not this constant, decides every log term.
constexpr double kTiny = 1e-30;

void CheckSameShape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.Dims() != b.Dims()) {
    throw InvalidArgument(StrCat(what, " shape mismatch: ", ShapeStr(a.Dims()),
                                 " vs ", ShapeStr(b.Dims())));
  }
}

void CheckFinite(const Tensor& t, const char* what) {
  if (!t.Value().AllFinite()) {
    throw InvalidArgument(StrCat(what, " contains non-finite values"));
  }
}

Tensor MeanAbs(const Tensor& a, const Tensor& b) {
  return ag::MeanAll(ag::Abs(ag::Sub(a, b)));
}

// Mean score per sample: any (B, ...) layout -> (B, 1, 1).
Tensor PerSampleMean(const Tensor& scores) {
  const int64_t b = scores.Dims()[0];
  Tensor flat = ag::Reshape(scores, {b, 1, scores.NumEl() / b});
  return ag::ReduceMean(flat, {false, true, true});
}

// E over rows of log(1 + sum over the reduced axis of exp(diff)), stabilized
// by a constant per-row shift at max(0, row max).
Tensor LogOnePlusSumExp(const Tensor& diff, const std::vector<bool>& axes) {
  Array m = ag::ReduceMaxArray(diff.Value(), axes);
  Array base(m.dims);
  for (size_t i = 0; i < m.v.size(); ++i) {
    m.v[i] = std::max(0.0, m.v[i]);
    base.v[i] = std::exp(-m.v[i]);
  }
  Tensor shift = ag::Constant(m);
  Tensor inner = ag::ReduceSum(ag::Exp(ag::Sub(diff, shift)), axes);
  return ag::MeanAll(ag::Add(shift, ag::Log(ag::Add(inner, ag::Constant(base)))));
}

// Eq-style contrastive discriminator loss over per-sample mean scores:
//   E_real log(1 + sum_fake exp(f - r)) + E_fake log(1 + sum_real exp(f - r)).
Tensor DclLoss(const Tensor& d_real, const Tensor& d_fake) {
  Tensor r = PerSampleMean(d_real);  // (Br, 1, 1)
  Tensor f = ag::Reshape(PerSampleMean(d_fake), {1, d_fake.Dims()[0], 1});
  Tensor diff = ag::Sub(f, r);  // (Br, Bf, 1), diff[i][j] = f_j - r_i
  Tensor over_fake = LogOnePlusSumExp(diff, {false, true, false});
  Tensor over_real = LogOnePlusSumExp(diff, {true, false, false});
  return ag::Add(over_fake, over_real);
}

// Discriminator loss without the gradient-penalty term.
Tensor AdvLossDCore(AdvKind kind, const Tensor& d_real, const Tensor& d_fake) {
  CheckFinite(d_real, "d_real");
  CheckFinite(d_fake, "d_fake");
  switch (kind) {
    case AdvKind::kNonsat:
      // -E log sigmoid(r) - E log(1 - sigmoid(f)), via softplus for stability.
      return ag::Add(ag::MeanAll(ag::Softplus(ag::Neg(d_real))),
                     ag::MeanAll(ag::Softplus(d_fake)));
    case AdvKind::kLsgan:
      return ag::Add(ag::MeanAll(ag::Square(ag::AddScalar(d_real, -1.0))),
                     ag::MeanAll(ag::Square(d_fake)));
    case AdvKind::kHinge:
      return ag::Add(ag::MeanAll(ag::Relu(ag::AddScalar(ag::Neg(d_real), 1.0))),
                     ag::MeanAll(ag::Relu(ag::AddScalar(d_fake, 1.0))));
    case AdvKind::kWganGp:
      return ag::Sub(ag::MeanAll(d_fake), ag::MeanAll(d_real));
    case AdvKind::kDcl:
      return DclLoss(d_real, d_fake);
  }
  throw InvalidArgument("unknown adversarial kind");
}

struct SubScores {
  std::vector<Tensor> real;
  std::vector<Tensor> fake;
};

// Mean over sub-discriminators of the per-sub loss.
Tensor AverageAdvD(AdvKind kind, const SubScores& s) {
  Tensor acc;
  for (size_t i = 0; i < s.real.size(); ++i) {
    Tensor term = AdvLossDCore(kind, s.real[i], s.fake[i]);
    acc = acc.Defined() ? ag::Add(acc, term) : term;
  }
  return ag::MulScalar(acc, 1.0 / static_cast<double>(s.real.size()));
}

Tensor AverageAdvG(AdvKind kind, const SubScores& s) {
  Tensor acc;
  for (size_t i = 0; i < s.fake.size(); ++i) {
    Tensor term = AdvLossG(kind, s.fake[i],
                           kind == AdvKind::kDcl ? &s.real[i] : nullptr);
    acc = acc.Defined() ? ag::Add(acc, term) : term;
  }
  return ag::MulScalar(acc, 1.0 / static_cast<double>(s.fake.size()));
}

// Unweighted sum over subs and layers of mean absolute activation
// differences (feature matching).
Tensor FeatureMatch(const std::vector<SubOutput>& real,
                    const std::vector<SubOutput>& fake) {
  Tensor acc;
  for (size_t s = 0; s < real.size(); ++s) {
    BWEX_CHECK(real[s].activations.size() == fake[s].activations.size(),
               "feature matching activation count mismatch");
    for (size_t l = 0; l < real[s].activations.size(); ++l) {
      Tensor term = MeanAbs(fake[s].activations[l], real[s].activations[l]);
      acc = acc.Defined() ? ag::Add(acc, term) : term;
    }
  }
  BWEX_CHECK(acc.Defined(), "feature matching needs at least one activation");
  return acc;
}

double ScalarValue(const Tensor& t) { return t.Value().v[0]; }

// Critic view over a multi-sub discriminator: average of per-sub mean scores.
CriticFn MeanScoreCritic(const DiscFn& dis) {
  return [&dis](const Tensor& x) {
    std::vector<SubOutput> subs = dis(x);
    Tensor acc;
    for (const SubOutput& s : subs) {
      Tensor m = PerSampleMean(s.score);
      acc = acc.Defined() ? ag::Add(acc, m) : m;
    }
    return ag::MulScalar(acc, 1.0 / static_cast<double>(subs.size()));
  };
}

}  // namespace

SupKind SupKindFromString(const std::string& s) {
  if (s == "mae") return SupKind::kMae;
  if (s == "mse") return SupKind::kMse;
  if (s == "mrstft") return SupKind::kMrstft;
  if (s == "fm") return SupKind::kFm;
  if (s == "afm") return SupKind::kAfm;
  throw InvalidArgument(StrCat("unknown supervision kind: ", s));
}

std::string SupKindToString(SupKind k) {
  switch (k) {
    case SupKind::kMae: return "mae";
    case SupKind::kMse: return "mse";
    case SupKind::kMrstft: return "mrstft";
    case SupKind::kFm: return "fm";
    case SupKind::kAfm: return "afm";
  }
  throw InvalidArgument("unknown supervision kind");
}

AdvKind AdvKindFromString(const std::string& s) {
  if (s == "nonsat") return AdvKind::kNonsat;
  if (s == "lsgan") return AdvKind::kLsgan;
  if (s == "hinge") return AdvKind::kHinge;
  if (s == "wgan_gp") return AdvKind::kWganGp;
  if (s == "dcl") return AdvKind::kDcl;
  throw InvalidArgument(StrCat("unknown adversarial kind: ", s));
}

std::string AdvKindToString(AdvKind k) {
  switch (k) {
    case AdvKind::kNonsat: return "nonsat";
    case AdvKind::kLsgan: return "lsgan";
    case AdvKind::kHinge: return "hinge";
    case AdvKind::kWganGp: return "wgan_gp";
    case AdvKind::kDcl: return "dcl";
  }
  throw InvalidArgument("unknown adversarial kind");
}

void ValidateLossSpec(const LossSpec& spec) {
  const double w[] = {spec.lambda_sup, spec.lambda_cyc, spec.lambda_id,
                      spec.gp_weight};
  for (double x : w) {
    if (!std::isfinite(x) || x < 0.0) {
      throw InvalidArgument("loss weights must be finite and non-negative");
    }
  }
  if (!std::isfinite(spec.gp_clip) || spec.gp_clip <= 0.0) {
    throw InvalidArgument("gp_clip must be positive");
  }
}

std::string LossSpecJson(const LossSpec& spec) {
  nlohmann::json j;
  j["sup_kind"] = SupKindToString(spec.sup_kind);
  j["adv_kind"] = AdvKindToString(spec.adv_kind);
  j["lambda_sup"] = spec.lambda_sup;
  j["lambda_cyc"] = spec.lambda_cyc;
  j["lambda_id"] = spec.lambda_id;
  j["gp_weight"] = spec.gp_weight;
  j["gp_clip"] = spec.gp_clip;
  return j.dump();
}

LossSpec LossSpecFromJson(const std::string& json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(StrCat("bad loss spec json: ", e.what()));
  }
  LossSpec spec;
  try {
    if (j.contains("sup_kind")) spec.sup_kind = SupKindFromString(j["sup_kind"]);
    if (j.contains("adv_kind")) spec.adv_kind = AdvKindFromString(j["adv_kind"]);
    if (j.contains("lambda_sup")) spec.lambda_sup = j["lambda_sup"];
    if (j.contains("lambda_cyc")) spec.lambda_cyc = j["lambda_cyc"];
    if (j.contains("lambda_id")) spec.lambda_id = j["lambda_id"];
    if (j.contains("gp_weight")) spec.gp_weight = j["gp_weight"];
    if (j.contains("gp_clip")) spec.gp_clip = j["gp_clip"];
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(StrCat("bad loss spec json: ", e.what()));
  }
  ValidateLossSpec(spec);
  return spec;
}

ag::Tensor StftMagnitude(const ag::Tensor& x, int64_t fft, int64_t hop,
                         int64_t win) {
  BWEX_CHECK(fft > 0 && hop > 0 && win > 0 && win <= fft,
             "bad stft geometry (", fft, ", ", hop, ", ", win, ")");
  if (x.Value().Rank() != 3 || x.Dims()[1] != 1) {
    throw InvalidArgument(StrCat("stft expects (B, 1, T), got ",
                                 ShapeStr(x.Dims())));
  }
  if (x.Dims()[2] < win) {
    throw InvalidArgument(StrCat("stft window ", win,
                                 " longer than signal ", x.Dims()[2]));
  }
  const int64_t bins = fft / 2 + 1;
  Array w({2 * bins, 1, win});
  for (int64_t n = 0; n < win; ++n) {
    const double hann =
        0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(n) /
                             static_cast<double>(win));
    for (int64_t k = 0; k < bins; ++k) {
      const double ang = 2.0 * M_PI * static_cast<double>(k) *
                         static_cast<double>(n) / static_cast<double>(fft);
      w.At(k, 0, n) = std::cos(ang) * hann;
      w.At(bins + k, 0, n) = -std::sin(ang) * hann;
    }
  }
  ag::ConvGeom geom;
  geom.stride = hop;
  Tensor basis = ag::Constant(std::move(w));
  Tensor spec = ag::Conv1d(x, basis, geom);
  Tensor re = ag::SliceChannels(spec, 0, bins);
  Tensor im = ag::SliceChannels(spec, bins, bins);
  return ag::Sqrt(
      ag::AddScalar(ag::Add(ag::Square(re), ag::Square(im)), kTiny));
}

MrstftParts MrstftResolutionLoss(const ag::Tensor& x, const ag::Tensor& x_hat,
                                 const StftRes& res, double eps_mag) {
  Tensor mx = StftMagnitude(x, res.fft, res.hop, res.win);
  Tensor mh = StftMagnitude(x_hat, res.fft, res.hop, res.win);
  MrstftParts parts;
  parts.sc = ag::Div(
      ag::Sqrt(ag::AddScalar(ag::SumAll(ag::Square(ag::Sub(mx, mh))), kTiny)),
      ag::Sqrt(ag::AddScalar(ag::SumAll(ag::Square(mx)), kTiny)));
  parts.mag = ag::MeanAll(ag::Abs(ag::Sub(ag::Log(ag::ClampMin(mx, eps_mag)),
                                          ag::Log(ag::ClampMin(mh, eps_mag)))));
  return parts;
}

ag::Tensor SupLoss(SupKind kind, const ag::Tensor& x, const ag::Tensor& x_hat,
                   const ActivationFn& aux, const MrstftConfig& mrstft) {
  CheckSameShape(x, x_hat, "supervision");
  const bool needs_aux = kind == SupKind::kFm || kind == SupKind::kAfm;
  if (needs_aux && !aux) {
    throw InvalidArgument(StrCat(SupKindToString(kind),
                                 " loss needs an activation source"));
  }
  switch (kind) {
    case SupKind::kMae:
      return MeanAbs(x_hat, x);
    case SupKind::kMse:
      return ag::MeanAll(ag::Square(ag::Sub(x_hat, x)));
    case SupKind::kMrstft: {
      Tensor acc;
      BWEX_CHECK(!mrstft.resolutions.empty(), "mrstft needs resolutions");
      for (const StftRes& res : mrstft.resolutions) {
        MrstftParts p = MrstftResolutionLoss(x, x_hat, res, mrstft.eps_mag);
        Tensor term = ag::Add(p.sc, p.mag);
        acc = acc.Defined() ? ag::Add(acc, term) : term;
      }
      return acc;
    }
    case SupKind::kFm:
    case SupKind::kAfm: {
      std::vector<Tensor> ax = aux(x);
      std::vector<Tensor> ah = aux(x_hat);
      if (ax.size() != ah.size() || ax.empty()) {
        throw InvalidArgument("activation lists must be non-empty and equal");
      }
      Tensor acc;
      for (size_t l = 0; l < ax.size(); ++l) {
        CheckSameShape(ax[l], ah[l], "activation");
        Tensor term = MeanAbs(ah[l], ax[l]);
        acc = acc.Defined() ? ag::Add(acc, term) : term;
      }
      return acc;
    }
  }
  throw InvalidArgument("unknown supervision kind");
}

ag::Tensor AdvLossD(AdvKind kind, const ag::Tensor& d_real,
                    const ag::Tensor& d_fake, const ag::Tensor* gp_term) {
  if (kind == AdvKind::kWganGp && gp_term == nullptr) {
    throw InvalidArgument("wgan_gp discriminator loss needs a penalty term");
  }
  if (kind != AdvKind::kWganGp && gp_term != nullptr) {
    throw InvalidArgument("penalty term is only valid for wgan_gp");
  }
  Tensor core = AdvLossDCore(kind, d_real, d_fake);
  if (gp_term != nullptr) core = ag::Add(core, *gp_term);
  return core;
}

ag::Tensor AdvLossG(AdvKind kind, const ag::Tensor& d_fake,
                    const ag::Tensor* d_real) {
  CheckFinite(d_fake, "d_fake");
  if (kind == AdvKind::kDcl && d_real == nullptr) {
    throw InvalidArgument("dcl generator loss needs the real scores");
  }
  switch (kind) {
    case AdvKind::kNonsat:
      // -E log sigmoid(f): push fakes toward the real label.
      return ag::MeanAll(ag::Softplus(ag::Neg(d_fake)));
    case AdvKind::kLsgan:
      return ag::MeanAll(ag::Square(ag::AddScalar(d_fake, -1.0)));
    case AdvKind::kHinge:
    case AdvKind::kWganGp:
      return ag::Neg(ag::MeanAll(d_fake));
    case AdvKind::kDcl:
      // Swapped roles: the generator drives fake scores above real ones.
      CheckFinite(*d_real, "d_real");
      return DclLoss(/*d_real=*/d_fake, /*d_fake=*/*d_real);
  }
  throw InvalidArgument("unknown adversarial kind");
}

ag::Tensor GradientPenalty(const CriticFn& critic, const ag::Tensor& real,
                           const ag::Tensor& fake, Rng* rng) {
  CheckSameShape(real, fake, "gradient penalty");
  BWEX_CHECK(rng != nullptr, "gradient penalty needs an rng");
  const Array& r = real.Value();
  const Array& f = fake.Value();
  BWEX_CHECK(r.Rank() == 3, "gradient penalty expects (B, C, T)");
  const int64_t batch = r.Dim(0);
  const int64_t per = r.NumEl() / batch;
  Array mix(r.dims);
  for (int64_t b = 0; b < batch; ++b) {
    const double u = rng->Uniform();
    const double* rp = r.Data() + b * per;
    const double* fp = f.Data() + b * per;
    double* mp = mix.Data() + b * per;
    for (int64_t i = 0; i < per; ++i) mp[i] = u * rp[i] + (1.0 - u) * fp[i];
  }
  Tensor xhat(std::move(mix), /*requires_grad=*/true);
  Tensor score = critic(xhat);
  // Samples are independent, so the gradient of the total is per sample.
  Tensor g = ag::Grad(ag::SumAll(score), {xhat}, /*create_graph=*/true)[0];
  std::vector<bool> axes(static_cast<size_t>(r.Rank()), true);
  axes[0] = false;
  // ClampMin keeps the norm differentiable when a critic has an identically
  // zero input gradient; at any real norm it is inactive, so a unit-gradient
  // critic yields an exactly zero penalty.
  Tensor norm = ag::Sqrt(ag::ClampMin(ag::ReduceSum(ag::Square(g), axes), kTiny));
  return ag::MeanAll(ag::Square(ag::AddScalar(norm, -1.0)));
}

GanLosses CganObjective(const LossSpec& spec, const GenFn& gen,
                        const DiscFn& dis, const ag::Tensor& a,
                        const ag::Tensor& b, Rng* rng,
                        const ActivationFn& afm_aux) {
  ValidateLossSpec(spec);
  CheckSameShape(a, b, "paired batch");
  Tensor b_hat = gen(a);
  CheckSameShape(b, b_hat, "generator output");

  // Discriminator side: detached fakes keep the two graphs independent.
  Tensor fake_d = ag::Detach(b_hat);
  std::vector<SubOutput> subs_real = dis(b);
  std::vector<SubOutput> subs_fake_d = dis(fake_d);
  BWEX_CHECK(!subs_real.empty() && subs_real.size() == subs_fake_d.size(),
             "discriminator outputs must be non-empty and matched");
  SubScores d_scores;
  for (size_t s = 0; s < subs_real.size(); ++s) {
    d_scores.real.push_back(subs_real[s].score);
    d_scores.fake.push_back(subs_fake_d[s].score);
  }
  GanLosses out;
  Tensor d_loss = AverageAdvD(spec.adv_kind, d_scores);
  out.adv_d_value = ScalarValue(d_loss);
  if (spec.adv_kind == AdvKind::kWganGp) {
    BWEX_CHECK(rng != nullptr, "wgan_gp objective needs an rng");
    Tensor gp = GradientPenalty(MeanScoreCritic(dis), b, fake_d, rng);
    d_loss = ag::Add(d_loss, ag::MulScalar(gp, spec.gp_weight));
  }
  out.d_loss = d_loss;

  // Generator side: fresh scores through the attached fake.
  std::vector<SubOutput> subs_fake_g = dis(b_hat);
  SubScores g_scores;
  for (size_t s = 0; s < subs_real.size(); ++s) {
    g_scores.real.push_back(subs_real[s].score);
    g_scores.fake.push_back(subs_fake_g[s].score);
  }
  Tensor g_loss = AverageAdvG(spec.adv_kind, g_scores);
  out.adv_g_value = ScalarValue(g_loss);

  auto sup_term = [&](const ag::Tensor& target, const ag::Tensor& est,
                      const std::vector<SubOutput>& target_subs,
                      const std::vector<SubOutput>& est_subs) {
    if (spec.sup_kind == SupKind::kFm) return FeatureMatch(target_subs, est_subs);
    if (spec.sup_kind == SupKind::kAfm) {
      if (!afm_aux) {
        throw InvalidArgument("afm supervision needs an activation source");
      }
      return SupLoss(SupKind::kAfm, target, est, afm_aux);
    }
    return SupLoss(spec.sup_kind, target, est);
  };

  if (spec.lambda_sup > 0.0) {
    Tensor sup = sup_term(b, b_hat, subs_real, subs_fake_g);
    out.sup_value = ScalarValue(sup);
    g_loss = ag::Add(g_loss, ag::MulScalar(sup, spec.lambda_sup));
  }
  if (spec.lambda_id > 0.0) {
    Tensor b_id = gen(b);
    std::vector<SubOutput> subs_id;
    if (spec.sup_kind == SupKind::kFm) subs_id = dis(b_id);
    Tensor id = sup_term(b, b_id, subs_real, subs_id);
    out.id_value = ScalarValue(id);
    g_loss = ag::Add(g_loss, ag::MulScalar(id, spec.lambda_id));
  }
  out.g_loss = g_loss;
  return out;
}

GanLosses CycleganObjective(const LossSpec& spec, const GenFn& g_ab,
                            const GenFn& g_ba, const DiscFn& d_a,
                            const DiscFn& d_b, const ag::Tensor& a,
                            const ag::Tensor& b, Rng* rng,
                            bool paired_supervision) {
  ValidateLossSpec(spec);
  if (paired_supervision) CheckSameShape(a, b, "paired batch");
  Tensor b_hat = g_ab(a);
  Tensor a_hat = g_ba(b);

  auto side_scores = [](const DiscFn& dis, const Tensor& real,
                        const Tensor& fake) {
    std::vector<SubOutput> sr = dis(real);
    std::vector<SubOutput> sf = dis(fake);
    BWEX_CHECK(!sr.empty() && sr.size() == sf.size(),
               "discriminator outputs must be non-empty and matched");
    SubScores s;
    for (size_t i = 0; i < sr.size(); ++i) {
      s.real.push_back(sr[i].score);
      s.fake.push_back(sf[i].score);
    }
    return s;
  };

  GanLosses out;
  // Discriminator side, both directions, on detached fakes.
  Tensor b_fake_d = ag::Detach(b_hat);
  Tensor a_fake_d = ag::Detach(a_hat);
  SubScores db = side_scores(d_b, b, b_fake_d);
  SubScores da = side_scores(d_a, a, a_fake_d);
  Tensor d_loss = ag::Add(AverageAdvD(spec.adv_kind, db),
                          AverageAdvD(spec.adv_kind, da));
  out.adv_d_value = ScalarValue(d_loss);
  if (spec.adv_kind == AdvKind::kWganGp) {
    BWEX_CHECK(rng != nullptr, "wgan_gp objective needs an rng");
    Tensor gp_b = GradientPenalty(MeanScoreCritic(d_b), b, b_fake_d, rng);
    Tensor gp_a = GradientPenalty(MeanScoreCritic(d_a), a, a_fake_d, rng);
    d_loss = ag::Add(d_loss, ag::MulScalar(ag::Add(gp_b, gp_a), spec.gp_weight));
  }
  out.d_loss = d_loss;

  // Generator side.
  SubScores gb = side_scores(d_b, b, b_hat);
  SubScores ga = side_scores(d_a, a, a_hat);
  Tensor g_loss = ag::Add(AverageAdvG(spec.adv_kind, gb),
                          AverageAdvG(spec.adv_kind, ga));
  out.adv_g_value = ScalarValue(g_loss);

  Tensor cyc = ag::Add(MeanAbs(g_ba(b_hat), a), MeanAbs(g_ab(a_hat), b));
  out.cyc_value = ScalarValue(cyc);
  g_loss = ag::Add(g_loss, ag::MulScalar(cyc, spec.lambda_cyc));

  if (spec.lambda_id > 0.0) {
    Tensor id = ag::Add(MeanAbs(g_ab(b), b), MeanAbs(g_ba(a), a));
    out.id_value = ScalarValue(id);
    g_loss = ag::Add(g_loss, ag::MulScalar(id, spec.lambda_id));
  }
  if (paired_supervision && spec.lambda_sup > 0.0) {
    if (spec.sup_kind == SupKind::kFm || spec.sup_kind == SupKind::kAfm) {
      throw InvalidArgument(
          "paired cycle supervision supports waveform losses only");
    }
    Tensor sup = ag::Add(SupLoss(spec.sup_kind, b, b_hat),
                         SupLoss(spec.sup_kind, a, a_hat));
    out.sup_value = ScalarValue(sup);
    g_loss = ag::Add(g_loss, ag::MulScalar(sup, spec.lambda_sup));
  }
  out.g_loss = g_loss;
  return out;
}

}  // namespace bwex
