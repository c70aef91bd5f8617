// tests/test_losses.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "bwex/common.h"
#include "bwex/losses.h"
#include "gradcheck.h"

namespace bwex {
namespace {

using ag::Tensor;

double V(const Tensor& t) { return t.Value().v[0]; }

Tensor Wave(int64_t b, int64_t t, uint64_t seed, double amp = 0.5) {
  Rng rng(seed);
  Array a({b, 1, t});
  for (double& v : a.v) v = rng.Uniform(-amp, amp);
  return Tensor(std::move(a));
}

Tensor Scores(std::vector<double> v) {
  const int64_t b = static_cast<int64_t>(v.size());
  Array a({b, 1, 1});
  a.v = std::move(v);
  return Tensor(std::move(a));
}

double Softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x)));
}

double Hann(int64_t n, int64_t win) {
  return 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(n) /
                              static_cast<double>(win));
}

// Tiny resolutions keep finite-difference checks fast.
MrstftConfig TinyMrstft() {
  MrstftConfig cfg;
  cfg.resolutions = {{32, 8, 16}, {64, 16, 32}};
  return cfg;
}

TEST_CASE("mae and mse match hand values") {
  Tensor x = Tensor(Array::FromVec({1.0, 1.0}));
  Tensor xh = Tensor(Array::FromVec({0.0, 0.0}));
  CHECK(V(SupLoss(SupKind::kMae, x, xh)) == 1.0);
  CHECK(V(SupLoss(SupKind::kMse, x, xh)) == 1.0);
  Tensor y = Wave(2, 64, 1);
  CHECK(V(SupLoss(SupKind::kMse, y, y)) == 0.0);
  CHECK(V(SupLoss(SupKind::kMae, y, y)) == 0.0);
  Tensor a = Tensor(Array::FromVec({2.0, -4.0}));
  Tensor b = Tensor(Array::FromVec({0.0, 0.0}));
  CHECK(V(SupLoss(SupKind::kMae, a, b)) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(V(SupLoss(SupKind::kMse, a, b)) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("mrstft vanishes on equal inputs") {
  Tensor x = Wave(1, 2048, 2);
  const double total = V(SupLoss(SupKind::kMrstft, x, x));
  CHECK(total >= 0.0);
  CHECK(total < 1e-6);
  MrstftConfig cfg;
  for (const StftRes& res : cfg.resolutions) {
    MrstftParts p = MrstftResolutionLoss(x, x, res, cfg.eps_mag);
    CHECK(V(p.mag) == 0.0);
    CHECK(V(p.sc) < 1e-12);
  }
}

TEST_CASE("mrstft impulse against silence matches the closed form") {
  const int64_t len = 2048;
  const int64_t pos = 700;
  Array xa({1, 1, len});
  xa.At(0, 0, pos) = 1.0;
  Tensor x(std::move(xa));
  Tensor zero(Array({1, 1, len}));
  MrstftConfig cfg;
  // A one-sample signal has flat spectral magnitude w[pos - f*hop] in every
  // frame that covers it, so the log-magnitude mean over bins collapses to a
  // mean over frames; spectral convergence is 1 per resolution.
  double expected = 0.0;
  for (const StftRes& res : cfg.resolutions) {
    const int64_t frames = 1 + (len - res.win) / res.hop;
    double mag = 0.0;
    for (int64_t f = 0; f < frames; ++f) {
      const int64_t p = pos - f * res.hop;
      const double w = (p >= 0 && p < res.win) ? Hann(p, res.win) : 0.0;
      mag += std::fabs(std::log(std::max(w, cfg.eps_mag)) -
                       std::log(cfg.eps_mag));
    }
    expected += 1.0 + mag / static_cast<double>(frames);
  }
  const double got = V(SupLoss(SupKind::kMrstft, x, zero));
  CHECK(std::fabs(got - expected) < 1e-6);
}

TEST_CASE("spectral convergence ignores shared gain") {
  Tensor x = Wave(1, 1300, 3);
  Tensor xh = Wave(1, 1300, 4);
  Tensor xs = ag::MulScalar(x, 3.7);
  Tensor xhs = ag::MulScalar(xh, 3.7);
  MrstftConfig cfg;
  for (const StftRes& res : cfg.resolutions) {
    MrstftParts p = MrstftResolutionLoss(x, xh, res, cfg.eps_mag);
    MrstftParts ps = MrstftResolutionLoss(xs, xhs, res, cfg.eps_mag);
    CHECK(std::fabs(V(p.sc) - V(ps.sc)) < 1e-12);
  }
}

TEST_CASE("supervision losses validate their inputs") {
  Tensor x = Wave(1, 300, 5);
  Tensor y = Wave(1, 301, 6);
  CHECK_THROWS_AS(SupLoss(SupKind::kMae, x, y), InvalidArgument);
  CHECK_THROWS_AS(SupLoss(SupKind::kFm, x, x), InvalidArgument);
  CHECK_THROWS_AS(SupLoss(SupKind::kAfm, x, x), InvalidArgument);
  // Shortest default window is 240 samples.
  Tensor s = Wave(1, 100, 7);
  CHECK_THROWS_AS(SupLoss(SupKind::kMrstft, s, s), InvalidArgument);
}

TEST_CASE("activation losses sum mean absolute differences over layers") {
  ActivationFn aux = [](const Tensor& t) {
    return std::vector<Tensor>{ag::LeakyRelu(t, 0.2), ag::Square(t)};
  };
  Tensor x = Wave(1, 32, 8);
  CHECK(V(SupLoss(SupKind::kFm, x, x, aux)) == 0.0);
  Tensor xh = Wave(1, 32, 9);
  const double got = V(SupLoss(SupKind::kFm, x, xh, aux));
  double expected = 0.0;
  for (int layer = 0; layer < 2; ++layer) {
    double acc = 0.0;
    for (int64_t t = 0; t < 32; ++t) {
      auto f = [&](double v) {
        return layer == 0 ? (v > 0.0 ? v : 0.2 * v) : v * v;
      };
      acc += std::fabs(f(xh.Value().At(0, 0, t)) - f(x.Value().At(0, 0, t)));
    }
    expected += acc / 32.0;
  }
  CHECK(got == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("adversarial losses match hand values") {
  CHECK(V(AdvLossD(AdvKind::kLsgan, Scores({1.0}), Scores({0.0}))) == 0.0);
  CHECK(V(AdvLossD(AdvKind::kHinge, Scores({2.0}), Scores({-2.0}))) == 0.0);
  CHECK(std::fabs(V(AdvLossD(AdvKind::kNonsat, Scores({0.0}), Scores({0.0}))) -
                  2.0 * std::log(2.0)) < 1e-12);
  CHECK(std::fabs(V(AdvLossG(AdvKind::kNonsat, Scores({0.0}))) -
                  std::log(2.0)) < 1e-12);
  CHECK(V(AdvLossG(AdvKind::kLsgan, Scores({1.0}))) == 0.0);
  CHECK(V(AdvLossG(AdvKind::kWganGp, Scores({3.0, -1.0}))) == -1.0);
  CHECK(V(AdvLossG(AdvKind::kHinge, Scores({4.0}))) == -4.0);
  Tensor gp = Tensor(Array::Scalar(5.0));
  CHECK(V(AdvLossD(AdvKind::kWganGp, Scores({2.0}), Scores({1.0}), &gp)) ==
        4.0);
}

TEST_CASE("contrastive loss reduces to softplus for single samples") {
  const double c = 0.37;
  Tensor r = Scores({c});
  Tensor f = Scores({c});
  CHECK(std::fabs(V(AdvLossD(AdvKind::kDcl, r, f)) - 2.0 * std::log(2.0)) <
        1e-12);
  Rng rng(11);
  for (int i = 0; i < 8; ++i) {
    const double dr = rng.Uniform(-4.0, 4.0);
    const double df = rng.Uniform(-4.0, 4.0);
    Tensor tr = Scores({dr});
    Tensor tf = Scores({df});
    CHECK(std::fabs(V(AdvLossD(AdvKind::kDcl, tr, tf)) -
                    2.0 * Softplus(df - dr)) < 1e-12);
    CHECK(std::fabs(V(AdvLossG(AdvKind::kDcl, tf, &tr)) -
                    2.0 * Softplus(dr - df)) < 1e-12);
  }
}

TEST_CASE("contrastive loss matches a direct batch evaluation") {
  Rng rng(12);
  std::vector<double> rv = {rng.Uniform(-3.0, 3.0), rng.Uniform(-3.0, 3.0)};
  std::vector<double> fv = {rng.Uniform(-3.0, 3.0), rng.Uniform(-3.0, 3.0),
                            rng.Uniform(-3.0, 3.0)};
  double over_fake = 0.0;
  for (double r : rv) {
    double s = 0.0;
    for (double f : fv) s += std::exp(f - r);
    over_fake += std::log1p(s);
  }
  over_fake /= static_cast<double>(rv.size());
  double over_real = 0.0;
  for (double f : fv) {
    double s = 0.0;
    for (double r : rv) s += std::exp(f - r);
    over_real += std::log1p(s);
  }
  over_real /= static_cast<double>(fv.size());
  const double got = V(AdvLossD(AdvKind::kDcl, Scores(rv), Scores(fv)));
  CHECK(std::fabs(got - (over_fake + over_real)) < 1e-12);
}

TEST_CASE("adversarial losses validate their inputs") {
  Tensor r = Scores({1.0});
  Tensor f = Scores({0.0});
  CHECK_THROWS_AS(AdvLossD(AdvKind::kWganGp, r, f), InvalidArgument);
  Tensor gp = Tensor(Array::Scalar(0.0));
  CHECK_THROWS_AS(AdvLossD(AdvKind::kLsgan, r, f, &gp), InvalidArgument);
  CHECK_THROWS_AS(AdvLossG(AdvKind::kDcl, f), InvalidArgument);
  Tensor bad = Scores({std::numeric_limits<double>::infinity()});
  CHECK_THROWS_AS(AdvLossD(AdvKind::kLsgan, bad, f), InvalidArgument);
  CHECK_THROWS_AS(AdvLossG(AdvKind::kLsgan, bad), InvalidArgument);
}

TEST_CASE("gradient penalty matches linear-critic closed forms") {
  Rng rng(13);
  CriticFn identity = [](const Tensor& x) { return x; };
  Tensor r1 = Wave(2, 1, 14);
  Tensor f1 = Wave(2, 1, 15);
  // One element per sample and unit slope: the norm is exactly 1.
  CHECK(V(GradientPenalty(identity, r1, f1, &rng)) == 0.0);

  CriticFn doubled = [](const Tensor& x) { return ag::MulScalar(x, 2.0); };
  const int64_t k = 5;
  Tensor rk = Wave(3, k, 16);
  Tensor fk = Wave(3, k, 17);
  const double norm = 2.0 * std::sqrt(static_cast<double>(k));
  const double expected = (norm - 1.0) * (norm - 1.0);
  CHECK(std::fabs(V(GradientPenalty(doubled, rk, fk, &rng)) - expected) <
        1e-12);
}

TEST_CASE("gradient penalty interpolates per sample inside the segment") {
  Rng rng(18);
  Array captured;
  CriticFn capture = [&captured](const Tensor& x) {
    captured = x.Value();
    return x;
  };
  Tensor real(Array({4, 1, 6}));
  Tensor fake(Array::Full({4, 1, 6}, 1.0));
  (void)GradientPenalty(capture, real, fake, &rng);
  REQUIRE(captured.dims == std::vector<int64_t>{4, 1, 6});
  std::vector<double> row_values;
  for (int64_t b = 0; b < 4; ++b) {
    const double u = captured.At(b, 0, 0);
    CHECK(u >= 0.0);
    CHECK(u <= 1.0);
    for (int64_t t = 1; t < 6; ++t) CHECK(captured.At(b, 0, t) == u);
    row_values.push_back(u);
  }
  // Independent draws per sample.
  CHECK(row_values[0] != row_values[1]);
}

TEST_CASE("gradient penalty leaves leaf accumulators untouched") {
  Rng rng(19);
  Tensor w(Array::FromVec({0.3, -0.2, 0.5}), /*requires_grad=*/true);
  Tensor w3 = ag::Reshape(w, {1, 1, 3});
  CriticFn critic = [&w3](const Tensor& x) {
    ag::ConvGeom geom;
    geom.pad_left = 1;
    geom.pad_right = 1;
    return ag::Conv1d(x, w3, geom);
  };
  Tensor pen = GradientPenalty(critic, Wave(2, 8, 20), Wave(2, 8, 21), &rng);
  CHECK(V(pen) > 0.0);
  for (double g : w.Grad().v) CHECK(g == 0.0);
}

TEST_CASE("gradient penalty differentiates into critic parameters") {
  auto eval = [](const Array& wv) {
    Rng rng(22);
    Tensor w(wv, /*requires_grad=*/true);
    Tensor w3 = ag::Reshape(w, {1, 1, 3});
    CriticFn critic = [&w3](const Tensor& x) {
      ag::ConvGeom geom;
      geom.pad_left = 1;
      geom.pad_right = 1;
      // Smooth in both the input and the weights.
      return ag::Square(ag::Conv1d(x, w3, geom));
    };
    return GradientPenalty(critic, Wave(2, 8, 23), Wave(2, 8, 24), &rng);
  };
  Array w0 = Array::FromVec({0.4, -0.3, 0.2});
  Tensor pen = eval(w0);
  // Rebuild the graph from a fresh leaf to read analytic gradients.
  Rng rng(22);
  Tensor w(w0, /*requires_grad=*/true);
  Tensor w3 = ag::Reshape(w, {1, 1, 3});
  CriticFn critic = [&w3](const Tensor& x) {
    ag::ConvGeom geom;
    geom.pad_left = 1;
    geom.pad_right = 1;
    return ag::Square(ag::Conv1d(x, w3, geom));
  };
  Tensor loss = GradientPenalty(critic, Wave(2, 8, 23), Wave(2, 8, 24), &rng);
  ag::Backward(loss);
  Array numeric = testutil::NumericGrad(
      [&](const Array& a) { return V(eval(a)); }, w0, 1e-5);
  CHECK(testutil::MaxRelErr(w.Grad(), numeric) < 1e-6);
}

TEST_CASE("every supervision kind passes a finite-difference check") {
  ActivationFn aux = [](const Tensor& t) {
    return std::vector<Tensor>{ag::LeakyRelu(t, 0.2), ag::Tanh(t)};
  };
  Rng rng(25);
  Array x0({1, 1, 64});
  for (double& v : x0.v) v = rng.Uniform(-0.5, 0.5);
  Tensor target = Wave(1, 64, 26);
  for (SupKind kind : {SupKind::kMae, SupKind::kMse, SupKind::kMrstft,
                       SupKind::kFm, SupKind::kAfm}) {
    // Keep |x - x_hat| away from the absolute-value kink.
    Tensor shifted = ag::AddScalar(target, 2.0);
    auto build = [&](const Tensor& leaf) {
      return SupLoss(kind, shifted, leaf, aux, TinyMrstft());
    };
    const double err = testutil::CheckGrad(build, x0, 1e-5);
    INFO("kind " << SupKindToString(kind));
    CHECK(err < 1e-3);
    CHECK(err < 1e-5);
  }
}

struct ToyGan {
  Tensor wg;
  Tensor wd1;
  Tensor wd2;
  ToyGan()
      : wg(Array::FromVec({0.4, 0.7, -0.2}), true),
        wd1(Array::FromVec({0.5, -0.3, 0.6}), true),
        wd2(Array::FromVec({0.8, 0.1, -0.4}), true) {}
  GenFn Gen() const {
    return [this](const Tensor& x) {
      ag::ConvGeom geom;
      geom.pad_left = 1;
      geom.pad_right = 1;
      return ag::Conv1d(x, ag::Reshape(wg, {1, 1, 3}), geom);
    };
  }
  DiscFn Dis() const {
    return [this](const Tensor& x) {
      ag::ConvGeom geom;
      geom.pad_left = 1;
      geom.pad_right = 1;
      Tensor mid = ag::LeakyRelu(
          ag::Conv1d(x, ag::Reshape(wd1, {1, 1, 3}), geom), 0.2);
      Tensor score = ag::Conv1d(mid, ag::Reshape(wd2, {1, 1, 3}), geom);
      SubOutput sub;
      sub.score = score;
      sub.activations = {mid};
      return std::vector<SubOutput>{sub};
    };
  }
};

TEST_CASE("every adversarial kind passes a finite-difference check") {
  Tensor a = Wave(2, 12, 27);
  Tensor b = Wave(2, 12, 28);
  for (AdvKind kind : {AdvKind::kNonsat, AdvKind::kLsgan, AdvKind::kHinge,
                       AdvKind::kWganGp, AdvKind::kDcl}) {
    LossSpec spec;
    spec.sup_kind = SupKind::kMae;
    spec.adv_kind = kind;
    spec.lambda_sup = 0.1;
    INFO("kind " << AdvKindToString(kind));

    ToyGan gan;
    Rng rng(30);
    GanLosses out = CganObjective(spec, gan.Gen(), gan.Dis(), a, b, &rng);
    ag::Backward(out.g_loss);
    // The discriminator step sees detached fakes, so the generator weight
    // must stay out of its graph.
    Array g_wg = gan.wg.Grad();
    gan.wg.ZeroGrad();
    gan.wd1.ZeroGrad();
    gan.wd2.ZeroGrad();
    ag::Backward(out.d_loss);
    for (double g : gan.wg.Grad().v) CHECK(g == 0.0);
    Array d_wd1 = gan.wd1.Grad();

    auto eval_with = [&](const Array& wgv, const Array& wd1v, bool want_g) {
      ToyGan t;
      t.wg.MutableValue() = wgv;
      t.wd1.MutableValue() = wd1v;
      Rng r(30);
      GanLosses o = CganObjective(spec, t.Gen(), t.Dis(), a, b, &r);
      return want_g ? V(o.g_loss) : V(o.d_loss);
    };
    Array base_wg = gan.wg.Value();
    Array base_wd1 = gan.wd1.Value();
    Array num_g = testutil::NumericGrad(
        [&](const Array& w) { return eval_with(w, base_wd1, true); }, base_wg,
        1e-5);
    Array num_d = testutil::NumericGrad(
        [&](const Array& w) { return eval_with(base_wg, w, false); }, base_wd1,
        1e-5);
    CHECK(testutil::MaxRelErr(g_wg, num_g) < 1e-3);
    CHECK(testutil::MaxRelErr(d_wd1, num_d) < 1e-3);
  }
}

TEST_CASE("cgan identities") {
  Tensor b = Wave(2, 16, 31);
  GenFn identity = [](const Tensor& x) { return x; };
  ToyGan gan;
  LossSpec spec;
  spec.adv_kind = AdvKind::kLsgan;
  spec.sup_kind = SupKind::kMae;

  // Identity generator on a == b: the supervision weight cannot matter.
  spec.lambda_sup = 7.0;
  Rng rng(32);
  GanLosses with_sup = CganObjective(spec, identity, gan.Dis(), b, b, &rng);
  spec.lambda_sup = 0.0;
  GanLosses without = CganObjective(spec, identity, gan.Dis(), b, b, &rng);
  CHECK(V(with_sup.g_loss) == V(without.g_loss));
  CHECK(with_sup.sup_value == 0.0);

  // With lambda_sup = 0 the generator loss is purely adversarial.
  CHECK(V(without.g_loss) == without.adv_g_value);
}

TEST_CASE("cyclegan identities and the toy cycle value") {
  GenFn identity = [](const Tensor& x) { return x; };
  DiscFn trivial = [](const Tensor& x) {
    SubOutput sub;
    sub.score = ag::MulScalar(x, 0.0);
    sub.activations = {x};
    return std::vector<SubOutput>{sub};
  };
  LossSpec spec;
  spec.adv_kind = AdvKind::kLsgan;
  spec.lambda_cyc = 10.0;
  spec.lambda_id = 10.0;
  Tensor a = Wave(1, 20, 33);
  Tensor b = Wave(1, 24, 34);
  Rng rng(35);
  GanLosses out = CycleganObjective(spec, identity, identity, trivial, trivial,
                                    a, b, &rng);
  CHECK(out.cyc_value == 0.0);
  CHECK(out.id_value == 0.0);
  CHECK(V(out.g_loss) == out.adv_g_value);

  GenFn ab = [](const Tensor& x) { return ag::AddScalar(x, 1.0); };
  GenFn ba = [](const Tensor& x) { return ag::AddScalar(x, -2.0); };
  Tensor ta(Array::Full({1, 1, 1}, 1.0));
  Tensor tb(Array::Full({1, 1, 1}, 3.0));
  GanLosses toy = CycleganObjective(spec, ab, ba, trivial, trivial, ta, tb,
                                    &rng);
  CHECK(toy.cyc_value == 2.0);

  spec.sup_kind = SupKind::kFm;
  spec.lambda_sup = 0.1;
  CHECK_THROWS_AS(CycleganObjective(spec, ab, ba, trivial, trivial, ta, tb,
                                    &rng, /*paired_supervision=*/true),
                  InvalidArgument);
}

TEST_CASE("paired cycle supervision uses both directions") {
  GenFn ab = [](const Tensor& x) { return ag::AddScalar(x, 1.0); };
  GenFn ba = [](const Tensor& x) { return ag::AddScalar(x, -2.0); };
  DiscFn trivial = [](const Tensor& x) {
    SubOutput sub;
    sub.score = ag::MulScalar(x, 0.0);
    sub.activations = {x};
    return std::vector<SubOutput>{sub};
  };
  LossSpec spec;
  spec.adv_kind = AdvKind::kLsgan;
  spec.sup_kind = SupKind::kMae;
  spec.lambda_sup = 1.0;
  spec.lambda_cyc = 0.0;
  spec.lambda_id = 0.0;
  Tensor ta(Array::Full({1, 1, 1}, 1.0));
  Tensor tb(Array::Full({1, 1, 1}, 3.0));
  Rng rng(36);
  GanLosses out = CycleganObjective(spec, ab, ba, trivial, trivial, ta, tb,
                                    &rng, /*paired_supervision=*/true);
  // |3 - (1+1)| + |1 - (3-2)| = 1 + 0.
  CHECK(out.sup_value == 1.0);
}

TEST_CASE("loss spec json round trips and validates") {
  LossSpec spec;
  spec.sup_kind = SupKind::kMrstft;
  spec.adv_kind = AdvKind::kDcl;
  spec.lambda_sup = 0.25;
  spec.lambda_cyc = 5.0;
  spec.lambda_id = 10.0;
  spec.gp_weight = 2.0;
  spec.gp_clip = 0.01;
  LossSpec back = LossSpecFromJson(LossSpecJson(spec));
  CHECK(back.sup_kind == spec.sup_kind);
  CHECK(back.adv_kind == spec.adv_kind);
  CHECK(back.lambda_sup == spec.lambda_sup);
  CHECK(back.lambda_cyc == spec.lambda_cyc);
  CHECK(back.lambda_id == spec.lambda_id);
  CHECK(back.gp_weight == spec.gp_weight);
  CHECK(back.gp_clip == spec.gp_clip);

  CHECK_THROWS_AS(LossSpecFromJson("{\"lambda_sup\":-1}"), InvalidArgument);
  CHECK_THROWS_AS(LossSpecFromJson("{\"gp_clip\":0}"), InvalidArgument);
  CHECK_THROWS_AS(LossSpecFromJson("{\"sup_kind\":\"foo\"}"), InvalidArgument);
  CHECK_THROWS_AS(LossSpecFromJson("not json"), InvalidArgument);
  for (const char* s : {"mae", "mse", "mrstft", "fm", "afm"}) {
    CHECK(SupKindToString(SupKindFromString(s)) == s);
  }
  for (const char* s : {"nonsat", "lsgan", "hinge", "wgan_gp", "dcl"}) {
    CHECK(AdvKindToString(AdvKindFromString(s)) == s);
  }
}

TEST_CASE("losses stay finite on random inputs") {
  Rng rng(37);
  for (int i = 0; i < 4; ++i) {
    Tensor r = Wave(2, 7, 100 + static_cast<uint64_t>(i));
    Tensor f = Wave(2, 7, 200 + static_cast<uint64_t>(i));
    for (AdvKind kind : {AdvKind::kNonsat, AdvKind::kLsgan, AdvKind::kHinge,
                         AdvKind::kDcl}) {
      CHECK(std::isfinite(V(AdvLossD(kind, r, f))));
      const Tensor* dr = kind == AdvKind::kDcl ? &r : nullptr;
      CHECK(std::isfinite(V(AdvLossG(kind, f, dr))));
    }
    Tensor x = Wave(1, 1300, 300 + static_cast<uint64_t>(i));
    Tensor xh = Wave(1, 1300, 400 + static_cast<uint64_t>(i));
    for (SupKind kind : {SupKind::kMae, SupKind::kMse, SupKind::kMrstft}) {
      const double v = V(SupLoss(kind, x, xh));
      CHECK(std::isfinite(v));
      CHECK(v >= 0.0);
    }
  }
}

}  // namespace
}  // namespace bwex
