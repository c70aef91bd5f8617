// tests/test_train.cc

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
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "bwex/common.h"
#include "bwex/train.h"

using bwex::Array;
using bwex::ag::Tensor;
namespace ag = bwex::ag;
namespace nn = bwex::nn;

namespace {

constexpr double kTwoPi = 6.283185307179586;

// Synthetic tone pairs: the target is the input through the fixed linear map
// b = gain * a, which a short convolution can represent exactly.
bwex::PairedBatch ToneBatch(uint64_t seed, int64_t epoch, int64_t step,
                            int64_t batch, int64_t seg, double gain,
                            double amp = 0.5) {
  bwex::Rng rng(seed * 1000003ull + static_cast<uint64_t>(epoch) * 8191ull +
                static_cast<uint64_t>(step) * 131ull + 17ull);
  Array a({batch, 1, seg});
  Array b({batch, 1, seg});
  for (int64_t i = 0; i < batch; ++i) {
    const double f = rng.Uniform(0.01, 0.12);
    const double ph = rng.Uniform(0.0, kTwoPi);
    for (int64_t t = 0; t < seg; ++t) {
      const double v = amp * std::sin(kTwoPi * f * static_cast<double>(t) + ph);
      a.At(i, 0, t) = v;
      b.At(i, 0, t) = gain * v;
    }
  }
  return {Tensor(std::move(a)), Tensor(std::move(b))};
}

bwex::PairedBatch NanBatch(int64_t batch, int64_t seg) {
  Array a = Array::Full({batch, 1, seg},
                        std::numeric_limits<double>::quiet_NaN());
  Array b = a;
  return {Tensor(std::move(a)), Tensor(std::move(b))};
}

// One-convolution linear model.
struct LinearGen {
  nn::Conv1dLayer conv;
  bwex::ModelHandle handle;

  explicit LinearGen(const std::string& prefix, uint64_t seed) {
    bwex::Rng rng(seed);
    conv = nn::Conv1dLayer(prefix + ".c", 1, 1, 5, {1, 1, 1, 2, 2},
                           /*bias=*/true, &rng);
    handle.forward = [this](const Tensor& x) { return conv.Forward(x); };
    conv.CollectParams(&handle.params);
  }
};

// Two-convolution model with a nonlinearity, for the adversarial loops.
struct ToyGen {
  nn::Conv1dLayer c1, c2;
  bwex::ModelHandle handle;

  explicit ToyGen(const std::string& prefix, uint64_t seed) {
    bwex::Rng rng(seed);
    c1 = nn::Conv1dLayer(prefix + ".c1", 1, 4, 5, {1, 1, 1, 2, 2}, true, &rng);
    c2 = nn::Conv1dLayer(prefix + ".c2", 4, 1, 5, {1, 1, 1, 2, 2}, true, &rng);
    handle.forward = [this](const Tensor& x) {
      return c2.Forward(ag::LeakyRelu(c1.Forward(x), 0.2));
    };
    c1.CollectParams(&handle.params);
    c2.CollectParams(&handle.params);
  }
};

// Width-1 convolution initialized to the identity map.
struct IdentityGen {
  nn::Conv1dLayer conv;
  bwex::ModelHandle handle;

  explicit IdentityGen(const std::string& prefix, uint64_t seed) {
    bwex::Rng rng(seed);
    conv = nn::Conv1dLayer(prefix + ".c", 1, 1, 1, {1, 1, 1, 0, 0}, true, &rng);
    handle.forward = [this](const Tensor& x) { return conv.Forward(x); };
    conv.CollectParams(&handle.params);
    std::map<std::string, Array> ident;
    ident[prefix + ".c.w"] = Array::Full({1, 1, 1}, 1.0);
    ident[prefix + ".c.b"] = Array::Zeros({1});
    nn::RestoreValues(ident, handle.params);
  }
};

struct ToyDisc {
  nn::Conv1dLayer c1, c2;
  bwex::DiscHandle handle;

  explicit ToyDisc(const std::string& prefix, uint64_t seed) {
    bwex::Rng rng(seed);
    c1 = nn::Conv1dLayer(prefix + ".c1", 1, 4, 5, {2, 1, 1, 2, 2}, true, &rng);
    c2 = nn::Conv1dLayer(prefix + ".c2", 4, 1, 3, {1, 1, 1, 1, 1}, true, &rng);
    handle.forward = [this](const Tensor& x) {
      Tensor h = ag::LeakyRelu(c1.Forward(x), 0.2);
      bwex::SubOutput s;
      s.activations.push_back(h);
      s.score = c2.Forward(h);
      return std::vector<bwex::SubOutput>{s};
    };
    c1.CollectParams(&handle.params);
    c2.CollectParams(&handle.params);
  }
};

// A config sized so each epoch has `steps` iterations of small batches.
bwex::TrainConfig ToyCfg(bwex::TrainMode mode, int64_t steps, int64_t epochs) {
  bwex::TrainConfig cfg;
  cfg.mode = mode;
  cfg.seg_seconds = 0.01;
  cfg.sample_rate = 16000;
  cfg.batch_size = 2;
  cfg.epochs = epochs;
  cfg.epoch_hours = static_cast<double>(steps) * 2.0 * 0.01 / 3600.0;
  cfg.seed = 11;
  switch (mode) {
    case bwex::TrainMode::kRegression:
      cfg.schedule = bwex::ScheduleKind::kPlateauHalving;
      cfg.lr_g = 1e-2;
      cfg.adam_betas = {0.9, 0.999};
      break;
    case bwex::TrainMode::kCgan:
      cfg.schedule = bwex::ScheduleKind::kLinearDecay;
      cfg.lr_g = 1e-3;
      cfg.lr_d = 5e-4;
      cfg.lr_min = 1e-5;
      cfg.adam_betas = {0.5, 0.999};
      cfg.d_steps_per_iter = 1;
      cfg.g_steps_per_iter = 2;
      break;
    case bwex::TrainMode::kCyclegan:
      cfg.schedule = bwex::ScheduleKind::kWarmupPlateauCosine;
      cfg.lr_g = 1e-3;
      cfg.lr_d = 5e-4;
      cfg.lr_min = 1e-6;
      cfg.adam_betas = {0.5, 0.999};
      cfg.d_steps_per_iter = 1;
      cfg.g_steps_per_iter = 1;
      cfg.warmup_epochs = 1;
      cfg.constant_epochs = 1;
      cfg.cosine_epochs = 3;
      break;
  }
  return cfg;
}

bwex::TrainStreams ToneStreams(int64_t batch, int64_t seg, double gain) {
  bwex::TrainStreams s;
  s.train = [=](uint64_t seed, int64_t epoch, int64_t step) {
    return ToneBatch(seed, epoch, step, batch, seg, gain);
  };
  s.val = [=](uint64_t seed, int64_t /*epoch*/, int64_t step) {
    return ToneBatch(seed + 999, 0, step, batch, seg, gain);
  };
  s.val_batches = 2;
  return s;
}

std::vector<std::string> Lines(const bwex::TrainResult& r) {
  std::vector<std::string> out;
  out.reserve(r.history.size());
  for (const auto& rec : r.history) out.push_back(bwex::HistoryLine(rec));
  return out;
}

bool MapsBitEqual(const std::map<std::string, Array>& x,
                  const std::map<std::string, Array>& y) {
  if (x.size() != y.size()) return false;
  for (const auto& kv : x) {
    auto it = y.find(kv.first);
    if (it == y.end()) return false;
    if (kv.second.dims != it->second.dims) return false;
    if (kv.second.v != it->second.v) return false;
  }
  return true;
}

bool AnyParamChanged(const std::map<std::string, Array>& before,
                     const std::vector<nn::Parameter>& params) {
  for (const auto& p : params) {
    const Array& now = p.t.Value();
    const Array& then = before.at(p.name);
    for (size_t i = 0; i < now.v.size(); ++i)
      if (now.v[i] != then.v[i]) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("epoch length follows the audio-hours budget") {
  CHECK(bwex::EpochLen(bwex::RegressionDefaults()) == 703);
  CHECK(bwex::EpochLen(bwex::CganDefaults()) == 3750);
  bwex::TrainConfig zero = bwex::CganDefaults();
  zero.epoch_hours = 0.0;
  CHECK(bwex::EpochLen(zero) == 0);
}

TEST_CASE("train config json round trips and rejects bad values") {
  bwex::TrainConfig cfg = bwex::CycleganDefaults();
  cfg.seed = 42;
  bwex::TrainConfig back = bwex::TrainConfigFromJson(bwex::TrainConfigJson(cfg));
  CHECK(bwex::TrainConfigJson(back) == bwex::TrainConfigJson(cfg));
  CHECK(back.mode == bwex::TrainMode::kCyclegan);
  CHECK(back.lr_min == 1e-8);
  CHECK(back.seed == 42);

  CHECK_THROWS_AS(bwex::TrainConfigFromJson("{\"batch_size\":0}"),
                  bwex::InvalidArgument);
  CHECK_THROWS_AS(bwex::TrainConfigFromJson("{\"mode\":\"foo\"}"),
                  bwex::InvalidArgument);
  CHECK_THROWS_AS(bwex::TrainConfigFromJson("not json"), bwex::InvalidArgument);
  bwex::TrainConfig frac = cfg;
  frac.seg_seconds = 0.0001;  // 1.6 samples at 16 kHz
  CHECK_THROWS_AS(bwex::ValidateTrainConfig(frac), bwex::InvalidArgument);
}

TEST_CASE("learning-rate schedules hit the pinned probes") {
  // Linear decay: non-increasing, one increment above the floor at the last
  // step, clamped at the floor beyond it.
  const double lr0 = 2e-4, lo = 1e-7;
  double prev = lr0;
  for (int64_t s = 0; s <= 1000; ++s) {
    const double lr = bwex::LinearDecayLr(lr0, lo, s, 1000);
    CHECK(lr <= prev);
    prev = lr;
  }
  CHECK(bwex::LinearDecayLr(lr0, lo, 0, 1000) == lr0);
  CHECK(bwex::LinearDecayLr(lr0, lo, 1000, 1000) == lo);
  CHECK(bwex::LinearDecayLr(lr0, lo, 999, 1000) ==
        doctest::Approx(lo + (lr0 - lo) / 1000.0).epsilon(1e-12));
  CHECK(bwex::LinearDecayLr(lr0, lo, 2000, 1000) == lo);

  // Warmup / constant / cosine probes at epoch boundaries 0, 2, 5, 15.
  const double hi = 4e-4, mn = 1e-8;
  CHECK(bwex::WarmupPlateauCosineLr(hi, mn, 0.0, 2, 3, 10) == mn);
  CHECK(bwex::WarmupPlateauCosineLr(hi, mn, 2.0, 2, 3, 10) == hi);
  CHECK(bwex::WarmupPlateauCosineLr(hi, mn, 5.0, 2, 3, 10) == hi);
  CHECK(bwex::WarmupPlateauCosineLr(hi, mn, 15.0, 2, 3, 10) == mn);
  CHECK(bwex::WarmupPlateauCosineLr(hi, mn, 10.0, 2, 3, 10) ==
        doctest::Approx(0.5 * (hi + mn)).epsilon(1e-12));
  // Non-decreasing over warmup, non-increasing over the cosine segment.
  for (double e = 0.0; e < 2.0; e += 0.05)
    CHECK(bwex::WarmupPlateauCosineLr(hi, mn, e, 2, 3, 10) <=
          bwex::WarmupPlateauCosineLr(hi, mn, e + 0.05, 2, 3, 10));
  for (double e = 5.0; e < 15.0; e += 0.05)
    CHECK(bwex::WarmupPlateauCosineLr(hi, mn, e, 2, 3, 10) >=
          bwex::WarmupPlateauCosineLr(hi, mn, e + 0.05, 2, 3, 10) - 1e-18);
}

TEST_CASE("plateau halving halves after three stalled epochs") {
  bwex::PlateauHalving p(1e-3, 0.01, 3);
  CHECK(p.OnEpochEnd(1.0) == 1e-3);     // first epoch sets the best
  CHECK(p.OnEpochEnd(0.5) == 1e-3);     // big improvement, no stall
  CHECK(p.OnEpochEnd(0.499) == 1e-3);   // <1% improvement: stall 1
  CHECK(p.OnEpochEnd(0.498) == 1e-3);   // stall 2
  CHECK(p.OnEpochEnd(0.4975) == 5e-4);  // stall 3 halves
  // A real improvement resets the stall counter.
  CHECK(p.OnEpochEnd(0.4) == 5e-4);
  CHECK(p.OnEpochEnd(0.399) == 5e-4);
  CHECK(p.OnEpochEnd(0.3985) == 5e-4);
  CHECK(p.BestVal() == 0.3985);

  std::map<std::string, Array> st;
  p.SaveState(&st);
  bwex::PlateauHalving q(1.0, 0.01, 3);
  q.LoadState(st);
  CHECK(q.Lr() == p.Lr());
  CHECK(q.BestVal() == p.BestVal());
  CHECK(q.OnEpochEnd(0.398) == p.OnEpochEnd(0.398));
}

TEST_CASE("history lines round trip exactly") {
  bwex::HistoryRecord r;
  r.epoch = 3;
  r.step = 1234;
  r.audio_seconds = 1234.0 * 16.0 * 3.0;
  r.lr_g = 1.9999999999999998e-4;
  r.lr_d = 1e-7;
  r.values["g_loss"] = 0.1234567890123456789;
  r.values["d_loss"] = -3.0000000000000004;
  r.values["val_mae"] = 1e-300;
  const std::string line = bwex::HistoryLine(r);
  bwex::HistoryRecord back = bwex::ParseHistoryLine(line);
  CHECK(back.epoch == r.epoch);
  CHECK(back.step == r.step);
  CHECK(back.audio_seconds == r.audio_seconds);
  CHECK(back.lr_g == r.lr_g);
  CHECK(back.lr_d == r.lr_d);
  CHECK(back.values == r.values);
  CHECK(bwex::HistoryLine(back) == line);

  CHECK_THROWS_AS(bwex::ParseHistoryLine("epoch=1 lr_g=0"),
                  bwex::InvalidArgument);
  CHECK_THROWS_AS(bwex::ParseHistoryLine("step=1 junk"),
                  bwex::InvalidArgument);
  CHECK_THROWS_AS(bwex::ParseHistoryLine("step=1 g_loss=abc"),
                  bwex::InvalidArgument);
}

TEST_CASE("toy regression learns, accounts audio, and is deterministic") {
  const bwex::TrainConfig cfg = ToyCfg(bwex::TrainMode::kRegression, 20, 10);
  const int64_t seg = bwex::SegSamples(cfg);
  bwex::TrainStreams streams = ToneStreams(cfg.batch_size, seg, 0.7);

  LinearGen gen("g", 5);
  bwex::TrainResult res = bwex::TrainRegression(cfg, gen.handle, streams);

  REQUIRE(res.history.size() == 10);
  CHECK(res.history.back().values.at("val_loss") <
        res.history.front().values.at("val_loss"));
  CHECK(res.state.step == 200);
  CHECK(res.g_updates == 200);
  CHECK(res.d_updates == 0);
  CHECK(res.nan_recoveries == 0);
  for (const auto& rec : res.history) {
    CHECK(rec.audio_seconds ==
          doctest::Approx(static_cast<double>(rec.step) * 2.0 * 0.01)
              .epsilon(1e-12));
    CHECK(std::isfinite(rec.values.at("train_loss")));
  }
  CHECK(res.state.audio_seconds_seen == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(res.state.best_val == res.state.best_val);  // finite, not NaN

  LinearGen gen2("g", 5);
  bwex::TrainResult rerun = bwex::TrainRegression(cfg, gen2.handle, streams);
  CHECK(Lines(rerun) == Lines(res));
}

TEST_CASE("trainers reject empty or misconfigured inputs") {
  bwex::TrainConfig cfg = ToyCfg(bwex::TrainMode::kRegression, 20, 2);
  const int64_t seg = bwex::SegSamples(cfg);
  bwex::TrainStreams streams = ToneStreams(cfg.batch_size, seg, 0.7);
  LinearGen gen("g", 5);

  bwex::TrainConfig zero = cfg;
  zero.epoch_hours = 0.0;
  CHECK_THROWS_AS(bwex::TrainRegression(zero, gen.handle, streams),
                  bwex::InvalidArgument);

  bwex::TrainStreams noval = streams;
  noval.val_batches = 0;
  CHECK_THROWS_AS(bwex::TrainRegression(cfg, gen.handle, noval),
                  bwex::InvalidArgument);

  bwex::TrainConfig wrongsched = cfg;
  wrongsched.schedule = bwex::ScheduleKind::kLinearDecay;
  CHECK_THROWS_AS(bwex::TrainRegression(wrongsched, gen.handle, streams),
                  bwex::InvalidArgument);

  bwex::TrainConfig gancfg = ToyCfg(bwex::TrainMode::kCgan, 10, 2);
  ToyDisc dis("d", 6);
  bwex::TrainStreams notrain;
  notrain.train = nullptr;
  CHECK_THROWS_AS(bwex::TrainCgan(gancfg, bwex::LossSpec(), gen.handle,
                                  dis.handle, notrain),
                  bwex::InvalidArgument);

  // Batches must match the configured batch size and segment length.
  bwex::TrainStreams badshape = streams;
  badshape.train = [&](uint64_t, int64_t, int64_t) {
    return ToneBatch(1, 0, 0, cfg.batch_size + 1, seg, 0.7);
  };
  CHECK_THROWS_AS(bwex::TrainRegression(cfg, gen.handle, badshape),
                  bwex::InvalidArgument);
}

TEST_CASE("cgan alternation bookkeeping and final learning rate") {
  const bwex::TrainConfig cfg = ToyCfg(bwex::TrainMode::kCgan, 10, 2);
  const int64_t seg = bwex::SegSamples(cfg);
  bwex::TrainStreams streams = ToneStreams(cfg.batch_size, seg, 0.7);

  ToyGen gen("g", 21);
  ToyDisc dis("d", 22);
  bwex::LossSpec spec;  // lsgan adversary, mae supervision at 0.1
  bwex::TrainResult res =
      bwex::TrainCgan(cfg, spec, gen.handle, dis.handle, streams);

  // After k iterations the generator has 2k updates and the critic k.
  const int64_t iters = 2 * 10;
  CHECK(res.g_updates == 2 * iters);
  CHECK(res.d_updates == iters);
  CHECK(res.state.step == 3 * iters);
  CHECK(res.state.audio_seconds_seen ==
        doctest::Approx(3.0 * iters * 2.0 * 0.01).epsilon(1e-12));
  REQUIRE(res.history.size() == static_cast<size_t>(iters));
  for (const auto& rec : res.history) {
    CHECK(std::isfinite(rec.values.at("g_loss")));
    CHECK(std::isfinite(rec.values.at("d_loss")));
    CHECK(std::isfinite(rec.values.at("adv_g")));
    CHECK(std::isfinite(rec.values.at("sup")));
    CHECK(rec.audio_seconds ==
          doctest::Approx(static_cast<double>(rec.step) * 2.0 * 0.01)
              .epsilon(1e-12));
  }
  // Learning rates decay linearly; the last iteration sits one increment
  // above the floor.
  for (size_t i = 1; i < res.history.size(); ++i) {
    CHECK(res.history[i].lr_g <= res.history[i - 1].lr_g);
    CHECK(res.history[i].lr_d <= res.history[i - 1].lr_d);
  }
  CHECK(res.history.back().lr_g ==
        doctest::Approx(cfg.lr_min + (cfg.lr_g - cfg.lr_min) / iters)
            .epsilon(1e-12));
  // Validation tracking ran.
  CHECK(std::isfinite(res.history.back().values.at("val_mae")));
}

TEST_CASE("cgan with gradient penalty trains deterministically") {
  const bwex::TrainConfig cfg = ToyCfg(bwex::TrainMode::kCgan, 5, 2);
  const int64_t seg = bwex::SegSamples(cfg);
  bwex::TrainStreams streams = ToneStreams(cfg.batch_size, seg, 0.7);
  streams.val = nullptr;
  streams.val_batches = 0;

  bwex::LossSpec spec;
  spec.adv_kind = bwex::AdvKind::kWganGp;
  spec.gp_weight = 10.0;
  spec.gp_clip = 1e-3;

  ToyGen g1("g", 31);
  ToyDisc d1("d", 32);
  bwex::TrainResult a = bwex::TrainCgan(cfg, spec, g1.handle, d1.handle, streams);
  ToyGen g2("g", 31);
  ToyDisc d2("d", 32);
  bwex::TrainResult b = bwex::TrainCgan(cfg, spec, g2.handle, d2.handle, streams);

  CHECK(Lines(a) == Lines(b));
  CHECK(MapsBitEqual(nn::SnapshotValues(g1.handle.params),
                     nn::SnapshotValues(g2.handle.params)));
  for (const auto& rec : a.history) {
    CHECK(std::isfinite(rec.values.at("g_loss")));
    CHECK(std::isfinite(rec.values.at("d_loss")));
  }
}

TEST_CASE("cyclegan starts at zero cycle and identity loss and updates all networks") {
  bwex::TrainConfig cfg = ToyCfg(bwex::TrainMode::kCyclegan, 10, 5);
  const int64_t seg = bwex::SegSamples(cfg);

  bwex::CycleStreams streams;
  streams.a = [=](uint64_t seed, int64_t epoch, int64_t step) {
    return ToneBatch(seed, epoch, step, 2, seg, 1.0, 0.4).a;
  };
  streams.b = [=](uint64_t seed, int64_t epoch, int64_t step) {
    return ToneBatch(seed + 7, epoch, step, 2, seg, 1.0, 0.8).a;
  };

  bwex::LossSpec spec;
  spec.lambda_cyc = 10.0;
  spec.lambda_id = 10.0;

  // Identity-initialized generators: cycle and identity terms open at zero.
  {
    IdentityGen gab("gab", 41), gba("gba", 42);
    ToyDisc da("da", 43), db("db", 44);
    bwex::TrainConfig one = cfg;
    one.epochs = 1;
    one.epoch_hours = 2.0 * 2.0 * 0.01 / 3600.0;  // two iterations
    bwex::TrainResult res = bwex::TrainCyclegan(
        one, spec, gab.handle, gba.handle, da.handle, db.handle, streams);
    REQUIRE(!res.history.empty());
    CHECK(res.history.front().values.at("cyc") == 0.0);
    CHECK(res.history.front().values.at("id") == 0.0);
  }

  // Randomly initialized run: finite losses and all four networks move.
  {
    ToyGen gab("gab", 45), gba("gba", 46);
    ToyDisc da("da", 47), db("db", 48);
    auto pab = nn::SnapshotValues(gab.handle.params);
    auto pba = nn::SnapshotValues(gba.handle.params);
    auto pda = nn::SnapshotValues(da.handle.params);
    auto pdb = nn::SnapshotValues(db.handle.params);

    bwex::TrainResult res = bwex::TrainCyclegan(
        cfg, spec, gab.handle, gba.handle, da.handle, db.handle, streams);
    CHECK(res.history.size() == 50);
    CHECK(res.g_updates == 50);
    CHECK(res.d_updates == 50);
    CHECK(res.state.step == 100);
    for (const auto& rec : res.history) {
      CHECK(std::isfinite(rec.values.at("g_loss")));
      CHECK(std::isfinite(rec.values.at("d_loss")));
      CHECK(std::isfinite(rec.values.at("cyc")));
    }
    CHECK(AnyParamChanged(pab, gab.handle.params));
    CHECK(AnyParamChanged(pba, gba.handle.params));
    CHECK(AnyParamChanged(pda, da.handle.params));
    CHECK(AnyParamChanged(pdb, db.handle.params));
  }
}

TEST_CASE("paired cyclegan adds the supervision term") {
  bwex::TrainConfig cfg = ToyCfg(bwex::TrainMode::kCyclegan, 5, 1);
  const int64_t seg = bwex::SegSamples(cfg);

  bwex::CycleStreams streams;
  streams.use_paired = true;
  streams.paired = [=](uint64_t seed, int64_t epoch, int64_t step) {
    return ToneBatch(seed, epoch, step, 2, seg, 0.7);
  };

  bwex::LossSpec spec;
  spec.lambda_sup = 0.1;

  ToyGen gab("gab", 51), gba("gba", 52);
  ToyDisc da("da", 53), db("db", 54);
  bwex::TrainResult res = bwex::TrainCyclegan(
      cfg, spec, gab.handle, gba.handle, da.handle, db.handle, streams);
  REQUIRE(res.history.size() == 5);
  for (const auto& rec : res.history) {
    CHECK(std::isfinite(rec.values.at("sup")));
    CHECK(rec.values.at("sup") >= 0.0);
  }
}

TEST_CASE("divergence recovery halves rates once then aborts on a second event") {
  bwex::TrainConfig cfg = ToyCfg(bwex::TrainMode::kRegression, 20, 3);
  const int64_t seg = bwex::SegSamples(cfg);
  bwex::TrainStreams clean = ToneStreams(cfg.batch_size, seg, 0.7);

  // A transient bad batch: NaN the first time (epoch 1, step 3) is served.
  {
    auto count = std::make_shared<int>(0);
    bwex::TrainStreams flaky = clean;
    flaky.train = [=](uint64_t seed, int64_t epoch, int64_t step) {
      if (epoch == 1 && step == 3 && (*count)++ == 0)
        return NanBatch(cfg.batch_size, seg);
      return ToneBatch(seed, epoch, step, cfg.batch_size, seg, 0.7);
    };
    LinearGen gen("g", 5);
    bwex::TrainResult res = bwex::TrainRegression(cfg, gen.handle, flaky);
    CHECK(res.nan_recoveries == 1);
    REQUIRE(res.history.size() == 3);
    // The epoch that diverged was replayed from its start at half the rate,
    // with the steps of the abandoned attempt rewound.
    CHECK(res.history[0].lr_g == cfg.lr_g);
    CHECK(res.history[1].lr_g == 0.5 * cfg.lr_g);
    CHECK(res.history[1].step == 40);
    CHECK(res.state.step == 60);
  }

  // A persistent bad batch aborts on the second divergence with the last
  // good parameters restored.
  {
    bwex::TrainStreams broken = clean;
    broken.train = [=](uint64_t seed, int64_t epoch, int64_t step) {
      if (epoch == 1 && step == 3) return NanBatch(cfg.batch_size, seg);
      return ToneBatch(seed, epoch, step, cfg.batch_size, seg, 0.7);
    };
    LinearGen gen("g", 5);
    CHECK_THROWS_AS(bwex::TrainRegression(cfg, gen.handle, broken),
                    bwex::RuntimeError);

    // Epoch 0 is identical to a clean one-epoch run, and that is the state
    // the abort leaves behind.
    bwex::TrainConfig one = cfg;
    one.epochs = 1;
    LinearGen ref("g", 5);
    bwex::TrainRegression(one, ref.handle, clean);
    CHECK(MapsBitEqual(nn::SnapshotValues(gen.handle.params),
                       nn::SnapshotValues(ref.handle.params)));
  }
}

TEST_CASE("train checkpoint round trip resumes identically") {
  namespace fs = std::filesystem;
  const std::string path =
      (fs::temp_directory_path() / "bwex_train_ck_test.bin").string();

  bwex::TrainConfig cfg = bwex::RegressionDefaults();
  cfg.seed = 3;
  const int64_t seg = 160;
  bwex::PairedBatch fixed = ToneBatch(9, 0, 0, 2, seg, 0.7);

  LinearGen gen("g", 5);
  nn::Adam opt(gen.handle.params, 1e-3, 0.9, 0.999);
  auto one_step = [&](const bwex::ModelHandle& h, nn::Adam* o) {
    Tensor loss = bwex::SupLoss(bwex::SupKind::kMae, fixed.b,
                                h.forward(fixed.a));
    o->ZeroGrad();
    ag::Backward(loss);
    o->Step();
    return loss.Value().v[0];
  };
  for (int i = 0; i < 3; ++i) one_step(gen.handle, &opt);

  bwex::TrainState st;
  st.step = 3;
  st.epoch = 1;
  st.audio_seconds_seen = 3 * 2 * 0.01;
  st.best_val = 0.42;
  st.rng_seed = cfg.seed;
  bwex::SaveTrainCheckpoint(path, cfg, st, gen.handle.params, {{"g", &opt}});

  // Uninterrupted continuation.
  const double next_loss = one_step(gen.handle, &opt);
  auto next_params = nn::SnapshotValues(gen.handle.params);

  // Fresh model and optimizer, restored from the file.
  LinearGen gen2("g", 99);
  nn::Adam opt2(gen2.handle.params, 1e-3, 0.9, 0.999);
  bwex::TrainState back =
      bwex::LoadTrainCheckpoint(path, cfg, gen2.handle.params, {{"g", &opt2}});
  CHECK(back.step == st.step);
  CHECK(back.epoch == st.epoch);
  CHECK(back.audio_seconds_seen == st.audio_seconds_seen);
  CHECK(back.best_val == st.best_val);
  CHECK(back.rng_seed == st.rng_seed);

  const double resumed_loss = one_step(gen2.handle, &opt2);
  CHECK(resumed_loss == next_loss);
  CHECK(MapsBitEqual(nn::SnapshotValues(gen2.handle.params), next_params));

  // Resuming under a different config is refused.
  bwex::TrainConfig other = cfg;
  other.lr_g = 1e-3;
  LinearGen gen3("g", 1);
  nn::Adam opt3(gen3.handle.params, 1e-3, 0.9, 0.999);
  CHECK_THROWS_AS(
      bwex::LoadTrainCheckpoint(path, other, gen3.handle.params, {{"g", &opt3}}),
      bwex::InvalidArgument);
  fs::remove(path);
}
