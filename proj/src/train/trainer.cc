// src/train/trainer.cc

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

#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "bwex/checkpoint.h"
#include "bwex/common.h"
#include "bwex/train.h"

namespace bwex {

namespace {

// Per-call RNG seeds are pure functions of (run seed, epoch, substep), so a
// rerun or a post-restore replay draws the same randomness.
uint64_t MixSeed(uint64_t seed, int64_t epoch, int64_t substep) {
  uint64_t h = seed + 0x9E3779B97F4A7C15ull;
  h ^= (static_cast<uint64_t>(epoch) + 1) * 0xBF58476D1CE4E5B9ull;
  h ^= (static_cast<uint64_t>(substep) + 1) * 0x94D049BB133111EBull;
  h ^= h >> 31;
  return h;
}

void CheckBatch(const ag::Tensor& t, int64_t batch, int64_t seg,
                const char* what) {
  const Array& a = t.Value();
  if (a.Rank() != 3 || a.Dim(0) != batch || a.Dim(1) != 1 || a.Dim(2) != seg)
    throw InvalidArgument(std::string("stream batch has wrong shape for ") +
                          what);
}

double ScalarLoss(const ag::Tensor& t) { return t.Value().v[0]; }

// Everything a divergence recovery must rewind: parameter values, optimizer
// state, schedule state, and the counters.
struct Snapshot {
  std::map<std::string, Array> values;
  std::map<std::string, Array> opt;
  std::map<std::string, Array> extra;
  TrainState state;
  int64_t g_updates = 0;
  int64_t d_updates = 0;
  double lr_scale = 1.0;
};

Snapshot TakeSnapshot(
    const std::vector<nn::Parameter>& params,
    const std::vector<std::pair<std::string, const nn::Adam*>>& opts,
    const TrainState& st, int64_t g_updates, int64_t d_updates,
    double lr_scale, const std::map<std::string, Array>& extra) {
  Snapshot s;
  s.values = nn::SnapshotValues(params);
  for (const auto& po : opts) po.second->SaveState(po.first, &s.opt);
  s.extra = extra;
  s.state = st;
  s.g_updates = g_updates;
  s.d_updates = d_updates;
  s.lr_scale = lr_scale;
  return s;
}

void RestoreSnapshot(const Snapshot& s,
                     const std::vector<nn::Parameter>& params,
                     const std::vector<std::pair<std::string, nn::Adam*>>& opts,
                     TrainState* st, int64_t* g_updates, int64_t* d_updates,
                     double* lr_scale) {
  nn::RestoreValues(s.values, params);
  for (const auto& po : opts) po.second->LoadState(po.first, s.opt);
  *st = s.state;
  *g_updates = s.g_updates;
  *d_updates = s.d_updates;
  *lr_scale = s.lr_scale;
}

// First divergence: restore and halve the learning-rate scale, then resume
// from the snapshot.  Second divergence: restore and abort.
void HandleDivergence(TrainResult* res, double* lr_scale,
                      std::ostream* log) {
  if (res->nan_recoveries >= 1)
    throw RuntimeError(
        "training diverged again after a recovery; aborting with the last "
        "good parameters restored");
  res->nan_recoveries += 1;
  *lr_scale *= 0.5;
  if (log) *log << "# divergence: restored last good state, halved learning rates\n";
}

void EmitRecord(TrainResult* res, std::ostream* log, HistoryRecord r) {
  if (log) *log << HistoryLine(r) << "\n";
  res->history.push_back(std::move(r));
}

void RequireHandles(const ModelHandle& m, const char* what) {
  if (!m.forward || m.params.empty())
    throw InvalidArgument(std::string(what) +
                          " handle needs a forward function and parameters");
}

void RequireHandles(const DiscHandle& d, const char* what) {
  if (!d.forward || d.params.empty())
    throw InvalidArgument(std::string(what) +
                          " handle needs a forward function and parameters");
}

std::vector<nn::Parameter> ConcatParams(
    const std::vector<const std::vector<nn::Parameter>*>& lists) {
  std::vector<nn::Parameter> out;
  for (const auto* l : lists) out.insert(out.end(), l->begin(), l->end());
  return out;
}

}  // namespace

TrainResult TrainRegression(const TrainConfig& cfg, const ModelHandle& gen,
                            const TrainStreams& streams, std::ostream* log) {
  ValidateTrainConfig(cfg);
  if (cfg.mode != TrainMode::kRegression)
    throw InvalidArgument("config mode is not regression");
  if (cfg.schedule != ScheduleKind::kPlateauHalving)
    throw InvalidArgument("regression training uses the plateau_halving schedule");
  RequireHandles(gen, "generator");
  if (!streams.train) throw InvalidArgument("training stream required");
  if (!streams.val || streams.val_batches <= 0)
    throw InvalidArgument("validation stream required for plateau scheduling");
  const int64_t epoch_len = EpochLen(cfg);
  if (epoch_len <= 0)
    throw InvalidArgument("zero-length epoch: increase epoch_hours");
  const int64_t seg = SegSamples(cfg);

  nn::Adam opt(gen.params, cfg.lr_g, cfg.adam_betas.first,
               cfg.adam_betas.second);
  PlateauHalving plateau(cfg.lr_g, cfg.plateau_rel_improve,
                         cfg.plateau_patience);

  TrainResult res;
  TrainState st;
  st.rng_seed = cfg.seed;
  double lr_scale = 1.0;

  auto plateau_state = [&plateau]() {
    std::map<std::string, Array> m;
    plateau.SaveState(&m);
    return m;
  };
  auto effective_lr = [&]() {
    return std::max(cfg.lr_min, plateau.Lr() * lr_scale);
  };

  // Validation batches are indexed with epoch fixed at zero, so the held-out
  // set is identical every epoch.
  auto validate = [&]() {
    ag::NoGradGuard ng;
    double sum = 0.0;
    for (int64_t v = 0; v < streams.val_batches; ++v) {
      PairedBatch b = streams.val(cfg.seed, 0, v);
      CheckBatch(b.a, cfg.batch_size, seg, "validation input");
      CheckBatch(b.b, cfg.batch_size, seg, "validation target");
      sum += ScalarLoss(SupLoss(SupKind::kMae, b.b, gen.forward(b.a)));
    }
    return sum / static_cast<double>(streams.val_batches);
  };

  std::vector<std::pair<std::string, const nn::Adam*>> copts = {{"g", &opt}};
  std::vector<std::pair<std::string, nn::Adam*>> mopts = {{"g", &opt}};
  Snapshot snap = TakeSnapshot(gen.params, copts, st, 0, 0, lr_scale,
                               plateau_state());

  int64_t e = 0;
  while (e < cfg.epochs) {
    bool failed = false;
    double train_sum = 0.0;
    for (int64_t s = 0; s < epoch_len; ++s) {
      PairedBatch b = streams.train(cfg.seed, e, s);
      CheckBatch(b.a, cfg.batch_size, seg, "training input");
      CheckBatch(b.b, cfg.batch_size, seg, "training target");
      ag::Tensor loss = SupLoss(SupKind::kMae, b.b, gen.forward(b.a));
      const double lval = ScalarLoss(loss);
      if (!std::isfinite(lval)) {
        failed = true;
        break;
      }
      opt.ZeroGrad();
      ag::Backward(loss);
      opt.Step();
      res.g_updates += 1;
      st.step += 1;
      st.audio_seconds_seen =
          static_cast<double>(st.step) * static_cast<double>(cfg.batch_size) *
          cfg.seg_seconds;
      train_sum += lval;
    }
    double val = 0.0;
    if (!failed) {
      val = validate();
      if (!std::isfinite(val)) failed = true;
    }
    if (failed) {
      RestoreSnapshot(snap, gen.params, mopts, &st, &res.g_updates,
                      &res.d_updates, &lr_scale);
      plateau.LoadState(snap.extra);
      HandleDivergence(&res, &lr_scale, log);
      opt.SetLr(effective_lr());
      e = st.epoch;
      continue;
    }
    const double lr_used = opt.Lr();
    plateau.OnEpochEnd(val);
    opt.SetLr(effective_lr());
    st.epoch = e + 1;
    st.best_val = plateau.BestVal();

    HistoryRecord r;
    r.epoch = e;
    r.step = st.step;
    r.audio_seconds = st.audio_seconds_seen;
    r.lr_g = lr_used;
    r.lr_d = 0.0;
    r.values["train_loss"] = train_sum / static_cast<double>(epoch_len);
    r.values["val_loss"] = val;
    EmitRecord(&res, log, std::move(r));

    snap = TakeSnapshot(gen.params, copts, st, res.g_updates, res.d_updates,
                        lr_scale, plateau_state());
    ++e;
  }
  res.state = st;
  return res;
}

TrainResult TrainCgan(const TrainConfig& cfg, const LossSpec& loss,
                      const ModelHandle& gen, const DiscHandle& dis,
                      const TrainStreams& streams, std::ostream* log,
                      ActivationFn afm_aux) {
  ValidateTrainConfig(cfg);
  if (cfg.mode != TrainMode::kCgan)
    throw InvalidArgument("config mode is not cgan");
  if (cfg.schedule != ScheduleKind::kLinearDecay)
    throw InvalidArgument("cgan training uses the linear_decay schedule");
  ValidateLossSpec(loss);
  RequireHandles(gen, "generator");
  RequireHandles(dis, "discriminator");
  if (!streams.train) throw InvalidArgument("training stream required");
  const int64_t epoch_len = EpochLen(cfg);
  if (epoch_len <= 0)
    throw InvalidArgument("zero-length epoch: increase epoch_hours");
  const int64_t seg = SegSamples(cfg);
  const int64_t substeps = cfg.d_steps_per_iter + cfg.g_steps_per_iter;
  const int64_t total_iters = cfg.epochs * epoch_len;

  nn::Adam opt_g(gen.params, cfg.lr_g, cfg.adam_betas.first,
                 cfg.adam_betas.second);
  nn::Adam opt_d(dis.params, cfg.lr_d, cfg.adam_betas.first,
                 cfg.adam_betas.second);
  std::vector<nn::Parameter> all = ConcatParams({&gen.params, &dis.params});
  std::vector<std::pair<std::string, const nn::Adam*>> copts = {
      {"g", &opt_g}, {"d", &opt_d}};
  std::vector<std::pair<std::string, nn::Adam*>> mopts = {{"g", &opt_g},
                                                          {"d", &opt_d}};

  TrainResult res;
  TrainState st;
  st.rng_seed = cfg.seed;
  double lr_scale = 1.0;
  Snapshot snap = TakeSnapshot(all, copts, st, 0, 0, lr_scale, {});

  auto draw = [&](int64_t epoch, int64_t sub) {
    PairedBatch b = streams.train(cfg.seed, epoch, sub);
    CheckBatch(b.a, cfg.batch_size, seg, "training input");
    CheckBatch(b.b, cfg.batch_size, seg, "training target");
    return b;
  };
  auto bump_step = [&]() {
    st.step += 1;
    st.audio_seconds_seen = static_cast<double>(st.step) *
                            static_cast<double>(cfg.batch_size) *
                            cfg.seg_seconds;
  };

  int64_t e = 0;
  while (e < cfg.epochs) {
    bool failed = false;
    for (int64_t s = 0; s < epoch_len && !failed; ++s) {
      const int64_t iter = e * epoch_len + s;
      const double lr_g_now = std::max(
          cfg.lr_min,
          LinearDecayLr(cfg.lr_g, cfg.lr_min, iter, total_iters) * lr_scale);
      const double lr_d_now = std::max(
          cfg.lr_min,
          LinearDecayLr(cfg.lr_d, cfg.lr_min, iter, total_iters) * lr_scale);
      opt_g.SetLr(lr_g_now);
      opt_d.SetLr(lr_d_now);

      GanLosses last{};
      double last_d = 0.0;
      for (int64_t d = 0; d < cfg.d_steps_per_iter && !failed; ++d) {
        const int64_t sub = s * substeps + d;
        PairedBatch b = draw(e, sub);
        Rng rng(MixSeed(cfg.seed, e, sub));
        GanLosses gl =
            CganObjective(loss, gen.forward, dis.forward, b.a, b.b, &rng,
                          afm_aux);
        last_d = ScalarLoss(gl.d_loss);
        if (!std::isfinite(last_d) || !std::isfinite(ScalarLoss(gl.g_loss))) {
          failed = true;
          break;
        }
        opt_g.ZeroGrad();
        opt_d.ZeroGrad();
        ag::Backward(gl.d_loss);
        if (loss.adv_kind == AdvKind::kWganGp)
          nn::ClipGradNorm(dis.params, loss.gp_clip);
        opt_d.Step();
        res.d_updates += 1;
        bump_step();
      }
      for (int64_t g = 0; g < cfg.g_steps_per_iter && !failed; ++g) {
        const int64_t sub = s * substeps + cfg.d_steps_per_iter + g;
        PairedBatch b = draw(e, sub);
        Rng rng(MixSeed(cfg.seed, e, sub));
        GanLosses gl =
            CganObjective(loss, gen.forward, dis.forward, b.a, b.b, &rng,
                          afm_aux);
        if (!std::isfinite(ScalarLoss(gl.g_loss)) ||
            !std::isfinite(ScalarLoss(gl.d_loss))) {
          failed = true;
          break;
        }
        opt_g.ZeroGrad();
        opt_d.ZeroGrad();
        ag::Backward(gl.g_loss);
        opt_g.Step();
        res.g_updates += 1;
        bump_step();
        last = std::move(gl);
      }
      if (failed) break;

      HistoryRecord r;
      r.epoch = e;
      r.step = st.step;
      r.audio_seconds = st.audio_seconds_seen;
      r.lr_g = lr_g_now;
      r.lr_d = lr_d_now;
      r.values["g_loss"] = ScalarLoss(last.g_loss);
      r.values["d_loss"] = last_d;
      r.values["adv_g"] = last.adv_g_value;
      r.values["adv_d"] = last.adv_d_value;
      r.values["sup"] = last.sup_value;
      EmitRecord(&res, log, std::move(r));
    }
    if (!failed && streams.val && streams.val_batches > 0) {
      ag::NoGradGuard ng;
      double sum = 0.0;
      for (int64_t v = 0; v < streams.val_batches; ++v) {
        PairedBatch b = streams.val(cfg.seed, 0, v);
        CheckBatch(b.a, cfg.batch_size, seg, "validation input");
        CheckBatch(b.b, cfg.batch_size, seg, "validation target");
        sum += ScalarLoss(SupLoss(SupKind::kMae, b.b, gen.forward(b.a)));
      }
      const double val = sum / static_cast<double>(streams.val_batches);
      if (!std::isfinite(val)) {
        failed = true;
      } else {
        if (st.epoch == 0 || val < st.best_val) st.best_val = val;
        res.history.back().values["val_mae"] = val;
      }
    }
    if (failed) {
      RestoreSnapshot(snap, all, mopts, &st, &res.g_updates, &res.d_updates,
                      &lr_scale);
      HandleDivergence(&res, &lr_scale, log);
      e = st.epoch;
      continue;
    }
    st.epoch = e + 1;
    snap = TakeSnapshot(all, copts, st, res.g_updates, res.d_updates, lr_scale,
                        {});
    ++e;
  }
  res.state = st;
  return res;
}

TrainResult TrainCyclegan(const TrainConfig& cfg, const LossSpec& loss,
                          const ModelHandle& g_ab, const ModelHandle& g_ba,
                          const DiscHandle& d_a, const DiscHandle& d_b,
                          const CycleStreams& streams, std::ostream* log) {
  ValidateTrainConfig(cfg);
  if (cfg.mode != TrainMode::kCyclegan)
    throw InvalidArgument("config mode is not cyclegan");
  if (cfg.schedule != ScheduleKind::kWarmupPlateauCosine)
    throw InvalidArgument(
        "cyclegan training uses the warmup_plateau_cosine schedule");
  ValidateLossSpec(loss);
  RequireHandles(g_ab, "generator a->b");
  RequireHandles(g_ba, "generator b->a");
  RequireHandles(d_a, "discriminator a");
  RequireHandles(d_b, "discriminator b");
  if (streams.use_paired) {
    if (!streams.paired) throw InvalidArgument("paired stream required");
  } else {
    if (!streams.a || !streams.b)
      throw InvalidArgument("both domain streams required");
  }
  const int64_t epoch_len = EpochLen(cfg);
  if (epoch_len <= 0)
    throw InvalidArgument("zero-length epoch: increase epoch_hours");
  const int64_t seg = SegSamples(cfg);
  const int64_t substeps = cfg.d_steps_per_iter + cfg.g_steps_per_iter;

  std::vector<nn::Parameter> gen_params =
      ConcatParams({&g_ab.params, &g_ba.params});
  std::vector<nn::Parameter> dis_params =
      ConcatParams({&d_a.params, &d_b.params});
  nn::Adam opt_g(gen_params, cfg.lr_g, cfg.adam_betas.first,
                 cfg.adam_betas.second);
  nn::Adam opt_d(dis_params, cfg.lr_d, cfg.adam_betas.first,
                 cfg.adam_betas.second);
  std::vector<nn::Parameter> all = ConcatParams({&gen_params, &dis_params});
  std::vector<std::pair<std::string, const nn::Adam*>> copts = {
      {"g", &opt_g}, {"d", &opt_d}};
  std::vector<std::pair<std::string, nn::Adam*>> mopts = {{"g", &opt_g},
                                                          {"d", &opt_d}};

  TrainResult res;
  TrainState st;
  st.rng_seed = cfg.seed;
  double lr_scale = 1.0;
  Snapshot snap = TakeSnapshot(all, copts, st, 0, 0, lr_scale, {});

  auto draw = [&](int64_t epoch, int64_t sub) {
    PairedBatch b;
    if (streams.use_paired) {
      b = streams.paired(cfg.seed, epoch, sub);
    } else {
      b.a = streams.a(cfg.seed, epoch, sub);
      b.b = streams.b(cfg.seed, epoch, sub);
    }
    CheckBatch(b.a, cfg.batch_size, seg, "domain a");
    CheckBatch(b.b, cfg.batch_size, seg, "domain b");
    return b;
  };
  auto bump_step = [&]() {
    st.step += 1;
    st.audio_seconds_seen = static_cast<double>(st.step) *
                            static_cast<double>(cfg.batch_size) *
                            cfg.seg_seconds;
  };
  auto objective = [&](int64_t epoch, int64_t sub) {
    PairedBatch b = draw(epoch, sub);
    Rng rng(MixSeed(cfg.seed, epoch, sub));
    return CycleganObjective(loss, g_ab.forward, g_ba.forward, d_a.forward,
                             d_b.forward, b.a, b.b, &rng, streams.use_paired);
  };

  int64_t e = 0;
  while (e < cfg.epochs) {
    bool failed = false;
    for (int64_t s = 0; s < epoch_len && !failed; ++s) {
      const double epoch_f =
          static_cast<double>(e) +
          static_cast<double>(s) / static_cast<double>(epoch_len);
      const double lr_g_now =
          std::max(cfg.lr_min,
                   WarmupPlateauCosineLr(cfg.lr_g, cfg.lr_min, epoch_f,
                                         cfg.warmup_epochs, cfg.constant_epochs,
                                         cfg.cosine_epochs) *
                       lr_scale);
      const double lr_d_now =
          std::max(cfg.lr_min,
                   WarmupPlateauCosineLr(cfg.lr_d, cfg.lr_min, epoch_f,
                                         cfg.warmup_epochs, cfg.constant_epochs,
                                         cfg.cosine_epochs) *
                       lr_scale);
      opt_g.SetLr(lr_g_now);
      opt_d.SetLr(lr_d_now);

      GanLosses last{};
      double last_d = 0.0;
      for (int64_t d = 0; d < cfg.d_steps_per_iter && !failed; ++d) {
        GanLosses gl = objective(e, s * substeps + d);
        last_d = ScalarLoss(gl.d_loss);
        if (!std::isfinite(last_d) || !std::isfinite(ScalarLoss(gl.g_loss))) {
          failed = true;
          break;
        }
        opt_g.ZeroGrad();
        opt_d.ZeroGrad();
        ag::Backward(gl.d_loss);
        if (loss.adv_kind == AdvKind::kWganGp)
          nn::ClipGradNorm(dis_params, loss.gp_clip);
        opt_d.Step();
        res.d_updates += 1;
        bump_step();
      }
      for (int64_t g = 0; g < cfg.g_steps_per_iter && !failed; ++g) {
        GanLosses gl = objective(e, s * substeps + cfg.d_steps_per_iter + g);
        if (!std::isfinite(ScalarLoss(gl.g_loss)) ||
            !std::isfinite(ScalarLoss(gl.d_loss))) {
          failed = true;
          break;
        }
        opt_g.ZeroGrad();
        opt_d.ZeroGrad();
        ag::Backward(gl.g_loss);
        opt_g.Step();
        res.g_updates += 1;
        bump_step();
        last = std::move(gl);
      }
      if (failed) break;

      HistoryRecord r;
      r.epoch = e;
      r.step = st.step;
      r.audio_seconds = st.audio_seconds_seen;
      r.lr_g = lr_g_now;
      r.lr_d = lr_d_now;
      r.values["g_loss"] = ScalarLoss(last.g_loss);
      r.values["d_loss"] = last_d;
      r.values["adv_g"] = last.adv_g_value;
      r.values["adv_d"] = last.adv_d_value;
      r.values["cyc"] = last.cyc_value;
      r.values["id"] = last.id_value;
      if (streams.use_paired) r.values["sup"] = last.sup_value;
      EmitRecord(&res, log, std::move(r));
    }
    if (failed) {
      RestoreSnapshot(snap, all, mopts, &st, &res.g_updates, &res.d_updates,
                      &lr_scale);
      HandleDivergence(&res, &lr_scale, log);
      e = st.epoch;
      continue;
    }
    st.epoch = e + 1;
    snap = TakeSnapshot(all, copts, st, res.g_updates, res.d_updates, lr_scale,
                        {});
    ++e;
  }
  res.state = st;
  return res;
}

void SaveTrainCheckpoint(
    const std::string& path, const TrainConfig& cfg, const TrainState& state,
    const std::vector<nn::Parameter>& params,
    const std::vector<std::pair<std::string, const nn::Adam*>>& opts) {
  Checkpoint ck;
  ck.config_json = TrainConfigJson(cfg);
  ck.tensors = ParamsToTensors(params);
  for (const auto& po : opts) po.second->SaveState(po.first, &ck.tensors);
  ck.tensors["trainer.step"] = Array::Scalar(static_cast<double>(state.step));
  ck.tensors["trainer.epoch"] =
      Array::Scalar(static_cast<double>(state.epoch));
  ck.tensors["trainer.audio_seconds"] = Array::Scalar(state.audio_seconds_seen);
  ck.tensors["trainer.best_val"] = Array::Scalar(state.best_val);
  SaveCheckpoint(path, ck);
}

TrainState LoadTrainCheckpoint(
    const std::string& path, const TrainConfig& cfg,
    const std::vector<nn::Parameter>& params,
    const std::vector<std::pair<std::string, nn::Adam*>>& opts) {
  const Checkpoint ck = LoadCheckpoint(path, TrainConfigJson(cfg));
  std::map<std::string, Array> sub;
  for (const auto& p : params) {
    auto it = ck.tensors.find(p.name);
    if (it == ck.tensors.end())
      throw InvalidArgument("checkpoint lacks parameter " + p.name);
    sub.emplace(it->first, it->second);
  }
  AssignParams(sub, params);
  for (const auto& po : opts) po.second->LoadState(po.first, ck.tensors);
  TrainState st;
  st.step = static_cast<int64_t>(ck.tensors.at("trainer.step").v[0]);
  st.epoch = static_cast<int64_t>(ck.tensors.at("trainer.epoch").v[0]);
  st.audio_seconds_seen = ck.tensors.at("trainer.audio_seconds").v[0];
  st.best_val = ck.tensors.at("trainer.best_val").v[0];
  st.rng_seed = cfg.seed;
  return st;
}

}  // namespace bwex
