// src/train/schedule.cc

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
#include <string>

#include <json.hpp>

#include "bwex/common.h"
#include "bwex/train.h"

namespace bwex {

TrainMode TrainModeFromString(const std::string& s) {
  if (s == "regression") return TrainMode::kRegression;
  if (s == "cgan") return TrainMode::kCgan;
  if (s == "cyclegan") return TrainMode::kCyclegan;
  throw InvalidArgument("unknown train mode: " + s);
}

std::string TrainModeToString(TrainMode m) {
  switch (m) {
    case TrainMode::kRegression: return "regression";
    case TrainMode::kCgan: return "cgan";
    case TrainMode::kCyclegan: return "cyclegan";
  }
  throw InvalidArgument("bad train mode");
}

ScheduleKind ScheduleKindFromString(const std::string& s) {
  if (s == "plateau_halving") return ScheduleKind::kPlateauHalving;
  if (s == "linear_decay") return ScheduleKind::kLinearDecay;
  if (s == "warmup_plateau_cosine") return ScheduleKind::kWarmupPlateauCosine;
  throw InvalidArgument("unknown schedule: " + s);
}

std::string ScheduleKindToString(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::kPlateauHalving: return "plateau_halving";
    case ScheduleKind::kLinearDecay: return "linear_decay";
    case ScheduleKind::kWarmupPlateauCosine: return "warmup_plateau_cosine";
  }
  throw InvalidArgument("bad schedule kind");
}

TrainConfig RegressionDefaults() {
  TrainConfig c;
  c.mode = TrainMode::kRegression;
  c.seg_seconds = 4.0;
  c.batch_size = 128;
  c.epochs = 70;
  c.epoch_hours = 100.0;
  c.lr_g = 5e-4;
  c.lr_d = 0.0;
  c.lr_min = 1e-7;
  c.adam_betas = {0.9, 0.999};
  c.schedule = ScheduleKind::kPlateauHalving;
  return c;
}

TrainConfig CganDefaults() {
  TrainConfig c;
  c.mode = TrainMode::kCgan;
  c.seg_seconds = 3.0;
  c.batch_size = 16;
  c.epochs = 15;
  c.epoch_hours = 50.0;
  c.lr_g = 2e-4;
  c.lr_d = 1e-4;
  c.lr_min = 1e-7;
  c.adam_betas = {0.5, 0.999};
  c.schedule = ScheduleKind::kLinearDecay;
  c.d_steps_per_iter = 1;
  c.g_steps_per_iter = 2;
  return c;
}

TrainConfig CycleganDefaults() {
  TrainConfig c;
  c.mode = TrainMode::kCyclegan;
  c.seg_seconds = 3.0;
  c.batch_size = 8;
  c.epochs = 15;
  c.epoch_hours = 50.0;
  c.lr_g = 4e-4;
  c.lr_d = 2e-4;
  c.lr_min = 1e-8;
  c.adam_betas = {0.5, 0.999};
  c.schedule = ScheduleKind::kWarmupPlateauCosine;
  c.d_steps_per_iter = 1;
  c.g_steps_per_iter = 1;
  c.warmup_epochs = 2;
  c.constant_epochs = 3;
  c.cosine_epochs = 10;
  return c;
}

void ValidateTrainConfig(const TrainConfig& cfg) {
  if (!(cfg.seg_seconds > 0.0)) throw InvalidArgument("seg_seconds must be positive");
  if (cfg.sample_rate <= 0) throw InvalidArgument("sample_rate must be positive");
  if (cfg.batch_size <= 0) throw InvalidArgument("batch_size must be positive");
  if (cfg.epochs <= 0) throw InvalidArgument("epochs must be positive");
  if (!(cfg.epoch_hours >= 0.0)) throw InvalidArgument("epoch_hours must be non-negative");
  if (!(cfg.lr_g > 0.0)) throw InvalidArgument("lr_g must be positive");
  if (cfg.mode != TrainMode::kRegression && !(cfg.lr_d > 0.0))
    throw InvalidArgument("lr_d must be positive for adversarial modes");
  if (!(cfg.lr_min >= 0.0)) throw InvalidArgument("lr_min must be non-negative");
  if (!(cfg.adam_betas.first >= 0.0 && cfg.adam_betas.first < 1.0) ||
      !(cfg.adam_betas.second >= 0.0 && cfg.adam_betas.second < 1.0))
    throw InvalidArgument("adam betas must lie in [0, 1)");
  if (cfg.d_steps_per_iter <= 0 || cfg.g_steps_per_iter <= 0)
    throw InvalidArgument("steps per iteration must be positive");
  if (cfg.warmup_epochs < 0 || cfg.constant_epochs < 0 || cfg.cosine_epochs <= 0)
    throw InvalidArgument("bad schedule segment lengths");
  if (!(cfg.plateau_rel_improve > 0.0) || cfg.plateau_patience <= 0)
    throw InvalidArgument("bad plateau settings");
  SegSamples(cfg);
}

std::string TrainConfigJson(const TrainConfig& cfg) {
  nlohmann::json j;
  j["mode"] = TrainModeToString(cfg.mode);
  j["seg_seconds"] = cfg.seg_seconds;
  j["sample_rate"] = cfg.sample_rate;
  j["batch_size"] = cfg.batch_size;
  j["epochs"] = cfg.epochs;
  j["epoch_hours"] = cfg.epoch_hours;
  j["lr_g"] = cfg.lr_g;
  j["lr_d"] = cfg.lr_d;
  j["lr_min"] = cfg.lr_min;
  j["adam_beta1"] = cfg.adam_betas.first;
  j["adam_beta2"] = cfg.adam_betas.second;
  j["schedule"] = ScheduleKindToString(cfg.schedule);
  j["d_steps_per_iter"] = cfg.d_steps_per_iter;
  j["g_steps_per_iter"] = cfg.g_steps_per_iter;
  j["seed"] = cfg.seed;
  j["warmup_epochs"] = cfg.warmup_epochs;
  j["constant_epochs"] = cfg.constant_epochs;
  j["cosine_epochs"] = cfg.cosine_epochs;
  j["plateau_rel_improve"] = cfg.plateau_rel_improve;
  j["plateau_patience"] = cfg.plateau_patience;
  return j.dump();
}

TrainConfig TrainConfigFromJson(const std::string& json) {
  TrainConfig cfg;
  try {
    nlohmann::json j = nlohmann::json::parse(json);
    if (j.contains("mode")) cfg.mode = TrainModeFromString(j.at("mode").get<std::string>());
    if (j.contains("seg_seconds")) cfg.seg_seconds = j.at("seg_seconds").get<double>();
    if (j.contains("sample_rate")) cfg.sample_rate = j.at("sample_rate").get<int64_t>();
    if (j.contains("batch_size")) cfg.batch_size = j.at("batch_size").get<int64_t>();
    if (j.contains("epochs")) cfg.epochs = j.at("epochs").get<int64_t>();
    if (j.contains("epoch_hours")) cfg.epoch_hours = j.at("epoch_hours").get<double>();
    if (j.contains("lr_g")) cfg.lr_g = j.at("lr_g").get<double>();
    if (j.contains("lr_d")) cfg.lr_d = j.at("lr_d").get<double>();
    if (j.contains("lr_min")) cfg.lr_min = j.at("lr_min").get<double>();
    if (j.contains("adam_beta1")) cfg.adam_betas.first = j.at("adam_beta1").get<double>();
    if (j.contains("adam_beta2")) cfg.adam_betas.second = j.at("adam_beta2").get<double>();
    if (j.contains("schedule"))
      cfg.schedule = ScheduleKindFromString(j.at("schedule").get<std::string>());
    if (j.contains("d_steps_per_iter")) cfg.d_steps_per_iter = j.at("d_steps_per_iter").get<int64_t>();
    if (j.contains("g_steps_per_iter")) cfg.g_steps_per_iter = j.at("g_steps_per_iter").get<int64_t>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
    if (j.contains("warmup_epochs")) cfg.warmup_epochs = j.at("warmup_epochs").get<int64_t>();
    if (j.contains("constant_epochs")) cfg.constant_epochs = j.at("constant_epochs").get<int64_t>();
    if (j.contains("cosine_epochs")) cfg.cosine_epochs = j.at("cosine_epochs").get<int64_t>();
    if (j.contains("plateau_rel_improve"))
      cfg.plateau_rel_improve = j.at("plateau_rel_improve").get<double>();
    if (j.contains("plateau_patience")) cfg.plateau_patience = j.at("plateau_patience").get<int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("bad train config json: ") + e.what());
  }
  ValidateTrainConfig(cfg);
  return cfg;
}

int64_t EpochLen(const TrainConfig& cfg) {
  return static_cast<int64_t>(
      std::llround(cfg.epoch_hours * 3600.0 /
                   (static_cast<double>(cfg.batch_size) * cfg.seg_seconds)));
}

int64_t SegSamples(const TrainConfig& cfg) {
  const double exact = cfg.seg_seconds * static_cast<double>(cfg.sample_rate);
  const int64_t n = static_cast<int64_t>(std::llround(exact));
  if (std::fabs(exact - static_cast<double>(n)) > 1e-9 || n <= 0)
    throw InvalidArgument("seg_seconds * sample_rate must be a positive integer");
  return n;
}

double LinearDecayLr(double lr0, double lr_min, int64_t step,
                     int64_t total_steps) {
  if (total_steps <= 0) throw InvalidArgument("total_steps must be positive");
  if (step >= total_steps) return lr_min;
  const double t = static_cast<double>(step) / static_cast<double>(total_steps);
  const double lr = lr0 + (lr_min - lr0) * t;
  return std::max(lr_min, lr);
}

double WarmupPlateauCosineLr(double lr_max, double lr_min, double epoch,
                             int64_t warmup_epochs, int64_t constant_epochs,
                             int64_t cosine_epochs) {
  const double w = static_cast<double>(warmup_epochs);
  const double c = static_cast<double>(constant_epochs);
  const double d = static_cast<double>(cosine_epochs);
  if (epoch <= 0.0) return warmup_epochs > 0 ? lr_min : lr_max;
  if (epoch < w) return lr_min + (lr_max - lr_min) * (epoch / w);
  if (epoch < w + c) return lr_max;
  if (epoch < w + c + d) {
    const double u = (epoch - w - c) / d;
    return lr_min + (lr_max - lr_min) * 0.5 * (1.0 + std::cos(M_PI * u));
  }
  return lr_min;
}

PlateauHalving::PlateauHalving(double lr0, double rel_improve, int64_t patience)
    : lr_(lr0), rel_improve_(rel_improve), patience_(patience) {
  if (!(lr0 > 0.0) || !(rel_improve > 0.0) || patience <= 0)
    throw InvalidArgument("bad plateau halving settings");
}

double PlateauHalving::OnEpochEnd(double val_loss) {
  if (!has_best_) {
    best_ = val_loss;
    has_best_ = true;
    stall_ = 0;
    return lr_;
  }
  // Counts an epoch as stalled unless it beats the best by the relative
  // margin; three stalls in a row halve the rate and reset the counter.
  if (val_loss < best_ * (1.0 - rel_improve_)) {
    best_ = val_loss;
    stall_ = 0;
  } else {
    if (val_loss < best_) best_ = val_loss;
    ++stall_;
    if (stall_ >= patience_) {
      lr_ *= 0.5;
      stall_ = 0;
    }
  }
  return lr_;
}

void PlateauHalving::SaveState(std::map<std::string, Array>* out) const {
  (*out)["plateau.lr"] = Array::Scalar(lr_);
  (*out)["plateau.best"] = Array::Scalar(best_);
  (*out)["plateau.has_best"] = Array::Scalar(has_best_ ? 1.0 : 0.0);
  (*out)["plateau.stall"] = Array::Scalar(static_cast<double>(stall_));
}

void PlateauHalving::LoadState(const std::map<std::string, Array>& in) {
  lr_ = in.at("plateau.lr").v[0];
  best_ = in.at("plateau.best").v[0];
  has_best_ = in.at("plateau.has_best").v[0] != 0.0;
  stall_ = static_cast<int64_t>(in.at("plateau.stall").v[0]);
}

}  // namespace bwex
