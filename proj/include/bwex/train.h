// include/bwex/train.h

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

#ifndef BWEX_TRAIN_H_
#define BWEX_TRAIN_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bwex/losses.h"
#include "bwex/nn.h"

namespace bwex {

enum class TrainMode { kRegression, kCgan, kCyclegan };
enum class ScheduleKind { kPlateauHalving, kLinearDecay, kWarmupPlateauCosine };

TrainMode TrainModeFromString(const std::string& s);
std::string TrainModeToString(TrainMode m);
ScheduleKind ScheduleKindFromString(const std::string& s);
std::string ScheduleKindToString(ScheduleKind k);

struct TrainConfig {
  TrainMode mode = TrainMode::kRegression;
  double seg_seconds = 4.0;
  int64_t sample_rate = 16000;
  int64_t batch_size = 128;
  int64_t epochs = 70;
  double epoch_hours = 100.0;
  double lr_g = 5e-4;
  double lr_d = 1e-4;
  double lr_min = 1e-7;
  std::pair<double, double> adam_betas = {0.9, 0.999};
  ScheduleKind schedule = ScheduleKind::kPlateauHalving;
  int64_t d_steps_per_iter = 1;
  int64_t g_steps_per_iter = 2;
  uint64_t seed = 0;
  // warmup_plateau_cosine segment lengths, in epochs.
  int64_t warmup_epochs = 2;
  int64_t constant_epochs = 3;
  int64_t cosine_epochs = 10;
  // plateau_halving: halve when validation improves by less than
  // plateau_rel_improve for plateau_patience consecutive epochs.
  double plateau_rel_improve = 0.01;
  int64_t plateau_patience = 3;
};

// Published hyperparameter sets per mode.
TrainConfig RegressionDefaults();
TrainConfig CganDefaults();
TrainConfig CycleganDefaults();

void ValidateTrainConfig(const TrainConfig& cfg);
std::string TrainConfigJson(const TrainConfig& cfg);
TrainConfig TrainConfigFromJson(const std::string& json);

// Steps per epoch from the audio-hours budget.
int64_t EpochLen(const TrainConfig& cfg);

// Segment length in samples; throws unless seg_seconds * sample_rate is
// integral.
int64_t SegSamples(const TrainConfig& cfg);

// --- learning-rate schedules ---

// Linear per-step decay from lr0 at step 0 toward lr_min at total_steps,
// clamped below at lr_min.
double LinearDecayLr(double lr0, double lr_min, int64_t step,
                     int64_t total_steps);

// Piecewise schedule over fractional epochs: linear warmup lr_min -> lr_max
// over warmup epochs, constant lr_max, then half-cosine decay to lr_min.
double WarmupPlateauCosineLr(double lr_max, double lr_min, double epoch,
                             int64_t warmup_epochs, int64_t constant_epochs,
                             int64_t cosine_epochs);

// Validation-plateau halving with serializable state.
class PlateauHalving {
 public:
  PlateauHalving(double lr0, double rel_improve, int64_t patience);
  // Feeds one epoch's validation loss; returns the learning rate to use next.
  double OnEpochEnd(double val_loss);
  double Lr() const { return lr_; }
  double BestVal() const { return best_; }
  void SaveState(std::map<std::string, Array>* out) const;
  void LoadState(const std::map<std::string, Array>& in);

 private:
  double lr_ = 0.0;
  double rel_improve_ = 0.01;
  int64_t patience_ = 3;
  double best_ = 0.0;
  bool has_best_ = false;
  int64_t stall_ = 0;
};

// --- data streams ---
// Streams are pure functions of (seed, epoch, step), so runs are
// deterministic and resume exactly after a checkpoint restore.

struct PairedBatch {
  ag::Tensor a;  // model input (e.g. wide_down segments)
  ag::Tensor b;  // target (e.g. wide segments)
};
using PairedStream =
    std::function<PairedBatch(uint64_t seed, int64_t epoch, int64_t step)>;
using UnpairedStream =
    std::function<ag::Tensor(uint64_t seed, int64_t epoch, int64_t step)>;

struct TrainStreams {
  PairedStream train;
  PairedStream val;
  int64_t val_batches = 0;
};

struct CycleStreams {
  // Unpaired domain streams; ignored when paired is set, in which case one
  // paired stream feeds both sides.
  UnpairedStream a;
  UnpairedStream b;
  PairedStream paired;
  bool use_paired = false;
};

// --- models as callables plus their parameters ---

struct ModelHandle {
  GenFn forward;
  std::vector<nn::Parameter> params;
};

struct DiscHandle {
  DiscFn forward;
  std::vector<nn::Parameter> params;
};

// --- bookkeeping ---

struct TrainState {
  int64_t step = 0;   // optimizer iterations consumed so far
  int64_t epoch = 0;  // completed epochs
  double audio_seconds_seen = 0.0;
  double best_val = 0.0;
  uint64_t rng_seed = 0;
};

struct HistoryRecord {
  int64_t epoch = 0;
  int64_t step = 0;
  double audio_seconds = 0.0;
  double lr_g = 0.0;
  double lr_d = 0.0;
  std::map<std::string, double> values;
};

// One record per line as space-separated key=value pairs; doubles survive a
// round trip exactly.
std::string HistoryLine(const HistoryRecord& r);
HistoryRecord ParseHistoryLine(const std::string& line);

struct TrainResult {
  std::vector<HistoryRecord> history;
  TrainState state;
  int64_t g_updates = 0;
  int64_t d_updates = 0;
  // Number of divergence recoveries taken (0 or 1; a second aborts).
  int64_t nan_recoveries = 0;
};

// --- trainers ---
// Networks are updated in place.  History lines are appended to *log when it
// is given.  A non-finite loss restores the epoch-start snapshot and halves
// the learning rates once; a second non-finite loss aborts with the snapshot
// restored.

TrainResult TrainRegression(const TrainConfig& cfg, const ModelHandle& gen,
                            const TrainStreams& streams,
                            std::ostream* log = nullptr);

// afm_aux supplies the activation stack for the afm supervision kind; leave
// it empty for waveform or fm supervision.
TrainResult TrainCgan(const TrainConfig& cfg, const LossSpec& loss,
                      const ModelHandle& gen, const DiscHandle& dis,
                      const TrainStreams& streams, std::ostream* log = nullptr,
                      ActivationFn afm_aux = nullptr);

TrainResult TrainCyclegan(const TrainConfig& cfg, const LossSpec& loss,
                          const ModelHandle& g_ab, const ModelHandle& g_ba,
                          const DiscHandle& d_a, const DiscHandle& d_b,
                          const CycleStreams& streams,
                          std::ostream* log = nullptr);

// --- checkpointing of a whole training session ---
// The container holds model parameters, optimizer state, and trainer state;
// the config hash guards against resuming with different settings.

struct SessionSnapshot {
  TrainState state;
  std::map<std::string, Array> tensors;  // params + optimizer + scalars
};

void SaveTrainCheckpoint(const std::string& path, const TrainConfig& cfg,
                         const TrainState& state,
                         const std::vector<nn::Parameter>& params,
                         const std::vector<std::pair<std::string, const nn::Adam*>>& opts);

// Restores parameters and optimizer state in place; returns the stored
// trainer state.  Throws InvalidArgument when the stored config differs.
TrainState LoadTrainCheckpoint(const std::string& path, const TrainConfig& cfg,
                               const std::vector<nn::Parameter>& params,
                               const std::vector<std::pair<std::string, nn::Adam*>>& opts);

}  // namespace bwex

#endif  // BWEX_TRAIN_H_
