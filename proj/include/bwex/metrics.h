// include/bwex/metrics.h

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

#ifndef BWEX_METRICS_H_
#define BWEX_METRICS_H_

#include <optional>
#include <string>

#include "bwex/losses.h"
#include "bwex/stft.h"
#include "bwex/wave.h"

namespace bwex {

// Signal-quality metrics comparing a degraded or reconstructed signal
// against a reference.  lsd and mse_time are symmetric; estoi and the pesq
// adapter are directional with the reference first.  None of them mutate
// their inputs.

// Log-spectral distance in dB: mean over frames of the root mean square
// log-magnitude difference across bins.  Magnitudes are floored at 1e-7
// before the log.
double Lsd(const Waveform& x, const Waveform& y,
           const dsp::StftConfig& c = dsp::StftConfig());

// Mean squared sample difference.
double MseTime(const Waveform& x, const Waveform& y);

// Sum over encoder blocks of the mean squared activation difference.  The
// provider is applied to each signal separately and must yield the same
// number of equally shaped blocks for both.
double DeepFeatureMse(const Waveform& x, const Waveform& y,
                      const ActivationFn& encoder);

// Extended short-time objective intelligibility.  Both signals are resampled
// internally to the 10 kHz analysis rate (16 kHz and 10 kHz inputs are
// accepted), silent frames are removed by the reference-signal energy mask,
// and spectral correlation is averaged over 384 ms segments of 15
// one-third-octave bands.  Result lies in [-1, 1]; identical inputs give 1.
double Estoi(const Waveform& clean, const Waveform& degraded);

// External evaluator adapter.  The command is run as
//   <command> <clean.wav> <degraded.wav>
// and the last number on its standard output is taken as the score.  An
// empty command means no evaluator is configured: the score is absent and no
// warning is recorded.  Evaluator failure also yields an absent score, with
// the reason in `warning`.
struct PesqResult {
  std::optional<double> score;
  std::string warning;
};
PesqResult PesqAdapter(const Waveform& clean, const Waveform& degraded,
                       const std::string& command);

// One row of the evaluation table.  estoi is present whenever both signals
// last at least half a second (and contain enough active signal);
// deep_feature_mse requires an encoder; pesq requires an external evaluator.
struct QualityReport {
  double lsd = 0.0;
  double mse_time = 0.0;
  std::optional<double> estoi;
  std::optional<double> deep_feature_mse;
  std::optional<double> pesq;
  std::string warning;
};

QualityReport Evaluate(const Waveform& reference, const Waveform& test,
                       const ActivationFn& encoder = nullptr,
                       const std::string& pesq_command = "");

// Tab-separated table serialization; absent values print as "-".
std::string QualityTableHeader();
std::string QualityTableRow(const std::string& utt_id, const QualityReport& r);

}  // namespace bwex

#endif  // BWEX_METRICS_H_
