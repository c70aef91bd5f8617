// src/signal/lfr.cc

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

#include "bwex/lfr.h"

#include <cmath>

#include "bwex/stft.h"

namespace bwex {

namespace {
constexpr int64_t kFft = 1024;
constexpr int64_t kHop = 256;
constexpr int64_t kWin = 1024;
}  // namespace

Waveform LowFrequencyReplacement(const Waveform& predicted, const Waveform& original) {
  BWEX_CHECK(predicted.sample_rate == 16000 && original.sample_rate == 16000,
             "low-frequency replacement expects 16 kHz inputs");
  BWEX_CHECK(predicted.NumSamples() == original.NumSamples(),
             "length mismatch: ", predicted.NumSamples(), " vs ", original.NumSamples());
  const int64_t n = predicted.NumSamples();
  BWEX_CHECK(n > 0, "empty input");

  dsp::StftConfig cfg;
  cfg.fft_size = kFft;
  cfg.hop = kHop;
  cfg.win_length = kWin;

  // Bin k sits at k * 16000 / 1024 Hz, so 4 kHz is exactly bin 256.
  const int64_t split = (4000 * kFft) / 16000;

  // Pad a full window on both sides so every original sample has complete
  // window coverage and reconstructs exactly.  Reflection padding keeps the
  // edge frames narrowband, so the band splice stays stable when the result
  // is passed through the replacement again.
  auto mirror = [&](int64_t idx) {
    if (n == 1) return int64_t{0};
    const int64_t period = 2 * (n - 1);
    int64_t m = std::abs(idx) % period;
    if (m >= n) m = period - m;
    return m;
  };
  auto pad = [&](const std::vector<double>& x) {
    std::vector<double> p(static_cast<size_t>(n + 2 * kWin), 0.0);
    for (int64_t i = -kWin; i < n + kWin; ++i)
      p[static_cast<size_t>(kWin + i)] = x[static_cast<size_t>(mirror(i))];
    return p;
  };
  dsp::Spectrogram sp = dsp::Stft(pad(predicted.samples), cfg);
  dsp::Spectrogram so = dsp::Stft(pad(original.samples), cfg);

  for (int64_t f = 0; f < sp.num_frames; ++f) {
    for (int64_t b = 0; b < split; ++b) sp.At(f, b) = so.At(f, b);
  }
  std::vector<double> y = dsp::Istft(sp, cfg, n + 2 * kWin);

  Waveform out;
  out.sample_rate = 16000;
  out.band = Band::kExtended;
  out.samples.assign(y.begin() + kWin, y.begin() + kWin + n);
  return out;
}

}  // namespace bwex
