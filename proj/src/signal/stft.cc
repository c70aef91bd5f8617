// src/signal/stft.cc

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

#include "bwex/stft.h"

#include <cmath>

#include "bwex/fft.h"

namespace bwex {
namespace dsp {

void ValidateStftConfig(const StftConfig& c) {
  BWEX_CHECK(c.hop >= 1, "hop must be positive");
  BWEX_CHECK(c.win_length >= 2, "window too short");
  BWEX_CHECK(c.hop <= c.win_length, "hop larger than window leaves gaps");
  BWEX_CHECK(c.win_length <= c.fft_size, "window longer than fft size");
}

std::vector<double> HannWindow(int64_t n) {
  std::vector<double> w(static_cast<size_t>(n));
  const double step = 2.0 * M_PI / static_cast<double>(n);
  for (int64_t i = 0; i < n; ++i) {
    w[static_cast<size_t>(i)] = 0.5 - 0.5 * std::cos(step * static_cast<double>(i));
  }
  return w;
}

Spectrogram Stft(const std::vector<double>& x, const StftConfig& c) {
  ValidateStftConfig(c);
  const int64_t n = static_cast<int64_t>(x.size());
  BWEX_CHECK(n >= c.win_length, "signal shorter than one analysis window");
  const std::vector<double> win = HannWindow(c.win_length);

  Spectrogram s;
  s.num_frames = (n - c.win_length) / c.hop + 1;
  s.num_bins = c.fft_size / 2 + 1;
  s.data.resize(static_cast<size_t>(s.num_frames * s.num_bins));

  std::vector<double> frame(static_cast<size_t>(c.win_length));
  std::vector<std::complex<double>> bins;
  for (int64_t f = 0; f < s.num_frames; ++f) {
    const double* src = x.data() + f * c.hop;
    for (int64_t i = 0; i < c.win_length; ++i) {
      frame[static_cast<size_t>(i)] = src[i] * win[static_cast<size_t>(i)];
    }
    RealFft(frame.data(), c.win_length, c.fft_size, &bins);
    for (int64_t b = 0; b < s.num_bins; ++b) s.At(f, b) = bins[static_cast<size_t>(b)];
  }
  return s;
}

std::vector<double> Istft(const Spectrogram& s, const StftConfig& c, int64_t length) {
  ValidateStftConfig(c);
  BWEX_CHECK(s.num_bins == c.fft_size / 2 + 1, "spectrogram bin count mismatch");
  const std::vector<double> win = HannWindow(c.win_length);

  std::vector<double> acc(static_cast<size_t>(length), 0.0);
  std::vector<double> wsum(static_cast<size_t>(length), 0.0);
  std::vector<std::complex<double>> bins(static_cast<size_t>(s.num_bins));
  std::vector<double> frame;
  for (int64_t f = 0; f < s.num_frames; ++f) {
    for (int64_t b = 0; b < s.num_bins; ++b) bins[static_cast<size_t>(b)] = s.At(f, b);
    InverseRealFft(bins, c.fft_size, &frame);
    const int64_t start = f * c.hop;
    for (int64_t i = 0; i < c.win_length; ++i) {
      const int64_t t = start + i;
      if (t < 0 || t >= length) continue;
      const double wv = win[static_cast<size_t>(i)];
      acc[static_cast<size_t>(t)] += frame[static_cast<size_t>(i)] * wv;
      wsum[static_cast<size_t>(t)] += wv * wv;
    }
  }
  for (int64_t t = 0; t < length; ++t) {
    // Per-sample window-power normalization; dead spots (no coverage) stay 0.
    const double d = wsum[static_cast<size_t>(t)];
    if (d > 1e-11) acc[static_cast<size_t>(t)] /= d;
  }
  return acc;
}

}  // namespace dsp
}  // namespace bwex
