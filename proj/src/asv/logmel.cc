// src/asv/logmel.cc

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
#include <vector>

#include "bwex/asv.h"
#include "bwex/common.h"

namespace bwex {

namespace {

void CheckConfig(const LogMelConfig& c) {
  if (c.sample_rate < 1 || c.frame_length < 2 || c.hop < 1 ||
      c.num_bands < 1 || c.fft_size < c.frame_length)
    throw InvalidArgument("invalid log-mel configuration");
  if (c.fmin_hz < 0.0 || c.fmax_hz <= c.fmin_hz ||
      c.fmax_hz > 0.5 * static_cast<double>(c.sample_rate))
    throw InvalidArgument("mel band range must lie within [0, Nyquist]");
  if (c.energy_floor <= 0.0)
    throw InvalidArgument("energy floor must be positive");
}

std::vector<double> HannPeriodic(int64_t n) {
  std::vector<double> w(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i)
    w[static_cast<size_t>(i)] =
        0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) /
                             static_cast<double>(n));
  return w;
}

// Triangular weights on the mel grid, rows are bands, columns are FFT bins.
std::vector<double> MelWeights(const LogMelConfig& c) {
  const int64_t bins = c.fft_size / 2 + 1;
  const double m_lo = MelFromHz(c.fmin_hz);
  const double m_hi = MelFromHz(c.fmax_hz);
  const double dm = (m_hi - m_lo) / static_cast<double>(c.num_bands + 1);
  std::vector<double> w(static_cast<size_t>(c.num_bands * bins), 0.0);
  const double bin_hz =
      static_cast<double>(c.sample_rate) / static_cast<double>(c.fft_size);
  for (int64_t j = 0; j < c.num_bands; ++j) {
    const double left = m_lo + static_cast<double>(j) * dm;
    const double center = left + dm;
    const double right = center + dm;
    for (int64_t k = 0; k < bins; ++k) {
      const double m = MelFromHz(static_cast<double>(k) * bin_hz);
      double g = 0.0;
      if (m > left && m < right)
        g = (m <= center) ? (m - left) / dm : (right - m) / dm;
      w[static_cast<size_t>(j * bins + k)] = g;
    }
  }
  return w;
}

}  // namespace

double MelFromHz(double hz) { return 1127.0 * std::log1p(hz / 700.0); }

double HzFromMel(double mel) { return 700.0 * std::expm1(mel / 1127.0); }

double MelBandCenterHz(int64_t band, const LogMelConfig& c) {
  CheckConfig(c);
  if (band < 0 || band >= c.num_bands) throw InvalidArgument("band index");
  const double m_lo = MelFromHz(c.fmin_hz);
  const double m_hi = MelFromHz(c.fmax_hz);
  const double dm = (m_hi - m_lo) / static_cast<double>(c.num_bands + 1);
  return HzFromMel(m_lo + static_cast<double>(band + 1) * dm);
}

ag::Tensor LogMelTensor(const ag::Tensor& x, const LogMelConfig& c) {
  CheckConfig(c);
  if (x.Value().Rank() != 3 || x.Dims()[1] != 1)
    throw InvalidArgument("expected a (B, 1, T) waveform tensor");
  if (x.Dims()[2] < c.frame_length)
    throw InvalidArgument("input shorter than one frame");

  const int64_t bins = c.fft_size / 2 + 1;
  const std::vector<double> win = HannPeriodic(c.frame_length);

  // Windowed DFT as strided convolutions; power spectrum from the real and
  // imaginary responses, then fixed mel combination and the floored log.
  Array wc({bins, 1, c.frame_length}), ws({bins, 1, c.frame_length});
  for (int64_t k = 0; k < bins; ++k)
    for (int64_t i = 0; i < c.frame_length; ++i) {
      const double phase = 2.0 * M_PI * static_cast<double>(k) *
                           static_cast<double>(i) /
                           static_cast<double>(c.fft_size);
      const double g = win[static_cast<size_t>(i)];
      wc.v[static_cast<size_t>(k * c.frame_length + i)] = g * std::cos(phase);
      ws.v[static_cast<size_t>(k * c.frame_length + i)] = -g * std::sin(phase);
    }
  Array mel({c.num_bands, bins, 1});
  mel.v = MelWeights(c);

  ag::ConvGeom geom;
  geom.stride = c.hop;
  const ag::Tensor re = ag::Conv1d(x, ag::Constant(std::move(wc)), geom);
  const ag::Tensor im = ag::Conv1d(x, ag::Constant(std::move(ws)), geom);
  const ag::Tensor power = ag::Add(ag::Mul(re, re), ag::Mul(im, im));
  const ag::Tensor banded =
      ag::Conv1d(power, ag::Constant(std::move(mel)), ag::ConvGeom());
  return ag::Log(ag::ClampMin(banded, c.energy_floor));
}

FeatureMatrix LogMel(const Waveform& w, const LogMelConfig& c) {
  CheckConfig(c);
  if (w.sample_rate != c.sample_rate)
    throw InvalidArgument("sample rate mismatch");
  if (w.NumSamples() < c.frame_length)
    throw InvalidArgument("input shorter than one frame");

  ag::NoGradGuard ng;
  Array in({1, 1, w.NumSamples()});
  for (int64_t t = 0; t < w.NumSamples(); ++t)
    in.v[static_cast<size_t>(t)] = w.samples[static_cast<size_t>(t)];
  const ag::Tensor out = LogMelTensor(ag::Tensor(std::move(in)), c);

  FeatureMatrix f;
  f.num_frames = out.Dims()[2];
  f.num_bands = out.Dims()[1];
  f.v.resize(static_cast<size_t>(f.num_frames * f.num_bands));
  const Array& a = out.Value();
  for (int64_t b = 0; b < f.num_bands; ++b)
    for (int64_t t = 0; t < f.num_frames; ++t)
      f.At(t, b) = a.At(0, b, t);
  return f;
}

}  // namespace bwex
