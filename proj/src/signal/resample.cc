// src/signal/resample.cc

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

#include "bwex/resample.h"

#include <cmath>

namespace bwex {

namespace {

constexpr int kAntiAliasTaps = 127;
constexpr double kCutoffHz = 3600.0;

// Hann windowed-sinc low-pass, unit DC gain, linear phase (odd tap count).
const std::vector<double>& AntiAliasFilter() {
  static const std::vector<double>* taps = [] {
    auto* h = new std::vector<double>(kAntiAliasTaps);
    const int mid = kAntiAliasTaps / 2;
    const double fc = kCutoffHz / 16000.0;  // cycles per input sample
    double sum = 0.0;
    for (int i = 0; i < kAntiAliasTaps; ++i) {
      const int m = i - mid;
      const double x = 2.0 * fc * m;
      const double sinc = (m == 0) ? 1.0 : std::sin(M_PI * x) / (M_PI * x);
      // Symmetric Hann over the filter span.
      const double win = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / (kAntiAliasTaps - 1));
      (*h)[static_cast<size_t>(i)] = 2.0 * fc * sinc * win;
      sum += (*h)[static_cast<size_t>(i)];
    }
    for (double& v : *h) v /= sum;
    return h;
  }();
  return *taps;
}

}  // namespace

Waveform DecimateTo8k(const Waveform& w) {
  BWEX_CHECK(w.sample_rate == 16000, "decimation expects 16 kHz input, got ",
             w.sample_rate);
  const std::vector<double>& h = AntiAliasFilter();
  const int mid = kAntiAliasTaps / 2;
  const int64_t n = w.NumSamples();
  Waveform out;
  out.sample_rate = 8000;
  out.band = w.band;
  out.samples.resize(static_cast<size_t>((n + 1) / 2));
  // Reflect at the boundaries: keeps DC exactly DC and keeps edge content
  // narrowband, so the stopband bound holds right up to the signal ends.
  auto sample_at = [&](int64_t t) {
    if (t < 0) t = -t;
    if (t >= n) t = 2 * (n - 1) - t;
    if (t < 0) t = 0;
    if (t >= n) t = n - 1;
    return w.samples[static_cast<size_t>(t)];
  };
  for (int64_t i = 0; i < static_cast<int64_t>(out.samples.size()); ++i) {
    const int64_t center = 2 * i;
    double acc = 0.0;
    for (int k = 0; k < kAntiAliasTaps; ++k) {
      acc += h[static_cast<size_t>(k)] * sample_at(center + k - mid);
    }
    out.samples[static_cast<size_t>(i)] = acc;
  }
  return out;
}

Waveform UpsampleLinearTo16k(const Waveform& w) {
  BWEX_CHECK(w.sample_rate == 8000, "upsampling expects 8 kHz input, got ",
             w.sample_rate);
  BWEX_CHECK(!w.samples.empty(), "cannot upsample an empty waveform");
  const int64_t n = w.NumSamples();
  Waveform out;
  out.sample_rate = 16000;
  out.band = w.band;
  out.samples.resize(static_cast<size_t>(2 * n));
  for (int64_t i = 0; i < n; ++i) {
    out.samples[static_cast<size_t>(2 * i)] = w.samples[static_cast<size_t>(i)];
    const double next =
        (i + 1 < n) ? w.samples[static_cast<size_t>(i + 1)] : w.samples[static_cast<size_t>(i)];
    out.samples[static_cast<size_t>(2 * i + 1)] =
        0.5 * (w.samples[static_cast<size_t>(i)] + next);
  }
  return out;
}

Waveform MakeWideDown(const Waveform& w) {
  BWEX_CHECK(w.sample_rate == 16000, "wide_down expects 16 kHz input");
  const int64_t n = w.NumSamples();
  Waveform padded = w;
  if (n % 2 == 1) padded.samples.push_back(0.0);
  Waveform up = UpsampleLinearTo16k(DecimateTo8k(padded));
  up.samples.resize(static_cast<size_t>(n));
  up.band = Band::kWideDown;
  return up;
}

}  // namespace bwex
