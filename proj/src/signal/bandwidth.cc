// src/signal/bandwidth.cc

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

#include "bwex/bandwidth.h"

#include <complex>
#include <vector>

#include "bwex/fft.h"

namespace bwex {

double BandEnergyRatio(const Waveform& w, double lo_hz, double hi_hz) {
  const int64_t n = w.NumSamples();
  BWEX_CHECK(n > 0, "empty waveform");
  std::vector<std::complex<double>> bins;
  dsp::RealFft(w.samples.data(), n, n, &bins);
  const double hz_per_bin = static_cast<double>(w.sample_rate) / static_cast<double>(n);
  double total = 0.0, band = 0.0;
  for (size_t k = 0; k < bins.size(); ++k) {
    const double e = std::norm(bins[k]);
    total += e;
    const double f = hz_per_bin * static_cast<double>(k);
    if (f >= lo_hz && f < hi_hz) band += e;
  }
  return band / (total + 1e-12);
}

Band DetectBandwidth(const Waveform& w, double threshold) {
  BWEX_CHECK(w.sample_rate == 16000, "bandwidth detection expects 16 kHz input");
  BWEX_CHECK(w.DurationSeconds() >= 0.5, "need at least 0.5 s to classify, got ",
             w.DurationSeconds(), " s");
  const double ratio = BandEnergyRatio(w, 4000.0, 8000.0 + 1.0);
  return ratio < threshold ? Band::kNarrow : Band::kWide;
}

}  // namespace bwex
