// include/bwex/stft.h

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

#ifndef BWEX_STFT_H_
#define BWEX_STFT_H_

#include <complex>
#include <cstdint>
#include <vector>

#include "bwex/common.h"

namespace bwex {
namespace dsp {

// Hann-windowed STFT.  Frames are left-aligned: frame t covers samples
// [t*hop, t*hop + win_length).  Reconstruction normalizes by the per-sample
// sum of squared windows, so any hop <= win_length round-trips exactly where
// window coverage is positive; the first and last partial windows are the
// only approximate region.
struct StftConfig {
  int64_t fft_size = 1024;
  int64_t hop = 120;
  int64_t win_length = 600;
};

void ValidateStftConfig(const StftConfig& c);

// Periodic Hann window of length n.
std::vector<double> HannWindow(int64_t n);

struct Spectrogram {
  int64_t num_frames = 0;
  int64_t num_bins = 0;  // fft_size / 2 + 1
  std::vector<std::complex<double>> data;  // frames x bins, row-major

  std::complex<double>& At(int64_t f, int64_t b) {
    return data[static_cast<size_t>(f * num_bins + b)];
  }
  const std::complex<double>& At(int64_t f, int64_t b) const {
    return data[static_cast<size_t>(f * num_bins + b)];
  }
};

Spectrogram Stft(const std::vector<double>& x, const StftConfig& c);

// Weighted overlap-add inverse; length is the desired output sample count.
std::vector<double> Istft(const Spectrogram& s, const StftConfig& c, int64_t length);

}  // namespace dsp
}  // namespace bwex

#endif  // BWEX_STFT_H_
