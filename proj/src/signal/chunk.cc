// src/signal/chunk.cc

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

#include "bwex/chunk.h"

#include <cmath>

namespace bwex {

namespace {

// Leading/trailing trim bounds: 20 ms frames, active above -40 dB of peak.
void ActiveSpan(const Waveform& w, int64_t* begin, int64_t* end) {
  const int64_t frame = w.sample_rate / 50;
  const int64_t n = w.NumSamples();
  double peak = 0.0;
  for (double x : w.samples) peak = std::max(peak, std::fabs(x));
  *begin = 0;
  *end = n;
  if (peak == 0.0 || frame == 0) return;
  const double thresh = peak * 0.01;  // -40 dB amplitude
  auto frame_active = [&](int64_t start) {
    double rms = 0.0;
    const int64_t len = std::min(frame, n - start);
    for (int64_t i = 0; i < len; ++i) {
      const double x = w.samples[static_cast<size_t>(start + i)];
      rms += x * x;
    }
    return std::sqrt(rms / static_cast<double>(len)) > thresh;
  };
  int64_t first = -1, last = -1;
  for (int64_t s = 0; s < n; s += frame) {
    if (frame_active(s)) {
      if (first < 0) first = s;
      last = std::min(s + frame, n);
    }
  }
  if (first < 0) return;  // nothing active: keep everything
  *begin = first;
  *end = last;
}

}  // namespace

std::vector<Chunk> ChunkWaveform(const Waveform& w, const std::string& source_id,
                                 double seg_seconds, bool keep_silence) {
  BWEX_CHECK(seg_seconds > 0.0, "segment length must be positive");
  const int64_t seg = static_cast<int64_t>(std::llround(seg_seconds * w.sample_rate));
  BWEX_CHECK(seg > 0, "segment shorter than one sample");

  int64_t begin = 0, end = w.NumSamples();
  if (!keep_silence) ActiveSpan(w, &begin, &end);

  std::vector<Chunk> chunks;
  for (int64_t s = begin; s + seg <= end; s += seg) {
    Chunk c;
    c.source_id = source_id;
    c.offset = s;
    c.samples.assign(w.samples.begin() + s, w.samples.begin() + s + seg);
    chunks.push_back(std::move(c));
  }
  return chunks;
}

}  // namespace bwex
