// include/bwex/wave.h

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

#ifndef BWEX_WAVE_H_
#define BWEX_WAVE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "bwex/common.h"

namespace bwex {

// Band labels follow the data model: narrow has no content above 4 kHz,
// wide is true 16 kHz speech, wide_down is wide passed through the
// downsample/upsample chain, extended is a model output.
enum class Band { kNarrow, kWide, kWideDown, kExtended, kUnknown };

std::string BandToString(Band b);
Band BandFromString(const std::string& s);

struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;
  Band band = Band::kUnknown;

  int64_t NumSamples() const { return static_cast<int64_t>(samples.size()); }
  double DurationSeconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Peak-normalizes to [-1, 1]; all-zero input passes through unchanged.
Waveform NormalizeAmplitude(const Waveform& w);

// 16-bit PCM RIFF, mono.  Read validates the format chunk; write clamps to
// [-1, 1] and scales to full range.
Waveform ReadWav(const std::string& path);
void WriteWav(const std::string& path, const Waveform& w);

}  // namespace bwex

#endif  // BWEX_WAVE_H_
