// include/bwex/lfr.h

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

#ifndef BWEX_LFR_H_
#define BWEX_LFR_H_

#include "bwex/wave.h"

namespace bwex {

// Low-frequency replacement: STFT bins strictly below 4 kHz are taken from
// `original`, bins at or above 4 kHz from `predicted`, then inverse STFT.
// Hard split, no cross-fade; with fft 1024 at 16 kHz the 4 kHz boundary falls
// exactly on bin 256.  Both inputs must be 16 kHz and equal length.
Waveform LowFrequencyReplacement(const Waveform& predicted, const Waveform& original);

}  // namespace bwex

#endif  // BWEX_LFR_H_
