// include/bwex/bandwidth.h

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

#ifndef BWEX_BANDWIDTH_H_
#define BWEX_BANDWIDTH_H_

#include "bwex/wave.h"

namespace bwex {

// Classifies a 16 kHz waveform as narrow iff the 4-8 kHz band holds less than
// threshold of the total spectral energy.  Zero signals are narrow (0/eps).
// Requires at least half a second of audio.
Band DetectBandwidth(const Waveform& w, double threshold = 1e-3);

// Energy in [lo_hz, hi_hz) as a fraction of total energy (eps-guarded).
double BandEnergyRatio(const Waveform& w, double lo_hz, double hi_hz);

}  // namespace bwex

#endif  // BWEX_BANDWIDTH_H_
