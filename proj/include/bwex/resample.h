// include/bwex/resample.h

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

#ifndef BWEX_RESAMPLE_H_
#define BWEX_RESAMPLE_H_

#include "bwex/wave.h"

namespace bwex {

// 2:1 decimation with a 127-tap Hann windowed-sinc anti-alias filter
// (cutoff 3600 Hz); keeps aliased energy below -40 dB.
Waveform DecimateTo8k(const Waveform& w);

// Even outputs copy the input; odd outputs are neighbor means; the final odd
// output repeats the last input sample (no future neighbor exists).
Waveform UpsampleLinearTo16k(const Waveform& w);

// decimate + linear upsample; narrowband simulation of wide speech.  Length
// is preserved exactly (odd inputs are padded before decimation and trimmed
// after upsampling).
Waveform MakeWideDown(const Waveform& w);

}  // namespace bwex

#endif  // BWEX_RESAMPLE_H_
