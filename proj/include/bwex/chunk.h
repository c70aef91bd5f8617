// include/bwex/chunk.h

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

#ifndef BWEX_CHUNK_H_
#define BWEX_CHUNK_H_

#include <string>
#include <vector>

#include "bwex/wave.h"

namespace bwex {

struct Chunk {
  std::vector<double> samples;
  std::string source_id;
  int64_t offset = 0;  // sample offset into the source utterance
};

// Non-overlapping fixed-length chunks; the trailing remainder is dropped.
// keep_silence=true uses the signal as-is (silence carries training signal
// for bandwidth extension); keep_silence=false trims leading and trailing
// low-energy regions first.
std::vector<Chunk> ChunkWaveform(const Waveform& w, const std::string& source_id,
                                 double seg_seconds, bool keep_silence);

}  // namespace bwex

#endif  // BWEX_CHUNK_H_
