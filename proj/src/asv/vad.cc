// src/asv/vad.cc

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

std::vector<uint8_t> EnergyVad(const FeatureMatrix& f, double tau,
                               const LogMelConfig& c) {
  if (f.num_frames < 1 || f.num_bands < 1)
    throw InvalidArgument("empty feature matrix");

  // Log total mel energy per frame; the features store per-band logs.
  std::vector<double> e(static_cast<size_t>(f.num_frames));
  double mean = 0.0;
  for (int64_t t = 0; t < f.num_frames; ++t) {
    double acc = 0.0;
    for (int64_t b = 0; b < f.num_bands; ++b) acc += std::exp(f.At(t, b));
    e[static_cast<size_t>(t)] = std::log(acc);
    mean += e[static_cast<size_t>(t)];
  }
  mean /= static_cast<double>(f.num_frames);

  // Frames where every band sits at the energy floor carry no evidence of
  // speech, so an all-silent signal produces an all-zero mask even though
  // its energies equal the mean.
  const double floor_e =
      std::log(static_cast<double>(f.num_bands) * c.energy_floor);

  std::vector<uint8_t> mask(static_cast<size_t>(f.num_frames), 0);
  for (int64_t t = 0; t < f.num_frames; ++t) {
    const double v = e[static_cast<size_t>(t)];
    mask[static_cast<size_t>(t)] = (v > mean + tau && v > floor_e) ? 1 : 0;
  }
  return mask;
}

FeatureMatrix SelectFrames(const FeatureMatrix& f,
                           const std::vector<uint8_t>& mask) {
  if (static_cast<int64_t>(mask.size()) != f.num_frames)
    throw InvalidArgument("mask length must match the frame count");
  FeatureMatrix out;
  out.num_bands = f.num_bands;
  for (int64_t t = 0; t < f.num_frames; ++t) {
    if (!mask[static_cast<size_t>(t)]) continue;
    ++out.num_frames;
    for (int64_t b = 0; b < f.num_bands; ++b) out.v.push_back(f.At(t, b));
  }
  return out;
}

}  // namespace bwex
