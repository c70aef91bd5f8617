// include/bwex/rng.h

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

#ifndef BWEX_RNG_H_
#define BWEX_RNG_H_

#include <cstdint>
#include <random>
#include <vector>

namespace bwex {

// Seeded generator with hand-rolled transforms so that sampled streams are
// bit-identical across standard library implementations.  Training
// reproducibility depends on this, not on std::*_distribution.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double Uniform();
  // Uniform in [lo, hi).
  double Uniform(double lo, double hi);
  // Standard normal via Box-Muller; consumes two uniforms per pair.
  double Normal();
  // Uniform integer in [0, n).
  int64_t UniformInt(int64_t n);
  // In-place Fisher-Yates shuffle.
  template <typename T>
  void Shuffle(std::vector<T>* xs) {
    for (int64_t i = static_cast<int64_t>(xs->size()) - 1; i > 0; --i) {
      int64_t j = UniformInt(i + 1);
      std::swap((*xs)[static_cast<size_t>(i)], (*xs)[static_cast<size_t>(j)]);
    }
  }

  // Derives an independent child generator; used to give each training epoch
  // or utterance its own stream so consumption order cannot leak between them.
  Rng Fork(uint64_t salt);

  uint64_t NextRaw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace bwex

#endif  // BWEX_RNG_H_
