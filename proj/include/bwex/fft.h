// include/bwex/fft.h

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

#ifndef BWEX_FFT_H_
#define BWEX_FFT_H_

#include <complex>
#include <cstdint>
#include <vector>

namespace bwex {
namespace dsp {

// Real-input FFT; in is zero-padded or truncated to n; out gets n/2 + 1 bins.
// Plans are cached per size behind a mutex, so calls are thread-safe.
void RealFft(const double* in, int64_t in_len, int64_t n,
             std::vector<std::complex<double>>* out);

// Inverse of RealFft including the 1/n scale, so the round trip is identity.
void InverseRealFft(const std::vector<std::complex<double>>& in, int64_t n,
                    std::vector<double>* out);

}  // namespace dsp
}  // namespace bwex

#endif  // BWEX_FFT_H_
