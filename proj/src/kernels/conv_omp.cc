// src/kernels/conv_omp.cc

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

#include "conv_rows.h"

// Static schedule over whole rows: each output row is written by exactly one
// thread with the serial inner loop, so results match the serial variant
// bitwise regardless of OMP_NUM_THREADS.

namespace bwex {
namespace kernels {

void Conv1dForwardOmp(const ConvSpec& s, const double* x, const double* w,
                      double* y) {
  ValidateConvSpec(s);
  const int64_t nrows = s.batch * s.out_ch;
#pragma omp parallel for schedule(static)
  for (int64_t r = 0; r < nrows; ++r) {
    rows::Forward(s, r / s.out_ch, r % s.out_ch, x, w, y);
  }
}

void Conv1dGradInputOmp(const ConvSpec& s, const double* gy, const double* w,
                        double* gx) {
  ValidateConvSpec(s);
  const int64_t nrows = s.batch * s.in_ch;
#pragma omp parallel for schedule(static)
  for (int64_t r = 0; r < nrows; ++r) {
    rows::GradInput(s, r / s.in_ch, r % s.in_ch, gy, w, gx);
  }
}

void Conv1dGradWeightOmp(const ConvSpec& s, const double* x, const double* gy,
                         double* gw) {
  ValidateConvSpec(s);
#pragma omp parallel for schedule(static)
  for (int64_t oc = 0; oc < s.out_ch; ++oc) {
    rows::GradWeight(s, oc, x, gy, gw);
  }
}

void AxpbyOmp(int64_t n, const double* a, double alpha, const double* b,
              double* out) {
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) out[i] = a[i] + alpha * b[i];
}

}  // namespace kernels
}  // namespace bwex
