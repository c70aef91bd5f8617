// src/kernels/conv_serial.cc

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

namespace bwex {
namespace kernels {

void Conv1dForwardSerial(const ConvSpec& s, const double* x, const double* w,
                         double* y) {
  ValidateConvSpec(s);
  for (int64_t b = 0; b < s.batch; ++b) {
    for (int64_t oc = 0; oc < s.out_ch; ++oc) {
      rows::Forward(s, b, oc, x, w, y);
    }
  }
}

void Conv1dGradInputSerial(const ConvSpec& s, const double* gy, const double* w,
                           double* gx) {
  ValidateConvSpec(s);
  for (int64_t b = 0; b < s.batch; ++b) {
    for (int64_t ic = 0; ic < s.in_ch; ++ic) {
      rows::GradInput(s, b, ic, gy, w, gx);
    }
  }
}

void Conv1dGradWeightSerial(const ConvSpec& s, const double* x, const double* gy,
                            double* gw) {
  ValidateConvSpec(s);
  for (int64_t oc = 0; oc < s.out_ch; ++oc) {
    rows::GradWeight(s, oc, x, gy, gw);
  }
}

void AxpbySerial(int64_t n, const double* a, double alpha, const double* b,
                 double* out) {
  for (int64_t i = 0; i < n; ++i) out[i] = a[i] + alpha * b[i];
}

}  // namespace kernels
}  // namespace bwex
