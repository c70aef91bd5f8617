// src/kernels/conv_rows.h

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

#ifndef BWEX_SRC_KERNELS_CONV_ROWS_H_
#define BWEX_SRC_KERNELS_CONV_ROWS_H_

#include <algorithm>

#include "bwex/kernels.h"

// Per-row conv work shared by the serial and OpenMP variants.  A "row" is one
// independent output slice, so any partition of rows over threads reproduces
// the serial result bit for bit: every accumulation happens inside one row.

namespace bwex {
namespace kernels {
namespace rows {

// y[b, oc, :] for one (b, oc).
inline void Forward(const ConvSpec& s, int64_t b, int64_t oc, const double* x,
                    const double* w, double* y) {
  const int64_t icpg = s.in_ch / s.groups;
  const int64_t ocpg = s.out_ch / s.groups;
  const int64_t g = oc / ocpg;
  const double* wrow = w + oc * icpg * s.kernel;
  double* yrow = y + (b * s.out_ch + oc) * s.out_len;
  const double* xbase = x + (b * s.in_ch + g * icpg) * s.in_len;

  if (s.kernel == 1 && s.stride == 1 && s.pad_left == 0 && s.pad_right == 0) {
    // Pointwise convs dominate the separator; stream over time per channel.
    for (int64_t t = 0; t < s.out_len; ++t) yrow[t] = 0.0;
    for (int64_t icg = 0; icg < icpg; ++icg) {
      const double wv = wrow[icg];
      const double* xr = xbase + icg * s.in_len;
      for (int64_t t = 0; t < s.out_len; ++t) yrow[t] += wv * xr[t];
    }
    return;
  }

  for (int64_t to = 0; to < s.out_len; ++to) {
    const int64_t start = to * s.stride - s.pad_left;
    double acc = 0.0;
    for (int64_t icg = 0; icg < icpg; ++icg) {
      const double* xr = xbase + icg * s.in_len;
      const double* wr = wrow + icg * s.kernel;
      for (int64_t k = 0; k < s.kernel; ++k) {
        const int64_t ti = start + k * s.dilation;
        if (ti >= 0 && ti < s.in_len) acc += wr[k] * xr[ti];
      }
    }
    yrow[to] = acc;
  }
}

// gx[b, ic, :] for one (b, ic).
inline void GradInput(const ConvSpec& s, int64_t b, int64_t ic, const double* gy,
                      const double* w, double* gx) {
  const int64_t icpg = s.in_ch / s.groups;
  const int64_t ocpg = s.out_ch / s.groups;
  const int64_t g = ic / icpg;
  const int64_t icg = ic - g * icpg;
  double* gxrow = gx + (b * s.in_ch + ic) * s.in_len;

  if (s.kernel == 1 && s.stride == 1 && s.pad_left == 0 && s.pad_right == 0) {
    for (int64_t t = 0; t < s.in_len; ++t) gxrow[t] = 0.0;
    for (int64_t oc = g * ocpg; oc < (g + 1) * ocpg; ++oc) {
      const double wv = w[oc * icpg + icg];
      const double* gyr = gy + (b * s.out_ch + oc) * s.out_len;
      for (int64_t t = 0; t < s.in_len; ++t) gxrow[t] += wv * gyr[t];
    }
    return;
  }

  // Scatter formulation: every write lands inside this row, so the row is
  // still owned by a single thread and serial/openmp parity is preserved.
  for (int64_t t = 0; t < s.in_len; ++t) gxrow[t] = 0.0;
  for (int64_t oc = g * ocpg; oc < (g + 1) * ocpg; ++oc) {
    const double* gyr = gy + (b * s.out_ch + oc) * s.out_len;
    const double* wr = w + (oc * icpg + icg) * s.kernel;
    for (int64_t to = 0; to < s.out_len; ++to) {
      const double gv = gyr[to];
      const int64_t base = to * s.stride - s.pad_left;
      int64_t k_lo = 0;
      if (base < 0) k_lo = (-base + s.dilation - 1) / s.dilation;
      const int64_t span = s.in_len - 1 - base;
      if (span < 0) continue;
      const int64_t k_hi = std::min(s.kernel - 1, span / s.dilation);
      for (int64_t k = k_lo; k <= k_hi; ++k) {
        gxrow[base + k * s.dilation] += gv * wr[k];
      }
    }
  }
}

// gw[oc, :, :] for one oc, accumulated serially over batch and time.
inline void GradWeight(const ConvSpec& s, int64_t oc, const double* x,
                       const double* gy, double* gw) {
  const int64_t icpg = s.in_ch / s.groups;
  const int64_t ocpg = s.out_ch / s.groups;
  const int64_t g = oc / ocpg;
  double* gwrow = gw + oc * icpg * s.kernel;
  for (int64_t i = 0; i < icpg * s.kernel; ++i) gwrow[i] = 0.0;

  for (int64_t b = 0; b < s.batch; ++b) {
    const double* gyr = gy + (b * s.out_ch + oc) * s.out_len;
    const double* xbase = x + (b * s.in_ch + g * icpg) * s.in_len;
    for (int64_t icg = 0; icg < icpg; ++icg) {
      const double* xr = xbase + icg * s.in_len;
      double* gwr = gwrow + icg * s.kernel;
      for (int64_t k = 0; k < s.kernel; ++k) {
        const int64_t off = k * s.dilation - s.pad_left;
        double acc = 0.0;
        for (int64_t to = 0; to < s.out_len; ++to) {
          const int64_t ti = to * s.stride + off;
          if (ti >= 0 && ti < s.in_len) acc += gyr[to] * xr[ti];
        }
        gwr[k] += acc;
      }
    }
  }
}

}  // namespace rows
}  // namespace kernels
}  // namespace bwex

#endif  // BWEX_SRC_KERNELS_CONV_ROWS_H_
