// include/bwex/kernels.h

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

#ifndef BWEX_KERNELS_H_
#define BWEX_KERNELS_H_

#include <cstdint>

namespace bwex {
namespace kernels {

// Every kernel ships in two variants: a plain serial reference and an OpenMP
// one.  Both compute each output element with the same serial inner loop, so
// the variants are bit-identical for any thread count; tests assert exact
// equality and the bench tool compares their throughput.
enum class Backend { kSerial, kOpenMp };

Backend GetBackend();
void SetBackend(Backend b);

// Geometry of a 1-D convolution.  x is (batch, in_ch, in_len), w is
// (out_ch, in_ch / groups, kernel), y is (batch, out_ch, out_len) with
// out_len = (in_len + pad_left + pad_right - (kernel-1)*dilation - 1) / stride + 1.
// Padding is implicit zeros; kernels never read out of range.
struct ConvSpec {
  int64_t batch = 1;
  int64_t in_ch = 1;
  int64_t out_ch = 1;
  int64_t in_len = 0;
  int64_t out_len = 0;
  int64_t kernel = 1;
  int64_t stride = 1;
  int64_t dilation = 1;
  int64_t groups = 1;
  int64_t pad_left = 0;
  int64_t pad_right = 0;
};

int64_t ConvOutLen(const ConvSpec& s);
void ValidateConvSpec(const ConvSpec& s);

// Dispatch on the active backend.
void Conv1dForward(const ConvSpec& s, const double* x, const double* w, double* y);
void Conv1dGradInput(const ConvSpec& s, const double* gy, const double* w, double* gx);
void Conv1dGradWeight(const ConvSpec& s, const double* x, const double* gy, double* gw);

// Fixed-backend entry points (used by parity tests and the benchmark).
void Conv1dForwardSerial(const ConvSpec& s, const double* x, const double* w, double* y);
void Conv1dGradInputSerial(const ConvSpec& s, const double* gy, const double* w, double* gx);
void Conv1dGradWeightSerial(const ConvSpec& s, const double* x, const double* gy, double* gw);
void Conv1dForwardOmp(const ConvSpec& s, const double* x, const double* w, double* y);
void Conv1dGradInputOmp(const ConvSpec& s, const double* gy, const double* w, double* gx);
void Conv1dGradWeightOmp(const ConvSpec& s, const double* x, const double* gy, double* gw);

// Elementwise fused multiply-add over flat buffers: out[i] = a[i] + alpha*b[i].
void Axpby(int64_t n, const double* a, double alpha, const double* b, double* out);
void AxpbySerial(int64_t n, const double* a, double alpha, const double* b, double* out);
void AxpbyOmp(int64_t n, const double* a, double alpha, const double* b, double* out);

}  // namespace kernels
}  // namespace bwex

#endif  // BWEX_KERNELS_H_
