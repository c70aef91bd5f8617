// src/kernels/kernels.cc

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

#include "bwex/kernels.h"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "bwex/common.h"

namespace bwex {
namespace kernels {

namespace {

Backend InitialBackend() {
  const char* env = std::getenv("BWEX_KERNEL_BACKEND");
  if (env != nullptr && std::strcmp(env, "serial") == 0) return Backend::kSerial;
  return Backend::kOpenMp;
}

std::atomic<Backend> g_backend{InitialBackend()};

}  // namespace

Backend GetBackend() { return g_backend.load(std::memory_order_relaxed); }
void SetBackend(Backend b) { g_backend.store(b, std::memory_order_relaxed); }

int64_t ConvOutLen(const ConvSpec& s) {
  int64_t span = (s.kernel - 1) * s.dilation + 1;
  int64_t padded = s.in_len + s.pad_left + s.pad_right;
  if (padded < span) return 0;
  return (padded - span) / s.stride + 1;
}

void ValidateConvSpec(const ConvSpec& s) {
  BWEX_CHECK(s.batch > 0 && s.in_ch > 0 && s.out_ch > 0, "bad conv channels");
  BWEX_CHECK(s.kernel > 0 && s.stride > 0 && s.dilation > 0, "bad conv geometry");
  BWEX_CHECK(s.groups > 0 && s.in_ch % s.groups == 0 && s.out_ch % s.groups == 0,
             "groups must divide channel counts");
  BWEX_CHECK(s.pad_left >= 0 && s.pad_right >= 0, "negative padding");
  BWEX_CHECK(s.out_len == ConvOutLen(s), "out_len inconsistent with geometry");
  BWEX_CHECK(s.out_len > 0, "empty conv output");
}

void Conv1dForward(const ConvSpec& s, const double* x, const double* w, double* y) {
  if (GetBackend() == Backend::kOpenMp) {
    Conv1dForwardOmp(s, x, w, y);
  } else {
    Conv1dForwardSerial(s, x, w, y);
  }
}

void Conv1dGradInput(const ConvSpec& s, const double* gy, const double* w, double* gx) {
  if (GetBackend() == Backend::kOpenMp) {
    Conv1dGradInputOmp(s, gy, w, gx);
  } else {
    Conv1dGradInputSerial(s, gy, w, gx);
  }
}

void Conv1dGradWeight(const ConvSpec& s, const double* x, const double* gy, double* gw) {
  if (GetBackend() == Backend::kOpenMp) {
    Conv1dGradWeightOmp(s, x, gy, gw);
  } else {
    Conv1dGradWeightSerial(s, x, gy, gw);
  }
}

void Axpby(int64_t n, const double* a, double alpha, const double* b, double* out) {
  if (GetBackend() == Backend::kOpenMp) {
    AxpbyOmp(n, a, alpha, b, out);
  } else {
    AxpbySerial(n, a, alpha, b, out);
  }
}

}  // namespace kernels
}  // namespace bwex
