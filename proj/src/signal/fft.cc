// src/signal/fft.cc

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

#include "bwex/fft.h"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>

#include "bwex/common.h"

namespace bwex {
namespace dsp {

namespace {

// One cached plan pair per transform size.  FFTW planning is not thread-safe,
// and plan execution on the plan's own buffers is serialized by the same
// mutex; transforms here are short relative to surrounding work.
struct PlanEntry {
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  int64_t n = 0;

  ~PlanEntry() {
    if (fwd != nullptr) fftw_destroy_plan(fwd);
    if (inv != nullptr) fftw_destroy_plan(inv);
    if (real != nullptr) fftw_free(real);
    if (cplx != nullptr) fftw_free(cplx);
  }
};

std::mutex g_mutex;
std::map<int64_t, PlanEntry>& PlanCache() {
  static std::map<int64_t, PlanEntry>* cache = new std::map<int64_t, PlanEntry>();
  return *cache;
}

PlanEntry& GetPlan(int64_t n) {
  auto& cache = PlanCache();
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  PlanEntry& e = cache[n];
  e.n = n;
  e.real = fftw_alloc_real(static_cast<size_t>(n));
  e.cplx = fftw_alloc_complex(static_cast<size_t>(n / 2 + 1));
  e.fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), e.real, e.cplx, FFTW_ESTIMATE);
  e.inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), e.cplx, e.real, FFTW_ESTIMATE);
  BWEX_RUNTIME_CHECK(e.fwd != nullptr && e.inv != nullptr, "fftw planning failed for n=", n);
  return e;
}

}  // namespace

void RealFft(const double* in, int64_t in_len, int64_t n,
             std::vector<std::complex<double>>* out) {
  BWEX_CHECK(n >= 1, "fft size must be positive");
  BWEX_CHECK(in_len >= 0 && in_len <= n, "input longer than fft size");
  std::lock_guard<std::mutex> lock(g_mutex);
  PlanEntry& e = GetPlan(n);
  std::memcpy(e.real, in, static_cast<size_t>(in_len) * sizeof(double));
  std::memset(e.real + in_len, 0, static_cast<size_t>(n - in_len) * sizeof(double));
  fftw_execute(e.fwd);
  out->resize(static_cast<size_t>(n / 2 + 1));
  for (size_t i = 0; i < out->size(); ++i) {
    (*out)[i] = std::complex<double>(e.cplx[i][0], e.cplx[i][1]);
  }
}

void InverseRealFft(const std::vector<std::complex<double>>& in, int64_t n,
                    std::vector<double>* out) {
  BWEX_CHECK(n >= 1, "fft size must be positive");
  BWEX_CHECK(static_cast<int64_t>(in.size()) == n / 2 + 1,
             "expected ", n / 2 + 1, " bins, got ", in.size());
  std::lock_guard<std::mutex> lock(g_mutex);
  PlanEntry& e = GetPlan(n);
  std::memcpy(e.cplx, in.data(), in.size() * sizeof(std::complex<double>));
  fftw_execute(e.inv);
  out->resize(static_cast<size_t>(n));
  const double scale = 1.0 / static_cast<double>(n);
  for (int64_t i = 0; i < n; ++i) (*out)[static_cast<size_t>(i)] = e.real[i] * scale;
}

}  // namespace dsp
}  // namespace bwex
