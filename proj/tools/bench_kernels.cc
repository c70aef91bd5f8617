// tools/bench_kernels.cc

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

// Times the serial and OpenMP convolution kernels on shapes representative of
// the bandwidth-extension models and prints a comparison table.  The two
// variants are bit-identical by construction; this tool only reports speed.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bwex/kernels.h"
#include "bwex/rng.h"

using namespace bwex;
using namespace bwex::kernels;

namespace {

struct BenchCase {
  std::string name;
  ConvSpec spec;
};

ConvSpec Spec(int64_t batch, int64_t in_ch, int64_t out_ch, int64_t in_len,
              int64_t kernel, int64_t stride, int64_t dilation, int64_t groups,
              int64_t pad) {
  ConvSpec s;
  s.batch = batch;
  s.in_ch = in_ch;
  s.out_ch = out_ch;
  s.in_len = in_len;
  s.kernel = kernel;
  s.stride = stride;
  s.dilation = dilation;
  s.groups = groups;
  s.pad_left = pad;
  s.pad_right = pad;
  s.out_len = ConvOutLen(s);
  ValidateConvSpec(s);
  return s;
}

template <typename F>
double TimeMs(F f, int reps) {
  // One warmup, then best-of-reps wall time.
  f();
  double best = 1e30;
  for (int r = 0; r < reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  int reps = 5;
  if (argc > 1) reps = std::atoi(argv[1]);

  std::vector<BenchCase> cases = {
      {"encoder 1->128 k16 s8", Spec(4, 1, 128, 16000, 16, 8, 1, 1, 4)},
      {"tcn 1x1 128->512", Spec(4, 128, 512, 2000, 1, 1, 1, 1, 0)},
      {"tcn depthwise k3 d8", Spec(4, 512, 512, 2000, 3, 1, 8, 512, 8)},
      {"disc k41 grouped", Spec(4, 64, 256, 4000, 41, 4, 1, 16, 20)},
      {"grad-weight heavy", Spec(8, 128, 128, 2000, 3, 1, 1, 1, 1)},
  };

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::printf("conv kernel benchmark (best of %d, %d threads)\n", reps, threads);
  std::printf("%-26s %-12s %12s %12s %8s\n", "case", "kernel", "serial ms",
              "openmp ms", "speedup");

  Rng rng(1234);
  for (const BenchCase& c : cases) {
    const ConvSpec& s = c.spec;
    std::vector<double> x(static_cast<size_t>(s.batch * s.in_ch * s.in_len));
    std::vector<double> w(static_cast<size_t>(s.out_ch * (s.in_ch / s.groups) * s.kernel));
    std::vector<double> y(static_cast<size_t>(s.batch * s.out_ch * s.out_len));
    std::vector<double> gx(x.size());
    std::vector<double> gw(w.size());
    for (double& v : x) v = rng.Normal();
    for (double& v : w) v = rng.Normal();
    for (double& v : y) v = rng.Normal();

    struct Row {
      const char* op;
      double serial, omp;
    };
    std::vector<Row> rows;
    rows.push_back({"forward",
                    TimeMs([&] { Conv1dForwardSerial(s, x.data(), w.data(), y.data()); }, reps),
                    TimeMs([&] { Conv1dForwardOmp(s, x.data(), w.data(), y.data()); }, reps)});
    rows.push_back({"grad_input",
                    TimeMs([&] { Conv1dGradInputSerial(s, y.data(), w.data(), gx.data()); }, reps),
                    TimeMs([&] { Conv1dGradInputOmp(s, y.data(), w.data(), gx.data()); }, reps)});
    rows.push_back({"grad_weight",
                    TimeMs([&] { Conv1dGradWeightSerial(s, x.data(), y.data(), gw.data()); }, reps),
                    TimeMs([&] { Conv1dGradWeightOmp(s, x.data(), y.data(), gw.data()); }, reps)});
    for (const Row& r : rows) {
      std::printf("%-26s %-12s %12.3f %12.3f %7.2fx\n", c.name.c_str(), r.op, r.serial,
                  r.omp, r.serial / r.omp);
    }
  }
  return 0;
}
