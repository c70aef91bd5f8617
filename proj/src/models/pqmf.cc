// src/models/pqmf.cc

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

#include "bwex/models.h"

#include <cmath>
#include <vector>

#include "bwex/common.h"

namespace bwex {

using ag::Tensor;

namespace {

// Zeroth-order modified Bessel function by power series.
double BesselI0(double x) {
  double sum = 1.0, term = 1.0;
  const double half = 0.5 * x;
  for (int k = 1; k < 64; ++k) {
    term *= (half / k) * (half / k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

// Kaiser-windowed lowpass prototype; cutoff is a fraction of pi, slightly
// above 1/(2*bands) so adjacent bands overlap at their crossover.  `taps`
// counts coefficients and must be odd so the filter centers on an integer
// sample; the half-sample offset of an even length spoils the polyphase
// symmetry the reconstruction accuracy depends on.
std::vector<double> PrototypeFilter(int64_t taps, double cutoff, double beta) {
  std::vector<double> h(static_cast<size_t>(taps));
  const double m = static_cast<double>(taps - 1);
  const double denom = BesselI0(beta);
  for (int64_t n = 0; n < taps; ++n) {
    const double t = static_cast<double>(n) - 0.5 * m;
    const double sinc =
        (std::fabs(t) < 1e-12) ? cutoff : std::sin(M_PI * cutoff * t) / (M_PI * t);
    const double r = 2.0 * static_cast<double>(n) / m - 1.0;
    const double win = BesselI0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / denom;
    h[static_cast<size_t>(n)] = sinc * win;
  }
  return h;
}

}  // namespace

Pqmf::Pqmf() {
  // Prototype tuned for a 4-band near-perfect-reconstruction bank.
  const std::vector<double> proto = PrototypeFilter(kTaps, 0.142, 9.0);
  Array a({kBands, 1, kTaps});
  Array s({kBands, 1, kTaps});
  const double center = 0.5 * static_cast<double>(kTaps - 1);
  for (int64_t k = 0; k < kBands; ++k) {
    const double phase = (k % 2 == 0) ? M_PI / 4.0 : -M_PI / 4.0;
    for (int64_t n = 0; n < kTaps; ++n) {
      const double arg = (2.0 * k + 1.0) * (M_PI / (2.0 * kBands)) *
                         (static_cast<double>(n) - center);
      const double h = 2.0 * proto[static_cast<size_t>(n)] * std::cos(arg + phase);
      a.At(k, 0, n) = h;
      // The strided analysis conv correlates (an implicit time reversal) and
      // the transposed synthesis conv convolves, so using the same taps on
      // both sides yields the reversed-filter synthesis bank.  Gain 4
      // compensates the stride lattice.
      s.At(k, 0, n) = 4.0 * h;
    }
  }
  analysis_ = Tensor(std::move(a));
  synthesis_ = Tensor(std::move(s));
}

Tensor Pqmf::Analysis(const Tensor& x) const {
  BWEX_CHECK(x.Value().Rank() == 3 && x.Dims()[1] == 1,
             "pqmf analysis expects (B, 1, T), got ", ShapeStr(x.Dims()));
  Tensor h = x;
  const int64_t len = x.Dims()[2];
  const int64_t padded = (len + kBands - 1) / kBands * kBands;
  if (padded != len) h = ag::PadTime(h, 0, padded - len);
  ag::ConvGeom geom;
  geom.stride = kBands;
  geom.pad_left = 31;
  geom.pad_right = 28;
  return ag::Conv1d(h, analysis_, geom);  // (B, 4, padded / 4)
}

Tensor Pqmf::Synthesis(const Tensor& subbands, int64_t out_len) const {
  BWEX_CHECK(subbands.Value().Rank() == 3 && subbands.Dims()[1] == kBands,
             "pqmf synthesis expects (B, 4, T), got ", ShapeStr(subbands.Dims()));
  const int64_t t4 = subbands.Dims()[2];
  BWEX_CHECK(out_len > 0 && out_len <= t4 * kBands, "bad synthesis length ",
             out_len, " for ", t4, " subband frames");
  // Matching the analysis left pad makes the round trip delay-free: the
  // composite kernel peaks where both offsets cancel.
  ag::ConvGeom geom;
  geom.stride = kBands;
  geom.pad_left = 31;
  geom.pad_right = 28;
  Tensor y = ag::ConvTranspose1d(subbands, synthesis_, geom, t4 * kBands);
  if (y.Dims()[2] != out_len) y = ag::SliceTime(y, 0, out_len);
  return y;
}

}  // namespace bwex
