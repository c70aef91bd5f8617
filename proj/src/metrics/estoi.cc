// src/metrics/estoi.cc

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

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "bwex/common.h"
#include "bwex/fft.h"
#include "bwex/metrics.h"

namespace bwex {

namespace {

// Analysis constants: 10 kHz rate, 256-sample frames with 50% overlap, 512
// FFT, 15 one-third-octave bands from 150 Hz, 30-frame (384 ms) segments,
// 40 dB dynamic range for the silence mask.
constexpr int64_t kRate = 10000;
constexpr int64_t kFrame = 256;
constexpr int64_t kHop = 128;
constexpr int64_t kFft = 512;
constexpr int64_t kBands = 15;
constexpr int64_t kSegFrames = 30;
constexpr double kDynRangeDb = 40.0;
constexpr double kNormEps = 1e-15;

// Strictly positive interior of a symmetric Hann window; shifted copies at
// half overlap sum to approximately one, so masked overlap-add keeps the
// retained speech at its original level.
std::vector<double> InteriorHann(int64_t n) {
  std::vector<double> w(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i)
    w[static_cast<size_t>(i)] =
        0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i + 1) /
                              static_cast<double>(n + 1)));
  return w;
}

// Rational 5/8 polyphase resampler, 16 kHz to 10 kHz.  The anti-alias
// filter is a Blackman-windowed sinc at the 80 kHz intermediate rate with
// its cutoff at the 5 kHz output Nyquist.
std::vector<double> ResampleTo10k(const std::vector<double>& x) {
  constexpr int64_t kUp = 5, kDown = 8;
  constexpr int64_t kHalf = 80;
  constexpr int64_t kTaps = 2 * kHalf + 1;
  static const std::vector<double> h = [] {
    std::vector<double> taps(kTaps);
    const double fc = 1.0 / 16.0;  // cycles per sample at the 80 kHz rate
    for (int64_t i = 0; i < kTaps; ++i) {
      const double t = static_cast<double>(i - kHalf);
      const double sinc = (std::fabs(t) < 1e-12)
                              ? 2.0 * fc
                              : std::sin(2.0 * M_PI * fc * t) / (M_PI * t);
      const double u = static_cast<double>(i) / static_cast<double>(kTaps - 1);
      const double w = 0.42 - 0.5 * std::cos(2.0 * M_PI * u) +
                       0.08 * std::cos(4.0 * M_PI * u);
      taps[static_cast<size_t>(i)] = static_cast<double>(kUp) * sinc * w;
    }
    return taps;
  }();

  const int64_t n_in = static_cast<int64_t>(x.size());
  const int64_t n_out = n_in * kUp / kDown;
  std::vector<double> y(static_cast<size_t>(n_out), 0.0);
  for (int64_t n = 0; n < n_out; ++n) {
    const int64_t pos = n * kDown;  // position at the 80 kHz rate
    double acc = 0.0;
    // Nonzero upsampled samples sit at multiples of kUp.
    int64_t k_lo = (pos - (kTaps - 1) + kUp - 1) / kUp;
    if (k_lo < 0) k_lo = 0;
    int64_t k_hi = pos / kUp;
    if (k_hi > n_in - 1) k_hi = n_in - 1;
    for (int64_t k = k_lo; k <= k_hi; ++k)
      acc += h[static_cast<size_t>(pos - kUp * k)] * x[static_cast<size_t>(k)];
    y[static_cast<size_t>(n)] = acc;
  }
  return y;
}

// Drops frames whose reference energy falls more than 40 dB below the
// loudest frame; both signals are rebuilt by overlap-adding the retained
// windowed frames.
void RemoveSilentFrames(std::vector<double>* x, std::vector<double>* y) {
  const std::vector<double> w = InteriorHann(kFrame);
  const int64_t n = static_cast<int64_t>(x->size());
  if (n < kFrame) throw InvalidArgument("signal shorter than one frame");
  const int64_t frames = (n - kFrame) / kHop + 1;

  std::vector<double> energy(static_cast<size_t>(frames));
  double max_e = -1e300;
  for (int64_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (int64_t i = 0; i < kFrame; ++i) {
      const double v =
          w[static_cast<size_t>(i)] * (*x)[static_cast<size_t>(f * kHop + i)];
      acc += v * v;
    }
    const double e = 20.0 * std::log10(std::sqrt(acc) + 1e-300);
    energy[static_cast<size_t>(f)] = e;
    max_e = std::max(max_e, e);
  }

  std::vector<int64_t> kept;
  for (int64_t f = 0; f < frames; ++f)
    if (energy[static_cast<size_t>(f)] > max_e - kDynRangeDb)
      kept.push_back(f);
  if (kept.empty()) throw InvalidArgument("no active frames found");

  const int64_t out_len = kFrame + (static_cast<int64_t>(kept.size()) - 1) * kHop;
  std::vector<double> xs(static_cast<size_t>(out_len), 0.0);
  std::vector<double> ys(static_cast<size_t>(out_len), 0.0);
  for (size_t i = 0; i < kept.size(); ++i) {
    const int64_t src = kept[i] * kHop;
    const int64_t dst = static_cast<int64_t>(i) * kHop;
    for (int64_t j = 0; j < kFrame; ++j) {
      const double wv = w[static_cast<size_t>(j)];
      xs[static_cast<size_t>(dst + j)] += wv * (*x)[static_cast<size_t>(src + j)];
      ys[static_cast<size_t>(dst + j)] += wv * (*y)[static_cast<size_t>(src + j)];
    }
  }
  *x = std::move(xs);
  *y = std::move(ys);
}

// One-third-octave band magnitudes per frame: rows are bands, columns are
// frames.
std::vector<std::vector<double>> BandMatrix(const std::vector<double>& x,
                                            int64_t frames) {
  // Band j collects FFT bins inside [cf/2^(1/6), cf*2^(1/6)) around the
  // center frequency cf = 150 * 2^(j/3).
  static const std::vector<std::pair<int64_t, int64_t>> bins = [] {
    std::vector<std::pair<int64_t, int64_t>> edges(kBands);
    const double bin_hz =
        static_cast<double>(kRate) / static_cast<double>(kFft);
    for (int64_t j = 0; j < kBands; ++j) {
      const double cf = 150.0 * std::pow(2.0, static_cast<double>(j) / 3.0);
      const double lo = cf / std::pow(2.0, 1.0 / 6.0);
      const double hi = cf * std::pow(2.0, 1.0 / 6.0);
      const int64_t k_lo = static_cast<int64_t>(std::ceil(lo / bin_hz));
      int64_t k_hi = static_cast<int64_t>(std::ceil(hi / bin_hz));
      if (k_hi > kFft / 2 + 1) k_hi = kFft / 2 + 1;
      edges[static_cast<size_t>(j)] = {k_lo, k_hi};
    }
    return edges;
  }();

  const std::vector<double> w = InteriorHann(kFrame);
  std::vector<std::vector<double>> bands(
      static_cast<size_t>(kBands),
      std::vector<double>(static_cast<size_t>(frames), 0.0));
  std::vector<double> frame(static_cast<size_t>(kFrame));
  std::vector<std::complex<double>> spec;
  for (int64_t f = 0; f < frames; ++f) {
    for (int64_t i = 0; i < kFrame; ++i)
      frame[static_cast<size_t>(i)] =
          w[static_cast<size_t>(i)] * x[static_cast<size_t>(f * kHop + i)];
    dsp::RealFft(frame.data(), kFrame, kFft, &spec);
    for (int64_t j = 0; j < kBands; ++j) {
      double acc = 0.0;
      for (int64_t k = bins[static_cast<size_t>(j)].first;
           k < bins[static_cast<size_t>(j)].second; ++k)
        acc += std::norm(spec[static_cast<size_t>(k)]);
      bands[static_cast<size_t>(j)][static_cast<size_t>(f)] = std::sqrt(acc);
    }
  }
  return bands;
}

// Rows to zero mean and unit norm, then columns to zero mean and unit norm.
void NormalizeSegment(std::vector<double>* seg) {
  auto& s = *seg;  // kBands x kSegFrames, row-major
  for (int64_t j = 0; j < kBands; ++j) {
    double mu = 0.0;
    for (int64_t n = 0; n < kSegFrames; ++n)
      mu += s[static_cast<size_t>(j * kSegFrames + n)];
    mu /= static_cast<double>(kSegFrames);
    double nrm = 0.0;
    for (int64_t n = 0; n < kSegFrames; ++n) {
      auto& v = s[static_cast<size_t>(j * kSegFrames + n)];
      v -= mu;
      nrm += v * v;
    }
    nrm = std::sqrt(nrm) + kNormEps;
    for (int64_t n = 0; n < kSegFrames; ++n)
      s[static_cast<size_t>(j * kSegFrames + n)] /= nrm;
  }
  for (int64_t n = 0; n < kSegFrames; ++n) {
    double mu = 0.0;
    for (int64_t j = 0; j < kBands; ++j)
      mu += s[static_cast<size_t>(j * kSegFrames + n)];
    mu /= static_cast<double>(kBands);
    double nrm = 0.0;
    for (int64_t j = 0; j < kBands; ++j) {
      auto& v = s[static_cast<size_t>(j * kSegFrames + n)];
      v -= mu;
      nrm += v * v;
    }
    nrm = std::sqrt(nrm) + kNormEps;
    for (int64_t j = 0; j < kBands; ++j)
      s[static_cast<size_t>(j * kSegFrames + n)] /= nrm;
  }
}

}  // namespace

double Estoi(const Waveform& clean, const Waveform& degraded) {
  if (clean.NumSamples() != degraded.NumSamples())
    throw InvalidArgument("signals must have equal length");
  if (clean.sample_rate != degraded.sample_rate)
    throw InvalidArgument("signals must share a sample rate");
  if (clean.DurationSeconds() < 0.5)
    throw InvalidArgument("signals must last at least half a second");

  std::vector<double> x, y;
  if (clean.sample_rate == 16000) {
    x = ResampleTo10k(clean.samples);
    y = ResampleTo10k(degraded.samples);
  } else if (clean.sample_rate == kRate) {
    x = clean.samples;
    y = degraded.samples;
  } else {
    throw InvalidArgument("sample rate must be 16 kHz or 10 kHz");
  }

  RemoveSilentFrames(&x, &y);
  const int64_t n = static_cast<int64_t>(x.size());
  if (n < kFrame + (kSegFrames - 1) * kHop)
    throw InvalidArgument("not enough active signal for a 384 ms segment");
  const int64_t frames = (n - kFrame) / kHop + 1;

  const auto bx = BandMatrix(x, frames);
  const auto by = BandMatrix(y, frames);

  double total = 0.0;
  int64_t segments = 0;
  std::vector<double> sx(static_cast<size_t>(kBands * kSegFrames));
  std::vector<double> sy(static_cast<size_t>(kBands * kSegFrames));
  for (int64_t end = kSegFrames - 1; end < frames; ++end) {
    const int64_t start = end - kSegFrames + 1;
    for (int64_t j = 0; j < kBands; ++j)
      for (int64_t t = 0; t < kSegFrames; ++t) {
        sx[static_cast<size_t>(j * kSegFrames + t)] =
            bx[static_cast<size_t>(j)][static_cast<size_t>(start + t)];
        sy[static_cast<size_t>(j * kSegFrames + t)] =
            by[static_cast<size_t>(j)][static_cast<size_t>(start + t)];
      }
    NormalizeSegment(&sx);
    NormalizeSegment(&sy);
    double dot = 0.0;
    for (size_t i = 0; i < sx.size(); ++i) dot += sx[i] * sy[i];
    total += dot / static_cast<double>(kSegFrames);
    ++segments;
  }
  return total / static_cast<double>(segments);
}

}  // namespace bwex
