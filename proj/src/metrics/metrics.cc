// src/metrics/metrics.cc

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
#include <cstdio>
#include <sstream>
#include <string>

#include "bwex/common.h"
#include "bwex/metrics.h"

namespace bwex {

namespace {

constexpr double kMagFloor = 1e-7;

void CheckComparable(const Waveform& x, const Waveform& y) {
  if (x.NumSamples() != y.NumSamples())
    throw InvalidArgument("signals must have equal length");
  if (x.sample_rate != y.sample_rate)
    throw InvalidArgument("signals must share a sample rate");
  if (x.NumSamples() == 0) throw InvalidArgument("empty signal");
}

double MagDb(const std::complex<double>& z) {
  return 20.0 * std::log10(std::max(std::abs(z), kMagFloor));
}

std::string FormatCell(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string FormatCell(const std::optional<double>& v) {
  return v.has_value() ? FormatCell(*v) : std::string("-");
}

}  // namespace

double Lsd(const Waveform& x, const Waveform& y, const dsp::StftConfig& c) {
  CheckComparable(x, y);
  if (x.NumSamples() < c.win_length)
    throw InvalidArgument("signal shorter than one analysis window");
  const dsp::Spectrogram sx = dsp::Stft(x.samples, c);
  const dsp::Spectrogram sy = dsp::Stft(y.samples, c);
  double frame_sum = 0.0;
  for (int64_t f = 0; f < sx.num_frames; ++f) {
    double acc = 0.0;
    for (int64_t b = 0; b < sx.num_bins; ++b) {
      const double d = MagDb(sx.At(f, b)) - MagDb(sy.At(f, b));
      acc += d * d;
    }
    frame_sum += std::sqrt(acc / static_cast<double>(sx.num_bins));
  }
  return frame_sum / static_cast<double>(sx.num_frames);
}

double MseTime(const Waveform& x, const Waveform& y) {
  CheckComparable(x, y);
  double acc = 0.0;
  for (size_t i = 0; i < x.samples.size(); ++i) {
    const double d = x.samples[i] - y.samples[i];
    acc += d * d;
  }
  return acc / static_cast<double>(x.samples.size());
}

double DeepFeatureMse(const Waveform& x, const Waveform& y,
                      const ActivationFn& encoder) {
  CheckComparable(x, y);
  if (!encoder) throw InvalidArgument("activation provider required");
  ag::NoGradGuard ng;
  const int64_t n = x.NumSamples();
  Array ax({1, 1, n}), ay({1, 1, n});
  for (int64_t t = 0; t < n; ++t) {
    ax.At(0, 0, t) = x.samples[static_cast<size_t>(t)];
    ay.At(0, 0, t) = y.samples[static_cast<size_t>(t)];
  }
  const std::vector<ag::Tensor> bx = encoder(ag::Tensor(std::move(ax)));
  const std::vector<ag::Tensor> by = encoder(ag::Tensor(std::move(ay)));
  if (bx.empty() || bx.size() != by.size())
    throw InvalidArgument("encoder produced mismatched activation stacks");
  double total = 0.0;
  for (size_t b = 0; b < bx.size(); ++b) {
    const Array& va = bx[b].Value();
    const Array& vb = by[b].Value();
    if (va.dims != vb.dims)
      throw InvalidArgument("encoder activations differ in shape between signals");
    double acc = 0.0;
    for (size_t i = 0; i < va.v.size(); ++i) {
      const double d = va.v[i] - vb.v[i];
      acc += d * d;
    }
    total += acc / static_cast<double>(va.v.size());
  }
  return total;
}

QualityReport Evaluate(const Waveform& reference, const Waveform& test,
                       const ActivationFn& encoder,
                       const std::string& pesq_command) {
  QualityReport q;
  q.lsd = Lsd(reference, test);
  q.mse_time = MseTime(reference, test);
  if (reference.DurationSeconds() >= 0.5 && test.DurationSeconds() >= 0.5) {
    try {
      q.estoi = Estoi(reference, test);
    } catch (const InvalidArgument& e) {
      q.warning += std::string("estoi skipped: ") + e.what() + "; ";
    }
  }
  if (encoder) q.deep_feature_mse = DeepFeatureMse(reference, test, encoder);
  PesqResult p = PesqAdapter(reference, test, pesq_command);
  q.pesq = p.score;
  if (!p.warning.empty()) q.warning += p.warning;
  return q;
}

std::string QualityTableHeader() {
  return "utt_id\tlsd_db\tmse_time\testoi\tdeep_feature_mse\tpesq";
}

std::string QualityTableRow(const std::string& utt_id,
                            const QualityReport& r) {
  std::ostringstream os;
  os << utt_id << '\t' << FormatCell(r.lsd) << '\t' << FormatCell(r.mse_time)
     << '\t' << FormatCell(r.estoi) << '\t' << FormatCell(r.deep_feature_mse)
     << '\t' << FormatCell(r.pesq);
  return os.str();
}

}  // namespace bwex
