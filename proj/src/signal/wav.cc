// src/signal/wav.cc

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

#include "bwex/wave.h"

#include <cmath>
#include <cstring>
#include <fstream>

namespace bwex {

std::string BandToString(Band b) {
  switch (b) {
    case Band::kNarrow: return "narrow";
    case Band::kWide: return "wide";
    case Band::kWideDown: return "wide_down";
    case Band::kExtended: return "extended";
    case Band::kUnknown: return "unknown";
  }
  return "unknown";
}

Band BandFromString(const std::string& s) {
  if (s == "narrow") return Band::kNarrow;
  if (s == "wide") return Band::kWide;
  if (s == "wide_down") return Band::kWideDown;
  if (s == "extended") return Band::kExtended;
  if (s == "unknown") return Band::kUnknown;
  throw InvalidArgument(StrCat("unknown band label: ", s));
}

Waveform NormalizeAmplitude(const Waveform& w) {
  BWEX_CHECK(!w.samples.empty(), "cannot normalize an empty waveform");
  double peak = 0.0;
  for (double x : w.samples) peak = std::max(peak, std::fabs(x));
  if (peak == 0.0) return w;
  Waveform out = w;
  const double inv = 1.0 / peak;
  for (double& x : out.samples) x *= inv;
  return out;
}

namespace {

uint32_t ReadU32(const char* p) {
  uint32_t v;
  std::memcpy(&v, p, 4);
  return v;  // little-endian host assumed, as everywhere in this codebase
}

uint16_t ReadU16(const char* p) {
  uint16_t v;
  std::memcpy(&v, p, 2);
  return v;
}

void PutU32(std::string* s, uint32_t v) { s->append(reinterpret_cast<char*>(&v), 4); }
void PutU16(std::string* s, uint16_t v) { s->append(reinterpret_cast<char*>(&v), 2); }

}  // namespace

Waveform ReadWav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  BWEX_RUNTIME_CHECK(f.good(), "cannot open wav file: ", path);
  std::string bytes((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());
  BWEX_RUNTIME_CHECK(bytes.size() >= 44, "wav file too short: ", path);
  BWEX_RUNTIME_CHECK(bytes.compare(0, 4, "RIFF") == 0 && bytes.compare(8, 4, "WAVE") == 0,
                     "not a RIFF/WAVE file: ", path);

  // Walk chunks; only fmt and data matter, everything else is skipped.
  size_t pos = 12;
  bool have_fmt = false;
  uint16_t channels = 0, bits = 0;
  uint32_t rate = 0;
  Waveform w;
  bool have_data = false;
  while (pos + 8 <= bytes.size()) {
    const std::string id = bytes.substr(pos, 4);
    const uint32_t size = ReadU32(bytes.data() + pos + 4);
    pos += 8;
    if (pos + size > bytes.size()) break;
    if (id == "fmt ") {
      BWEX_RUNTIME_CHECK(size >= 16, "malformed fmt chunk: ", path);
      const uint16_t format = ReadU16(bytes.data() + pos);
      channels = ReadU16(bytes.data() + pos + 2);
      rate = ReadU32(bytes.data() + pos + 4);
      bits = ReadU16(bytes.data() + pos + 14);
      BWEX_RUNTIME_CHECK(format == 1, "only PCM wav supported: ", path);
      BWEX_RUNTIME_CHECK(channels == 1, "only mono wav supported: ", path);
      BWEX_RUNTIME_CHECK(bits == 16, "only 16-bit wav supported: ", path);
      have_fmt = true;
    } else if (id == "data") {
      BWEX_RUNTIME_CHECK(have_fmt, "data chunk before fmt chunk: ", path);
      const size_t n = size / 2;
      w.samples.resize(n);
      for (size_t i = 0; i < n; ++i) {
        int16_t s;
        std::memcpy(&s, bytes.data() + pos + 2 * i, 2);
        w.samples[i] = static_cast<double>(s) / 32768.0;
      }
      have_data = true;
    }
    pos += size + (size & 1);  // chunks are word-aligned
  }
  BWEX_RUNTIME_CHECK(have_fmt && have_data, "wav missing fmt or data chunk: ", path);
  BWEX_RUNTIME_CHECK(rate == 8000 || rate == 16000, "unsupported sample rate ", rate,
                     ": ", path);
  w.sample_rate = static_cast<int>(rate);
  w.band = Band::kUnknown;
  return w;
}

void WriteWav(const std::string& path, const Waveform& w) {
  BWEX_CHECK(w.sample_rate == 8000 || w.sample_rate == 16000,
             "unsupported sample rate ", w.sample_rate);
  const uint32_t n = static_cast<uint32_t>(w.samples.size());
  const uint32_t data_bytes = n * 2;
  std::string out;
  out.reserve(44 + data_bytes);
  out.append("RIFF");
  PutU32(&out, 36 + data_bytes);
  out.append("WAVE");
  out.append("fmt ");
  PutU32(&out, 16);
  PutU16(&out, 1);  // PCM
  PutU16(&out, 1);  // mono
  PutU32(&out, static_cast<uint32_t>(w.sample_rate));
  PutU32(&out, static_cast<uint32_t>(w.sample_rate * 2));  // byte rate
  PutU16(&out, 2);   // block align
  PutU16(&out, 16);  // bits
  out.append("data");
  PutU32(&out, data_bytes);
  // Quantize with the same 1/32768 scale the reader uses so that a
  // write/read round trip stays within half an LSB.
  for (uint32_t i = 0; i < n; ++i) {
    long q = std::lrint(w.samples[i] * 32768.0);
    q = std::max(-32768L, std::min(32767L, q));
    const int16_t s = static_cast<int16_t>(q);
    out.append(reinterpret_cast<const char*>(&s), 2);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  BWEX_RUNTIME_CHECK(f.good(), "cannot open for write: ", path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  BWEX_RUNTIME_CHECK(f.good(), "short write: ", path);
}

}  // namespace bwex
