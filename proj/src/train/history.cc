// src/train/history.cc

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

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>

#include "bwex/common.h"
#include "bwex/train.h"

namespace bwex {

namespace {

// %.17g prints enough digits that strtod recovers the exact double.
std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double ParseDouble(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw InvalidArgument("bad numeric field in history line: " + s);
  return v;
}

int64_t ParseInt(const std::string& s) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw InvalidArgument("bad integer field in history line: " + s);
  return static_cast<int64_t>(v);
}

}  // namespace

std::string HistoryLine(const HistoryRecord& r) {
  std::ostringstream os;
  os << "epoch=" << r.epoch << " step=" << r.step
     << " audio_seconds=" << FormatDouble(r.audio_seconds)
     << " lr_g=" << FormatDouble(r.lr_g) << " lr_d=" << FormatDouble(r.lr_d);
  for (const auto& kv : r.values)
    os << " " << kv.first << "=" << FormatDouble(kv.second);
  return os.str();
}

HistoryRecord ParseHistoryLine(const std::string& line) {
  HistoryRecord r;
  std::istringstream is(line);
  std::string tok;
  bool saw_step = false;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("history token lacks '=': " + tok);
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "epoch") {
      r.epoch = ParseInt(val);
    } else if (key == "step") {
      r.step = ParseInt(val);
      saw_step = true;
    } else if (key == "audio_seconds") {
      r.audio_seconds = ParseDouble(val);
    } else if (key == "lr_g") {
      r.lr_g = ParseDouble(val);
    } else if (key == "lr_d") {
      r.lr_d = ParseDouble(val);
    } else {
      r.values[key] = ParseDouble(val);
    }
  }
  if (!saw_step) throw InvalidArgument("history line lacks step field");
  return r;
}

}  // namespace bwex
