// src/metrics/pesq.cc

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

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "bwex/common.h"
#include "bwex/metrics.h"

namespace bwex {

namespace {

namespace fs = std::filesystem;

// Last token on stdout that parses fully as a number; evaluators print the
// score at the end of their report.
bool ParseLastNumber(const std::string& text, double* out) {
  std::string token;
  bool found = false;
  auto flush = [&] {
    if (token.empty()) return;
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != nullptr && *end == '\0' && end != token.c_str()) {
      *out = v;
      found = true;
    }
    token.clear();
  };
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '=' || c == ',' ||
        c == ':') {
      flush();
    } else {
      token.push_back(c);
    }
  }
  flush();
  return found;
}

std::string TempWavPath(const char* tag) {
  static std::atomic<uint64_t> counter{0};
  const uint64_t id = counter.fetch_add(1);
  return (fs::temp_directory_path() /
          ("bwex_pesq_" + std::to_string(::getpid()) + "_" +
           std::to_string(id) + "_" + tag + ".wav"))
      .string();
}

}  // namespace

PesqResult PesqAdapter(const Waveform& clean, const Waveform& degraded,
                       const std::string& command) {
  PesqResult r;
  if (command.empty()) return r;  // not configured: absent score, no warning

  const std::string ref_path = TempWavPath("ref");
  const std::string deg_path = TempWavPath("deg");
  try {
    WriteWav(ref_path, clean);
    WriteWav(deg_path, degraded);
  } catch (const std::exception& e) {
    r.warning = std::string("pesq skipped: ") + e.what() + "; ";
    std::error_code ec;
    fs::remove(ref_path, ec);
    fs::remove(deg_path, ec);
    return r;
  }

  const std::string cmdline =
      command + " '" + ref_path + "' '" + deg_path + "' 2>/dev/null";
  std::string output;
  FILE* pipe = ::popen(cmdline.c_str(), "r");
  int status = -1;
  if (pipe != nullptr) {
    char buf[512];
    size_t got;
    while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0)
      output.append(buf, got);
    status = ::pclose(pipe);
  }

  std::error_code ec;
  fs::remove(ref_path, ec);
  fs::remove(deg_path, ec);

  if (pipe == nullptr) {
    r.warning = "pesq skipped: could not launch evaluator; ";
    return r;
  }
  if (status != 0) {
    r.warning = "pesq skipped: evaluator exited with status " +
                std::to_string(status) + "; ";
    return r;
  }
  double score = 0.0;
  if (!ParseLastNumber(output, &score)) {
    r.warning = "pesq skipped: no score found in evaluator output; ";
    return r;
  }
  r.score = score;
  return r;
}

}  // namespace bwex
