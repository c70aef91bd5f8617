// src/core/array.cc

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

#include "bwex/array.h"

#include <cmath>
#include <cstdio>

namespace bwex {

void LogWarning(const std::string& msg) {
  std::fprintf(stderr, "WARNING (bwex): %s\n", msg.c_str());
  std::fflush(stderr);
}

void LogInfo(const std::string& msg) {
  std::fprintf(stderr, "LOG (bwex): %s\n", msg.c_str());
  std::fflush(stderr);
}

Array Array::Full(std::vector<int64_t> d, double value) {
  Array a(std::move(d));
  for (double& x : a.v) x = value;
  return a;
}

Array Array::FromVec(const std::vector<double>& data) {
  Array a;
  a.dims = {static_cast<int64_t>(data.size())};
  a.v = data;
  return a;
}

Array Array::Scalar(double value) {
  Array a;
  a.dims = {1};
  a.v = {value};
  return a;
}

bool Array::AllFinite() const {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

std::string ShapeStr(const std::vector<int64_t>& dims) {
  std::string s = "(";
  for (size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(dims[i]);
  }
  s += ")";
  return s;
}

}  // namespace bwex
