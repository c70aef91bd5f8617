// include/bwex/array.h

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

#ifndef BWEX_ARRAY_H_
#define BWEX_ARRAY_H_

#include <cstdint>
#include <vector>

#include "bwex/common.h"

namespace bwex {

// Dense row-major double array of rank 1..3.  All network activations use the
// canonical (batch, channels, time) layout.
struct Array {
  std::vector<int64_t> dims;
  std::vector<double> v;

  Array() = default;
  explicit Array(std::vector<int64_t> d) : dims(std::move(d)) {
    v.assign(static_cast<size_t>(NumEl()), 0.0);
  }
  Array(std::vector<int64_t> d, std::vector<double> data)
      : dims(std::move(d)), v(std::move(data)) {
    BWEX_CHECK(static_cast<int64_t>(v.size()) == NumEl(),
               "data size does not match dims");
  }

  int Rank() const { return static_cast<int>(dims.size()); }
  int64_t NumEl() const {
    int64_t n = 1;
    for (int64_t d : dims) n *= d;
    return dims.empty() ? 0 : n;
  }
  int64_t Dim(int i) const { return dims[static_cast<size_t>(i)]; }

  double* Data() { return v.data(); }
  const double* Data() const { return v.data(); }

  // Rank-3 accessor; only valid when Rank() == 3.
  double& At(int64_t b, int64_t c, int64_t t) {
    return v[static_cast<size_t>((b * dims[1] + c) * dims[2] + t)];
  }
  double At(int64_t b, int64_t c, int64_t t) const {
    return v[static_cast<size_t>((b * dims[1] + c) * dims[2] + t)];
  }

  static Array Zeros(std::vector<int64_t> d) { return Array(std::move(d)); }
  static Array Full(std::vector<int64_t> d, double value);
  static Array FromVec(const std::vector<double>& data);
  static Array Scalar(double value);

  bool SameShape(const Array& other) const { return dims == other.dims; }
  bool AllFinite() const;
};

std::string ShapeStr(const std::vector<int64_t>& dims);

}  // namespace bwex

#endif  // BWEX_ARRAY_H_
