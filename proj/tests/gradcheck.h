// tests/gradcheck.h

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

#ifndef BWEX_TESTS_GRADCHECK_H_
#define BWEX_TESTS_GRADCHECK_H_

#include <cmath>
#include <functional>
#include <vector>

#include "bwex/autograd.h"

namespace bwex {
namespace testutil {

// Central-difference gradient of a scalar-valued function of one array.
inline Array NumericGrad(const std::function<double(const Array&)>& f,
                         const Array& x, double eps = 1e-5) {
  Array g(x.dims);
  Array xp = x;
  for (size_t i = 0; i < x.v.size(); ++i) {
    const double saved = xp.v[i];
    xp.v[i] = saved + eps;
    const double hi = f(xp);
    xp.v[i] = saved - eps;
    const double lo = f(xp);
    xp.v[i] = saved;
    g.v[i] = (hi - lo) / (2.0 * eps);
  }
  return g;
}

inline double MaxRelErr(const Array& a, const Array& b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.v.size(); ++i) {
    const double denom = std::max({1.0, std::fabs(a.v[i]), std::fabs(b.v[i])});
    worst = std::max(worst, std::fabs(a.v[i] - b.v[i]) / denom);
  }
  return worst;
}

// Compares Backward()-accumulated leaf gradients against central differences.
// build must construct a scalar loss from the leaf tensor it is given.
inline double CheckGrad(const std::function<ag::Tensor(const ag::Tensor&)>& build,
                        const Array& x0, double eps = 1e-5) {
  ag::Tensor x(x0, /*requires_grad=*/true);
  ag::Tensor loss = build(x);
  ag::Backward(loss);
  const Array analytic = x.Grad();
  Array numeric = NumericGrad(
      [&](const Array& xv) {
        ag::NoGradGuard guard;
        ag::Tensor t(xv, false);
        return build(t).Value().v[0];
      },
      x0, eps);
  return MaxRelErr(analytic, numeric);
}

}  // namespace testutil
}  // namespace bwex

#endif  // BWEX_TESTS_GRADCHECK_H_
