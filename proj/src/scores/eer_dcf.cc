// src/scores/eer_dcf.cc

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

#include <algorithm>
#include <cmath>

#include "bwex/common.h"
#include "bwex/scores.h"

namespace bwex {
namespace {

// P_FA and P_FR at one decision threshold. A trial is accepted (claimed
// target) iff its score >= threshold.
struct OperatingPoint {
  double p_fa = 0.0;
  double p_fr = 0.0;
  double threshold = 0.0;
};

// Operating points for all achievable decisions, in order of increasing
// threshold: one below every score, one between each pair of adjacent
// distinct scores, one above every score.
std::vector<OperatingPoint> Sweep(const ScoreSet& s) {
  CheckScoreSet(s);
  int64_t n_tgt = 0, n_non = 0;
  std::vector<std::pair<double, bool>> pairs;
  pairs.reserve(s.scores.size());
  for (size_t i = 0; i < s.scores.size(); ++i) {
    pairs.emplace_back(s.scores[i], s.trials[i].is_target);
    (s.trials[i].is_target ? n_tgt : n_non) += 1;
  }
  if (n_tgt == 0 || n_non == 0)
    throw InvalidArgument("need at least one target and one non-target trial");
  std::sort(pairs.begin(), pairs.end());

  std::vector<OperatingPoint> points;
  int64_t fa = n_non, fr = 0;  // threshold below everything: accept all
  points.push_back({1.0, 0.0, pairs.front().first - 1.0});
  size_t i = 0;
  while (i < pairs.size()) {
    // Move the threshold just past one group of equal scores.
    const double v = pairs[i].first;
    while (i < pairs.size() && pairs[i].first == v) {
      if (pairs[i].second) {
        ++fr;
      } else {
        --fa;
      }
      ++i;
    }
    const double next =
        i < pairs.size() ? 0.5 * (v + pairs[i].first) : v + 1.0;
    points.push_back({static_cast<double>(fa) / static_cast<double>(n_non),
                      static_cast<double>(fr) / static_cast<double>(n_tgt),
                      next});
  }
  return points;
}

}  // namespace

EerResult Eer(const ScoreSet& s) {
  const std::vector<OperatingPoint> points = Sweep(s);
  // P_FA falls and P_FR rises with the threshold; find the first point at or
  // past the crossing and interpolate linearly from its predecessor.
  for (size_t k = 1; k < points.size(); ++k) {
    if (points[k].p_fr < points[k].p_fa) continue;
    const OperatingPoint& a = points[k - 1];
    const OperatingPoint& b = points[k];
    const double open = a.p_fa - a.p_fr;           // > 0, crossing not reached
    const double close = b.p_fr - b.p_fa;          // >= 0, crossing passed
    const double t = open / (open + close);
    EerResult r;
    r.eer_percent = 100.0 * (a.p_fa + t * (b.p_fa - a.p_fa));
    r.threshold = a.threshold + t * (b.threshold - a.threshold);
    return r;
  }
  // Unreachable: the last point has P_FA 0 and P_FR 1.
  throw RuntimeError("no error-rate crossing found");
}

DcfResult MinDcf(const ScoreSet& s, const DcfParams& p) {
  if (!(p.p_tar > 0.0 && p.p_tar < 1.0))
    throw InvalidArgument("p_tar must lie in (0, 1)");
  if (!(p.c_fa > 0.0) || !(p.c_fr > 0.0))
    throw InvalidArgument("error costs must be positive");
  const std::vector<OperatingPoint> points = Sweep(s);
  DcfResult best;
  best.min_dcf = HUGE_VAL;
  for (const OperatingPoint& pt : points) {
    const double c =
        (1.0 - p.p_tar) * p.c_fa * pt.p_fa + p.p_tar * p.c_fr * pt.p_fr;
    if (c < best.min_dcf) {
      best.min_dcf = c;
      best.threshold = pt.threshold;
    }
  }
  return best;
}

}  // namespace bwex
