// src/scores/tsne.cc

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
#include <set>

#include "bwex/common.h"
#include "bwex/rng.h"
#include "bwex/scores.h"

namespace bwex {
namespace {

constexpr double kProbFloor = 1e-12;

// Pairwise squared Euclidean distances between rows of x (n, d).
std::vector<double> SquaredDistances(const Array& x, int64_t n, int64_t d) {
  std::vector<double> dist(static_cast<size_t>(n * n), 0.0);
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (int64_t k = 0; k < d; ++k) {
        const double diff = x.v[static_cast<size_t>(i * d + k)] -
                            x.v[static_cast<size_t>(j * d + k)];
        acc += diff * diff;
      }
      dist[static_cast<size_t>(i * n + j)] = acc;
      dist[static_cast<size_t>(j * n + i)] = acc;
    }
  return dist;
}

// Conditional affinities p_{j|i} with the kernel width of row i calibrated
// by binary search so the entropy matches log(perplexity).
std::vector<double> CalibratedAffinities(const std::vector<double>& dist,
                                         int64_t n, double perplexity) {
  std::vector<double> p(static_cast<size_t>(n * n), 0.0);
  const double target = std::log(perplexity);
  std::vector<double> row(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    double beta = 1.0, beta_lo = -HUGE_VAL, beta_hi = HUGE_VAL;
    double sum = 0.0;
    for (int64_t it = 0; it < 50; ++it) {
      sum = 0.0;
      double moment = 0.0;
      for (int64_t j = 0; j < n; ++j) {
        if (j == i) {
          row[static_cast<size_t>(j)] = 0.0;
          continue;
        }
        const double e = std::exp(-beta * dist[static_cast<size_t>(i * n + j)]);
        row[static_cast<size_t>(j)] = e;
        sum += e;
        moment += e * dist[static_cast<size_t>(i * n + j)];
      }
      const double entropy =
          sum > 0.0 ? std::log(sum) + beta * moment / sum : 0.0;
      const double diff = entropy - target;
      if (std::fabs(diff) < 1e-5) break;
      if (diff > 0.0) {
        beta_lo = beta;
        beta = beta_hi == HUGE_VAL ? beta * 2.0 : 0.5 * (beta + beta_hi);
      } else {
        beta_hi = beta;
        beta = beta_lo == -HUGE_VAL ? beta * 0.5 : 0.5 * (beta + beta_lo);
      }
    }
    if (sum <= 0.0) sum = 1.0;
    for (int64_t j = 0; j < n; ++j)
      p[static_cast<size_t>(i * n + j)] = row[static_cast<size_t>(j)] / sum;
  }
  return p;
}

double KlDivergence(const std::vector<double>& p, const std::vector<double>& q,
                    int64_t n) {
  double kl = 0.0;
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double pv = std::max(p[static_cast<size_t>(i * n + j)], kProbFloor);
      const double qv = std::max(q[static_cast<size_t>(i * n + j)], kProbFloor);
      kl += pv * std::log(pv / qv);
    }
  return kl;
}

}  // namespace

TsneResult Tsne(const Array& x, const TsneConfig& cfg) {
  if (x.Rank() != 2) throw InvalidArgument("tsne expects (n, d) input");
  const int64_t n = x.dims[0], d = x.dims[1];
  if (n < 10 || n > 10000)
    throw InvalidArgument(StrCat("tsne supports 10 to 10000 points, got ", n));
  if (!(cfg.perplexity > 0.0) || 3.0 * cfg.perplexity >= static_cast<double>(n))
    throw InvalidArgument(
        StrCat("perplexity must satisfy 0 < 3*perplexity < n, got ",
               cfg.perplexity, " for n ", n));
  if (cfg.iterations < 1) throw InvalidArgument("need at least one iteration");
  if (!x.AllFinite()) throw InvalidArgument("non-finite input");

  TsneResult result;
  Rng rng(cfg.seed);

  Array input = x;
  std::vector<double> dist = SquaredDistances(input, n, d);
  double max_dist = 0.0;
  for (double v : dist) max_dist = std::max(max_dist, v);
  if (max_dist == 0.0) {
    // Every point coincides; perturb so the kernel calibration is defined.
    result.warnings.push_back(
        "all input points are identical; applied random jitter");
    for (double& v : input.v) v += 1e-6 * rng.Normal();
    dist = SquaredDistances(input, n, d);
  }

  // Symmetrized joint affinities.
  const std::vector<double> cond = CalibratedAffinities(dist, n, cfg.perplexity);
  std::vector<double> p(static_cast<size_t>(n * n), 0.0);
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = 0; j < n; ++j)
      p[static_cast<size_t>(i * n + j)] =
          (cond[static_cast<size_t>(i * n + j)] +
           cond[static_cast<size_t>(j * n + i)]) /
          (2.0 * static_cast<double>(n));

  std::vector<double> p_run = p;  // exaggerated copy used by the gradient
  for (double& v : p_run) v *= cfg.early_exaggeration;

  std::vector<double> y(static_cast<size_t>(2 * n));
  for (double& v : y) v = 1e-2 * rng.Normal();
  std::vector<double> delta(static_cast<size_t>(2 * n), 0.0);
  std::vector<double> gains(static_cast<size_t>(2 * n), 1.0);
  std::vector<double> q(static_cast<size_t>(n * n), 0.0);
  std::vector<double> grad(static_cast<size_t>(2 * n), 0.0);

  for (int64_t it = 0; it < cfg.iterations; ++it) {
    if (it == cfg.exaggeration_iters) p_run = p;

    // Student-t affinities in the embedding.
    double z = 0.0;
    for (int64_t i = 0; i < n; ++i)
      for (int64_t j = i + 1; j < n; ++j) {
        const double dx = y[static_cast<size_t>(2 * i)] -
                          y[static_cast<size_t>(2 * j)];
        const double dy = y[static_cast<size_t>(2 * i + 1)] -
                          y[static_cast<size_t>(2 * j + 1)];
        const double w = 1.0 / (1.0 + dx * dx + dy * dy);
        q[static_cast<size_t>(i * n + j)] = w;
        q[static_cast<size_t>(j * n + i)] = w;
        z += 2.0 * w;
      }

    std::fill(grad.begin(), grad.end(), 0.0);
    for (int64_t i = 0; i < n; ++i)
      for (int64_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double w = q[static_cast<size_t>(i * n + j)];
        const double coeff =
            4.0 * (p_run[static_cast<size_t>(i * n + j)] - w / z) * w;
        grad[static_cast<size_t>(2 * i)] +=
            coeff * (y[static_cast<size_t>(2 * i)] -
                     y[static_cast<size_t>(2 * j)]);
        grad[static_cast<size_t>(2 * i + 1)] +=
            coeff * (y[static_cast<size_t>(2 * i + 1)] -
                     y[static_cast<size_t>(2 * j + 1)]);
      }

    const double momentum = it < cfg.momentum_switch_iter
                                ? cfg.momentum_initial
                                : cfg.momentum_final;
    for (size_t k = 0; k < y.size(); ++k) {
      gains[k] = (grad[k] > 0.0) != (delta[k] > 0.0) ? gains[k] + 0.2
                                                     : gains[k] * 0.8;
      gains[k] = std::max(gains[k], 0.01);
      delta[k] = momentum * delta[k] - cfg.learning_rate * gains[k] * grad[k];
      y[k] += delta[k];
    }
    double cx = 0.0, cy = 0.0;
    for (int64_t i = 0; i < n; ++i) {
      cx += y[static_cast<size_t>(2 * i)];
      cy += y[static_cast<size_t>(2 * i + 1)];
    }
    cx /= static_cast<double>(n);
    cy /= static_cast<double>(n);
    for (int64_t i = 0; i < n; ++i) {
      y[static_cast<size_t>(2 * i)] -= cx;
      y[static_cast<size_t>(2 * i + 1)] -= cy;
    }

    if ((it + 1) % 50 == 0 || it + 1 == cfg.iterations) {
      std::vector<double> qn(static_cast<size_t>(n * n), 0.0);
      for (int64_t i = 0; i < n; ++i)
        for (int64_t j = 0; j < n; ++j)
          if (i != j)
            qn[static_cast<size_t>(i * n + j)] =
                q[static_cast<size_t>(i * n + j)] / z;
      result.kl_history.emplace_back(it + 1, KlDivergence(p, qn, n));
    }
  }

  result.coords = Array({n, 2});
  result.coords.v = y;
  return result;
}

double Silhouette(const Array& coords, const std::vector<int64_t>& labels) {
  if (coords.Rank() != 2 || coords.dims[1] != 2)
    throw InvalidArgument("silhouette expects (n, 2) coordinates");
  const int64_t n = coords.dims[0];
  if (static_cast<int64_t>(labels.size()) != n)
    throw InvalidArgument("one label per point required");
  const std::set<int64_t> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2)
    throw InvalidArgument("silhouette needs at least two clusters");

  const auto dist = [&](int64_t i, int64_t j) {
    const double dx = coords.v[static_cast<size_t>(2 * i)] -
                      coords.v[static_cast<size_t>(2 * j)];
    const double dy = coords.v[static_cast<size_t>(2 * i + 1)] -
                      coords.v[static_cast<size_t>(2 * j + 1)];
    return std::sqrt(dx * dx + dy * dy);
  };

  double total = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    std::map<int64_t, std::pair<double, int64_t>> acc;  // label -> (sum, count)
    for (int64_t j = 0; j < n; ++j) {
      if (j == i) continue;
      auto& a = acc[labels[static_cast<size_t>(j)]];
      a.first += dist(i, j);
      a.second += 1;
    }
    const int64_t own = labels[static_cast<size_t>(i)];
    const auto self = acc.find(own);
    if (self == acc.end() || self->second.second == 0) continue;  // singleton
    const double a = self->second.first / static_cast<double>(self->second.second);
    double b = HUGE_VAL;
    for (const auto& kv : acc)
      if (kv.first != own)
        b = std::min(b, kv.second.first / static_cast<double>(kv.second.second));
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(n);
}

}  // namespace bwex
