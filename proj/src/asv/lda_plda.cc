// src/asv/lda_plda.cc

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
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "bwex/asv.h"
#include "bwex/checkpoint.h"
#include "bwex/common.h"

namespace bwex {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd ToEigen(const Array& a) {
  if (a.Rank() != 2) throw InvalidArgument("expected a rank-2 array");
  MatrixXd m(a.dims[0], a.dims[1]);
  for (int64_t r = 0; r < a.dims[0]; ++r)
    for (int64_t c = 0; c < a.dims[1]; ++c)
      m(r, c) = a.v[static_cast<size_t>(r * a.dims[1] + c)];
  return m;
}

Array FromEigen(const MatrixXd& m) {
  Array a({m.rows(), m.cols()});
  for (int64_t r = 0; r < m.rows(); ++r)
    for (int64_t c = 0; c < m.cols(); ++c)
      a.v[static_cast<size_t>(r * m.cols() + c)] = m(r, c);
  return a;
}

Array FromEigen(const VectorXd& v) {
  Array a({v.size()});
  for (int64_t i = 0; i < v.size(); ++i) a.v[static_cast<size_t>(i)] = v(i);
  return a;
}

VectorXd ToEigenVec(const Array& a) {
  if (a.Rank() != 1) throw InvalidArgument("expected a rank-1 array");
  VectorXd v(a.dims[0]);
  for (int64_t i = 0; i < a.dims[0]; ++i) v(i) = a.v[static_cast<size_t>(i)];
  return v;
}

// Unit length normalization with a zero guard.
VectorXd LengthNorm(const VectorXd& v) {
  const double n = v.norm();
  return n > 0.0 ? VectorXd(v / n) : v;
}

}  // namespace

PldaModel TrainLdaPlda(const std::vector<Embedding>& rows, int64_t d_lda,
                       std::vector<std::string>* warnings) {
  if (rows.empty()) throw InvalidArgument("no embeddings");
  const int64_t d = static_cast<int64_t>(rows[0].vector.size());
  if (d < 1) throw InvalidArgument("empty embedding vectors");
  if (d_lda < 1 || d_lda > d)
    throw InvalidArgument("d_lda must lie in [1, d_emb]");

  std::map<std::string, std::vector<int64_t>> by_speaker;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<int64_t>(rows[i].vector.size()) != d)
      throw InvalidArgument("embeddings differ in dimension");
    if (rows[i].speaker_id.empty())
      throw InvalidArgument("every embedding needs a speaker label");
    by_speaker[rows[i].speaker_id].push_back(static_cast<int64_t>(i));
  }
  const int64_t num_classes = static_cast<int64_t>(by_speaker.size());
  if (num_classes < 2) throw InvalidArgument("at least two speakers required");
  for (const auto& kv : by_speaker)
    if (kv.second.size() < 2)
      throw InvalidArgument(StrCat("speaker ", kv.first,
                            " needs at least two utterances"));

  const int64_t n = static_cast<int64_t>(rows.size());
  MatrixXd x(n, d);
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = 0; j < d; ++j)
      x(i, j) = rows[static_cast<size_t>(i)].vector[static_cast<size_t>(j)];
  const VectorXd mean = x.colwise().mean().transpose();

  // Between- and within-class scatter around the global mean.
  MatrixXd sb = MatrixXd::Zero(d, d);
  MatrixXd sw = MatrixXd::Zero(d, d);
  for (const auto& kv : by_speaker) {
    VectorXd mu_c = VectorXd::Zero(d);
    for (int64_t i : kv.second) mu_c += x.row(i).transpose();
    mu_c /= static_cast<double>(kv.second.size());
    const VectorXd dm = mu_c - mean;
    sb += static_cast<double>(kv.second.size()) * dm * dm.transpose();
    for (int64_t i : kv.second) {
      const VectorXd r = x.row(i).transpose() - mu_c;
      sw += r * r.transpose();
    }
  }
  sb /= static_cast<double>(n);
  sw /= static_cast<double>(n);

  // The between scatter has rank at most (classes - 1); drop directions it
  // cannot support.
  int64_t d_out = std::min(d_lda, num_classes - 1);
  if (d_out < d_lda && warnings != nullptr)
    warnings->push_back("lda dimension reduced from " +
                        std::to_string(d_lda) + " to " +
                        std::to_string(d_out) +
                        " (between-class scatter rank)");

  const double ridge =
      1e-8 * std::max(sw.trace() / static_cast<double>(d), 1e-12);
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(
      0.5 * (sb + sb.transpose()),
      0.5 * (sw + sw.transpose()) + ridge * MatrixXd::Identity(d, d));
  if (ges.info() != Eigen::Success)
    throw RuntimeError("lda eigendecomposition failed");

  // Eigenvalues ascend; the projection keeps the most discriminative rows.
  MatrixXd lda(d_out, d);
  for (int64_t r = 0; r < d_out; ++r)
    lda.row(r) = ges.eigenvectors().col(d - 1 - r).transpose();

  // Project, length-normalize, and estimate the two-covariance model in
  // closed form from class means and residuals.
  MatrixXd u(n, d_out);
  for (int64_t i = 0; i < n; ++i)
    u.row(i) =
        LengthNorm(lda * (x.row(i).transpose() - mean)).transpose();
  const VectorXd proj_mean = u.colwise().mean().transpose();

  MatrixXd between = MatrixXd::Zero(d_out, d_out);
  MatrixXd within = MatrixXd::Zero(d_out, d_out);
  for (const auto& kv : by_speaker) {
    VectorXd mu_c = VectorXd::Zero(d_out);
    for (int64_t i : kv.second) mu_c += u.row(i).transpose();
    mu_c /= static_cast<double>(kv.second.size());
    const VectorXd dm = mu_c - proj_mean;
    between += static_cast<double>(kv.second.size()) * dm * dm.transpose();
    for (int64_t i : kv.second) {
      const VectorXd r = u.row(i).transpose() - mu_c;
      within += r * r.transpose();
    }
  }
  between /= static_cast<double>(n);
  within /= static_cast<double>(n);

  PldaModel m;
  m.mean = FromEigen(mean);
  m.lda = FromEigen(lda);
  m.proj_mean = FromEigen(proj_mean);
  m.within_cov = FromEigen(MatrixXd(0.5 * (within + within.transpose())));
  m.between_cov = FromEigen(MatrixXd(0.5 * (between + between.transpose())));
  return m;
}

PldaScorer::PldaScorer(const PldaModel& m) : model_(m) {
  const MatrixXd w = ToEigen(m.within_cov);
  const MatrixXd b = ToEigen(m.between_cov);
  const int64_t d = w.rows();
  if (b.rows() != d || w.cols() != d || b.cols() != d)
    throw InvalidArgument("covariance shapes disagree");
  if (m.lda.Rank() != 2 || m.lda.dims[0] != d)
    throw InvalidArgument("lda rows must match the covariance dimension");

  // Simultaneous diagonalization: V^T W V = I and V^T B V = diag(psi), so
  // both hypotheses factor per dimension after the transform u -> V^T u.
  const double ridge =
      1e-10 * std::max(w.trace() / static_cast<double>(d), 1e-12);
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(
      b, w + ridge * MatrixXd::Identity(d, d));
  if (ges.info() != Eigen::Success)
    throw RuntimeError("plda diagonalization failed");

  const MatrixXd vt = ges.eigenvectors().transpose();
  diag_.resize(static_cast<size_t>(d * d));
  for (int64_t r = 0; r < d; ++r)
    for (int64_t c = 0; c < d; ++c)
      diag_[static_cast<size_t>(r * d + c)] = vt(r, c);
  psi_.resize(static_cast<size_t>(d));
  for (int64_t i = 0; i < d; ++i)
    psi_[static_cast<size_t>(i)] = std::max(ges.eigenvalues()(i), 0.0);
}

std::vector<double> PldaScorer::Preprocess(const Embedding& e) const {
  const int64_t d_in = model_.mean.dims[0];
  if (static_cast<int64_t>(e.vector.size()) != d_in)
    throw InvalidArgument(StrCat("embedding dimension mismatch: got ",
                                 e.vector.size(), ", model expects ", d_in));
  const VectorXd raw =
      Eigen::Map<const VectorXd>(e.vector.data(), d_in) - ToEigenVec(model_.mean);
  const VectorXd u =
      LengthNorm(ToEigen(model_.lda) * raw) - ToEigenVec(model_.proj_mean);
  const int64_t d = model_.lda.dims[0];
  std::vector<double> y(static_cast<size_t>(d), 0.0);
  for (int64_t r = 0; r < d; ++r) {
    double acc = 0.0;
    for (int64_t c = 0; c < d; ++c)
      acc += diag_[static_cast<size_t>(r * d + c)] * u(c);
    y[static_cast<size_t>(r)] = acc;
  }
  return y;
}

double PldaScorer::Score(const Embedding& enroll, const Embedding& test) const {
  const std::vector<double> a = Preprocess(enroll);
  const std::vector<double> b = Preprocess(test);
  // Per dimension: same-speaker covariance [[psi+1, psi], [psi, psi+1]],
  // different-speaker covariance (psi+1) * I.
  double llr = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double psi = psi_[i];
    const double s = psi + 1.0;
    const double det_same = s * s - psi * psi;
    const double q_same =
        (s * (a[i] * a[i] + b[i] * b[i]) - 2.0 * psi * a[i] * b[i]) / det_same;
    const double q_diff = (a[i] * a[i] + b[i] * b[i]) / s;
    llr += 0.5 * (q_diff - q_same) + 0.5 * std::log(s * s / det_same);
  }
  return llr;
}

double PldaScore(const PldaModel& m, const Embedding& enroll,
                 const Embedding& test) {
  return PldaScorer(m).Score(enroll, test);
}

void SavePldaModel(const std::string& path, const PldaModel& m) {
  Checkpoint c;
  c.config_json = StrCat("{\"kind\":\"plda\",\"d_emb\":", m.mean.dims[0],
                         ",\"d_lda\":", m.lda.dims[0], "}");
  c.tensors["plda.mean"] = m.mean;
  c.tensors["plda.lda"] = m.lda;
  c.tensors["plda.proj_mean"] = m.proj_mean;
  c.tensors["plda.within"] = m.within_cov;
  c.tensors["plda.between"] = m.between_cov;
  SaveCheckpoint(path, c);
}

PldaModel LoadPldaModel(const std::string& path) {
  const Checkpoint c = LoadCheckpoint(path);
  PldaModel m;
  const char* keys[] = {"plda.mean", "plda.lda", "plda.proj_mean",
                        "plda.within", "plda.between"};
  for (const char* k : keys)
    if (c.tensors.find(k) == c.tensors.end())
      throw InvalidArgument(StrCat("checkpoint lacks tensor ", k));
  m.mean = c.tensors.at("plda.mean");
  m.lda = c.tensors.at("plda.lda");
  m.proj_mean = c.tensors.at("plda.proj_mean");
  m.within_cov = c.tensors.at("plda.within");
  m.between_cov = c.tensors.at("plda.between");
  return m;
}

}  // namespace bwex
