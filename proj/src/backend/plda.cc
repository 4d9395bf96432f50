// src/backend/plda.cc

// Copyright 2026  SR-ASV contributors
//
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

#include "srasv/backend/plda.h"

#include <cmath>
#include <map>
#include <numbers>

#include <Eigen/Dense>

#include "srasv/base/error.h"
#include "srasv/base/log.h"
#include "srasv/net/checkpoint.h"

namespace srasv {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2 pi)

Eigen::MatrixXd RoundToFloat(const Eigen::MatrixXd &m) { return m.cast<float>().cast<double>(); }

Eigen::MatrixXd Symmetrize(const Eigen::MatrixXd &m) { return 0.5 * (m + m.transpose()); }

// Raises eigenvalues below `floor` to it; returns true if any was raised.
bool FloorEigenvalues(Eigen::MatrixXd *m, double floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Symmetrize(*m));
  if (es.eigenvalues().minCoeff() >= floor) return false;
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(floor);
  *m = Symmetrize(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose());
  return true;
}

double LogDet(const Eigen::MatrixXd &m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw Error(Errc::kDegenerateData, "covariance is not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

struct ClassStats {
  int n = 0;
  Eigen::VectorXd sum;        // sum of centered samples
  Eigen::MatrixXd scatter;    // sum of (x - xbar)(x - xbar)^T
};

std::vector<ClassStats> GatherClasses(const EmbeddingMatrix &x, const std::vector<int> &labels,
                                      const Eigen::VectorXd &mu) {
  if (static_cast<Eigen::Index>(labels.size()) != x.rows())
    throw Error(Errc::kDimensionMismatch, "label count does not match embedding count");
  std::map<int, std::vector<Eigen::Index>> groups;
  for (Eigen::Index i = 0; i < x.rows(); ++i) groups[labels[i]].push_back(i);
  std::vector<ClassStats> out;
  const Eigen::Index d = x.cols();
  for (const auto &[label, rows] : groups) {
    ClassStats c;
    c.n = static_cast<int>(rows.size());
    c.sum = Eigen::VectorXd::Zero(d);
    for (Eigen::Index r : rows) c.sum += x.row(r).transpose() - mu;
    const Eigen::VectorXd mean = c.sum / c.n;
    c.scatter = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index r : rows) {
      const Eigen::VectorXd dev = x.row(r).transpose() - mu - mean;
      c.scatter.noalias() += dev * dev.transpose();
    }
    out.push_back(std::move(c));
  }
  return out;
}

double ClassLogLikelihood(const ClassStats &c, const Eigen::MatrixXd &sb, const Eigen::MatrixXd &sw,
                          const Eigen::LLT<Eigen::MatrixXd> &sw_llt, double logdet_sw) {
  const Eigen::Index d = sb.rows();
  const Eigen::VectorXd mean = c.sum / c.n;
  const Eigen::MatrixXd cov = sb + sw / c.n;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw Error(Errc::kDegenerateData, "class covariance is singular");
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  double ll = -0.5 * (d * kLog2Pi + logdet + mean.dot(llt.solve(mean)));
  if (c.n > 1) {
    const double within = sw_llt.solve(c.scatter).trace();
    ll += -0.5 * ((c.n - 1) * d * kLog2Pi + (c.n - 1) * logdet_sw + within) -
          0.5 * d * std::log(static_cast<double>(c.n));
  }
  return ll;
}

double LogLikelihood(const std::vector<ClassStats> &classes, const Eigen::MatrixXd &sb,
                     const Eigen::MatrixXd &sw) {
  Eigen::LLT<Eigen::MatrixXd> sw_llt(sw);
  if (sw_llt.info() != Eigen::Success) throw Error(Errc::kDegenerateData, "Sw is singular");
  const double logdet_sw = 2.0 * sw_llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  double total = 0.0;
  for (const ClassStats &c : classes) total += ClassLogLikelihood(c, sb, sw, sw_llt, logdet_sw);
  return total;
}

}  // namespace

double PldaLogLikelihood(const PldaModel &model, const EmbeddingMatrix &x,
                         const std::vector<int> &labels) {
  return LogLikelihood(GatherClasses(x, labels, model.mu), model.sb, model.sw);
}

PldaTrainResult TrainPlda(const EmbeddingMatrix &x, const std::vector<int> &labels,
                          const PldaTrainOptions &opts) {
  if (x.rows() == 0) throw Error(Errc::kEmptyDataset, "no embeddings for PLDA training");
  const Eigen::Index d = x.cols();
  PldaTrainResult res;
  PldaModel &m = res.model;
  m.mu = x.colwise().mean().transpose();
  const std::vector<ClassStats> classes = GatherClasses(x, labels, m.mu);
  if (classes.size() < 2) throw Error(Errc::kDegenerateData, "PLDA needs at least two classes");

  const EmbeddingMatrix centered = x.rowwise() - m.mu.transpose();
  const Eigen::MatrixXd total = centered.transpose() * centered / static_cast<double>(x.rows());
  const double floor = std::max(opts.floor_scale * total.trace() / d, 1e-300);

  // Initialisation: scatter of class means and pooled within-class scatter.
  m.sb = Eigen::MatrixXd::Zero(d, d);
  m.sw = Eigen::MatrixXd::Zero(d, d);
  int within_dof = 0;
  for (const ClassStats &c : classes) {
    const Eigen::VectorXd mean = c.sum / c.n;
    m.sb.noalias() += mean * mean.transpose();
    m.sw += c.scatter;
    within_dof += c.n - 1;
  }
  m.sb /= static_cast<double>(classes.size());
  if (within_dof == 0) {
    res.degenerate = true;
    m.sw = floor * Eigen::MatrixXd::Identity(d, d);
    SRASV_WARN("DegenerateData: no class has two samples; Sw set to the ridge floor");
  } else {
    m.sw /= static_cast<double>(within_dof);
  }
  FloorEigenvalues(&m.sb, floor);
  FloorEigenvalues(&m.sw, floor);
  res.log_likelihood.push_back(LogLikelihood(classes, m.sb, m.sw));

  const double n_total = static_cast<double>(x.rows());
  bool warned = false;
  for (int it = 0; it < opts.iterations; ++it) {
    Eigen::MatrixXd sb_acc = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd sw_acc = Eigen::MatrixXd::Zero(d, d);
    for (const ClassStats &c : classes) {
      // Posterior of the class variable given the class mean.
      const Eigen::MatrixXd gain = (m.sb + m.sw / c.n).ldlt().solve(m.sb).transpose();
      const Eigen::VectorXd mean = c.sum / c.n;
      const Eigen::VectorXd y = gain * mean;
      const Eigen::MatrixXd post = Symmetrize(m.sb - gain * m.sb);
      const Eigen::MatrixXd yy = y * y.transpose();
      sb_acc += yy + post;
      const Eigen::VectorXd dm = mean - y;
      sw_acc += c.scatter + c.n * (dm * dm.transpose() + post);
    }
    m.sb = Symmetrize(sb_acc / static_cast<double>(classes.size()));
    m.sw = res.degenerate ? m.sw : Symmetrize(sw_acc / n_total);
    FloorEigenvalues(&m.sb, floor);
    if (FloorEigenvalues(&m.sw, floor) && !res.degenerate && !warned) {
      warned = true;
      SRASV_WARN("DegenerateData: Sw ill-conditioned; eigenvalues floored at " << floor);
    }
    res.log_likelihood.push_back(LogLikelihood(classes, m.sb, m.sw));
  }
  m.mu = RoundToFloat(m.mu);
  m.sb = RoundToFloat(Symmetrize(m.sb));
  m.sw = RoundToFloat(Symmetrize(m.sw));
  return res;
}

PldaScorer::PldaScorer(const PldaModel &model) : model_(model) {
  const Eigen::Index d = model.mu.size();
  if (model.sb.rows() != d || model.sb.cols() != d || model.sw.rows() != d || model.sw.cols() != d)
    throw Error(Errc::kDimensionMismatch, "PLDA model shapes disagree");
  const Eigen::MatrixXd st = model.sb + model.sw;
  const Eigen::MatrixXd st_inv = st.ldlt().solve(Eigen::MatrixXd::Identity(d, d));
  const Eigen::MatrixXd reduced = Symmetrize(st - model.sb * st_inv * model.sb);
  const Eigen::MatrixXd a = reduced.ldlt().solve(Eigen::MatrixXd::Identity(d, d));
  q_ = Symmetrize(st_inv - a);
  p_ = Symmetrize(st_inv * model.sb * a);
  offset_ = 0.5 * LogDet(st) - 0.5 * LogDet(reduced);
}

double PldaScorer::Score(const Eigen::VectorXd &enroll, const Eigen::VectorXd &test) const {
  if (enroll.size() != model_.mu.size() || test.size() != model_.mu.size())
    throw Error(Errc::kDimensionMismatch, "embedding dimension does not match the PLDA model");
  const Eigen::VectorXd a = enroll - model_.mu, b = test - model_.mu;
  return 0.5 * a.dot(q_ * a) + 0.5 * b.dot(q_ * b) + a.dot(p_ * b) + offset_;
}

PldaModel AdaptPlda(const PldaModel &model, const EmbeddingMatrix &enrollment) {
  if (enrollment.cols() != model.mu.size())
    throw Error(Errc::kDimensionMismatch, "enrollment dimension does not match the PLDA model");
  PldaModel out = model;
  out.mu = RoundToFloat(MeanEmbedding(enrollment));
  return out;
}

void SavePlda(const std::string &path, const PldaModel &model) {
  const auto d = static_cast<std::uint32_t>(model.mu.size());
  BlobFile file;
  auto add = [&](const std::string &name, std::vector<std::uint32_t> dims, const double *data,
                 std::size_t n) {
    Blob b;
    b.name = name;
    b.dims = std::move(dims);
    b.data.assign(data, data + n);
    file.blobs.push_back(std::move(b));
  };
  add("mu", {d}, model.mu.data(), d);
  add("Sb", {d, d}, model.sb.data(), static_cast<std::size_t>(d) * d);
  add("Sw", {d, d}, model.sw.data(), static_cast<std::size_t>(d) * d);
  WriteBlobFile(path, file);
}

PldaModel LoadPlda(const std::string &path) {
  const BlobFile file = ReadBlobFile(path);
  const Blob &mu = file.Get("mu");
  const Blob &sb = file.Get("Sb");
  const Blob &sw = file.Get("Sw");
  if (mu.dims.size() != 1) throw Error(Errc::kCorruptCheckpoint, "bad mu shape");
  const std::uint32_t d = mu.dims[0];
  const std::vector<std::uint32_t> square = {d, d};
  if (sb.dims != square || sw.dims != square)
    throw Error(Errc::kCorruptCheckpoint, "PLDA covariance shapes disagree with mu");
  PldaModel m;
  m.mu = Eigen::Map<const Eigen::VectorXf>(mu.data.data(), d).cast<double>();
  m.sb = Eigen::Map<const Eigen::MatrixXf>(sb.data.data(), d, d).cast<double>();
  m.sw = Eigen::Map<const Eigen::MatrixXf>(sw.data.data(), d, d).cast<double>();
  return m;
}

}  // namespace srasv
