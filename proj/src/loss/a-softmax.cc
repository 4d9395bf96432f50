// src/loss/a-softmax.cc

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

#include "srasv/loss/a-softmax.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "srasv/base/error.h"

namespace srasv {

namespace {

int MarginSegment(double cos_theta, int m) {
  const double theta = std::acos(std::clamp(cos_theta, -1.0, 1.0));
  return std::clamp(static_cast<int>(std::floor(m * theta / std::numbers::pi)), 0, m - 1);
}

// Chebyshev polynomials: cos(m theta) = T_m(c); d/dc T_m(c) = m U_{m-1}(c).
void Chebyshev(double c, int m, double *t_m, double *u_m1) {
  double t0 = 1.0, t1 = c, u0 = 1.0, u1 = 2.0 * c;
  if (m == 1) {
    *t_m = c;
    *u_m1 = 1.0;
    return;
  }
  for (int n = 1; n < m; ++n) {
    const double t2 = 2.0 * c * t1 - t0;
    t0 = t1;
    t1 = t2;
  }
  for (int n = 1; n < m - 1; ++n) {
    const double u2 = 2.0 * c * u1 - u0;
    u0 = u1;
    u1 = u2;
  }
  *t_m = t1;
  *u_m1 = u1;
}

void CheckLabels(const std::vector<int> &labels, Eigen::Index n, Eigen::Index classes) {
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw Error(Errc::kShapeMismatch, "label count does not match batch size");
  for (int y : labels)
    if (y < 0 || y >= classes)
      throw Error(Errc::kLabelOutOfRange, "label " + std::to_string(y) + " outside [0, " +
                                              std::to_string(classes) + ")");
}

double WeightOf(const std::vector<double> &w, int y) { return w.empty() ? 1.0 : w.at(y); }

// Softmax cross-entropy on a logit row: returns the loss and overwrites
// `logits` with dL/dlogit.
double SoftmaxRow(std::vector<double> &logits, int y) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double &v : logits) z += (v = std::exp(v - mx));
  const double loss = -std::log(logits[y] / z);
  for (double &v : logits) v /= z;
  logits[y] -= 1.0;
  return loss;
}

}  // namespace

double Psi(double theta, int m) {
  if (m < 1) throw Error(Errc::kBadMargin, "margin must be >= 1");
  const int k = std::clamp(static_cast<int>(std::floor(m * theta / std::numbers::pi)), 0, m - 1);
  return ((k % 2) ? -1.0 : 1.0) * std::cos(m * theta) - 2.0 * k;
}

template <typename T>
SoftmaxLossResult<T> ASoftmaxLoss(const RowMatrix<T> &features, const RowMatrix<T> &weights,
                                  const std::vector<int> &labels, int margin, double blend,
                                  const std::vector<double> &class_weights) {
  if (margin < 1) throw Error(Errc::kBadMargin, "margin must be >= 1, got " + std::to_string(margin));
  if (features.cols() != weights.cols())
    throw Error(Errc::kShapeMismatch, "feature and class-vector dimensions differ");
  const Eigen::Index n = features.rows(), d = features.cols(), classes = weights.rows();
  CheckLabels(labels, n, classes);
  if (!class_weights.empty() && static_cast<Eigen::Index>(class_weights.size()) != classes)
    throw Error(Errc::kShapeMismatch, "class weight count does not match class count");

  Eigen::MatrixXd w = weights.template cast<double>();
  Eigen::VectorXd wnorm(classes);
  for (Eigen::Index j = 0; j < classes; ++j) {
    wnorm(j) = w.row(j).norm();
    if (wnorm(j) == 0.0) throw Error(Errc::kZeroVector, "class vector " + std::to_string(j) + " is zero");
    w.row(j) /= wnorm(j);
  }

  SoftmaxLossResult<T> res;
  Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(n, d);
  Eigen::MatrixXd dw = Eigen::MatrixXd::Zero(classes, d);
  std::vector<double> logits(classes);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd x = features.row(i).template cast<double>().transpose();
    const double r = x.norm();
    if (r == 0.0) throw Error(Errc::kZeroFeature, "feature row " + std::to_string(i) + " is zero");
    const int y = labels[i];
    const Eigen::VectorXd proj = w * x;  // r cos(theta_j)
    for (Eigen::Index j = 0; j < classes; ++j) logits[j] = proj(j);
    const double c = std::clamp(proj(y) / r, -1.0, 1.0);
    const int k = MarginSegment(c, margin);
    double t_m, u_m1;
    Chebyshev(c, margin, &t_m, &u_m1);
    const double sign = (k % 2) ? -1.0 : 1.0;
    const double psi = sign * t_m - 2.0 * k;
    const double g = (1.0 - blend) * c + blend * psi;
    const double dg = (1.0 - blend) + blend * sign * margin * u_m1;
    logits[y] = r * g;

    const double sw = WeightOf(class_weights, y) / static_cast<double>(n);
    total += sw * SoftmaxRow(logits, y);
    for (Eigen::Index j = 0; j < classes; ++j) {
      const double upstream = sw * logits[j];
      if (j == y) {
        dx.row(i) += upstream * (g * x / r + dg * (w.row(y).transpose() - c * x / r)).transpose();
        dw.row(y) += upstream * dg * (x - c * r * w.row(y).transpose()).transpose() / wnorm(y);
      } else {
        dx.row(i) += upstream * w.row(j);
        dw.row(j) += upstream * (x - proj(j) * w.row(j).transpose()).transpose() / wnorm(j);
      }
    }
  }
  res.loss = total;
  res.d_features = dx.cast<T>();
  res.d_weights = dw.cast<T>();
  res.d_bias.assign(classes, T(0));
  return res;
}

template <typename T>
SoftmaxLossResult<T> SoftmaxLoss(const RowMatrix<T> &features, const RowMatrix<T> &weights,
                                 const std::vector<T> &bias, const std::vector<int> &labels,
                                 const std::vector<double> &class_weights) {
  if (features.cols() != weights.cols() ||
      static_cast<Eigen::Index>(bias.size()) != weights.rows())
    throw Error(Errc::kShapeMismatch, "softmax layer shapes disagree");
  const Eigen::Index n = features.rows(), classes = weights.rows();
  CheckLabels(labels, n, classes);
  const Eigen::MatrixXd w = weights.template cast<double>();
  Eigen::MatrixXd dlogit(n, classes);
  std::vector<double> logits(classes);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd z = w * features.row(i).template cast<double>().transpose();
    for (Eigen::Index j = 0; j < classes; ++j) logits[j] = z(j) + bias[j];
    const double sw = WeightOf(class_weights, labels[i]) / static_cast<double>(n);
    total += sw * SoftmaxRow(logits, labels[i]);
    for (Eigen::Index j = 0; j < classes; ++j) dlogit(i, j) = sw * logits[j];
  }
  SoftmaxLossResult<T> res;
  res.loss = total;
  res.d_features = (dlogit * w).cast<T>();
  const Eigen::MatrixXd dw = dlogit.transpose() * features.template cast<double>();
  res.d_weights = dw.cast<T>();
  res.d_bias.resize(classes);
  for (Eigen::Index j = 0; j < classes; ++j) res.d_bias[j] = static_cast<T>(dlogit.col(j).sum());
  return res;
}

std::vector<double> ClassWeights(const std::vector<std::size_t> &counts) {
  if (counts.empty()) throw Error(Errc::kEmptyClass, "no classes");
  std::size_t total = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) throw Error(Errc::kEmptyClass, "class " + std::to_string(i) + " has no samples");
    total += counts[i];
  }
  std::vector<double> w(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    w[i] = static_cast<double>(total) / (static_cast<double>(counts.size()) * counts[i]);
  return w;
}

template SoftmaxLossResult<float> ASoftmaxLoss(const RowMatrix<float> &, const RowMatrix<float> &,
                                               const std::vector<int> &, int, double,
                                               const std::vector<double> &);
template SoftmaxLossResult<double> ASoftmaxLoss(const RowMatrix<double> &,
                                                const RowMatrix<double> &,
                                                const std::vector<int> &, int, double,
                                                const std::vector<double> &);
template SoftmaxLossResult<float> SoftmaxLoss(const RowMatrix<float> &, const RowMatrix<float> &,
                                              const std::vector<float> &, const std::vector<int> &,
                                              const std::vector<double> &);
template SoftmaxLossResult<double> SoftmaxLoss(const RowMatrix<double> &,
                                               const RowMatrix<double> &,
                                               const std::vector<double> &,
                                               const std::vector<int> &,
                                               const std::vector<double> &);

}  // namespace srasv
