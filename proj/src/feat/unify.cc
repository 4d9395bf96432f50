// src/feat/unify.cc

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

#include "srasv/feat/unify.h"

#include <cmath>
#include <stdexcept>

#include "srasv/base/error.h"

namespace srasv {

const char *FeatureKindName(FeatureKind kind) {
  return kind == FeatureKind::kCqt ? "cqt" : "llfb";
}

FeatureKind ParseFeatureKind(const std::string &name) {
  if (name == "cqt") return FeatureKind::kCqt;
  if (name == "llfb") return FeatureKind::kLlfb;
  throw Error(Errc::kBadConfig, "unknown feature kind '" + name + "'");
}

UnifiedFeature Unify(const FeatureMatrix &tfr, FeatureKind kind,
                     int target_frames) {
  if (tfr.cols() == 0 || tfr.rows() == 0)
    throw Error(Errc::kEmptyInput, "cannot unify an empty time-frequency matrix");
  if (target_frames < 1) throw Error(Errc::kBadConfig, "target_frames must be positive");
  UnifiedFeature out;
  out.kind = kind;
  out.matrix.resize(tfr.rows(), target_frames);
  const Eigen::Index t = tfr.cols();
  for (Eigen::Index j = 0; j < target_frames; ++j)
    out.matrix.col(j) = tfr.col(j % t);
  return out;
}

void NormalizeMeanVariance(FeatureMatrix *matrix) {
  const double n = static_cast<double>(matrix->size());
  if (n == 0) return;
  double mean = 0.0;
  for (Eigen::Index i = 0; i < matrix->size(); ++i) mean += matrix->data()[i];
  mean /= n;
  double var = 0.0;
  for (Eigen::Index i = 0; i < matrix->size(); ++i) {
    const double d = matrix->data()[i] - mean;
    var += d * d;
  }
  var /= n;
  const double inv = var > 1e-20 ? 1.0 / std::sqrt(var) : 0.0;
  for (Eigen::Index i = 0; i < matrix->size(); ++i)
    matrix->data()[i] = static_cast<float>((matrix->data()[i] - mean) * inv);
}

}  // namespace srasv
