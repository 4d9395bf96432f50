// src/backend/embedding.cc

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

#include "srasv/backend/embedding.h"

#include <algorithm>

#include "srasv/base/error.h"

namespace srasv {

EmbeddingMatrix ExtractEmbeddings(const MtlNetwork<float> &net,
                                  const std::vector<const FeatureMatrix *> &features,
                                  int batch_size) {
  const NetConfig &cfg = net.config();
  if (!cfg.asv_enabled) throw Error(Errc::kShapeMismatch, "network has no speaker head");
  EmbeddingMatrix out(features.size(), cfg.EmbeddingDim());
  const int rows = cfg.input_rows, cols = cfg.input_cols;
  const std::size_t plane = static_cast<std::size_t>(rows) * cols;
  for (std::size_t start = 0; start < features.size(); start += batch_size) {
    const std::size_t n = std::min<std::size_t>(batch_size, features.size() - start);
    Tensor<float> x({static_cast<int>(n), 1, rows, cols});
    for (std::size_t i = 0; i < n; ++i) {
      const FeatureMatrix &m = *features[start + i];
      if (m.rows() != rows || m.cols() != cols)
        throw Error(Errc::kShapeMismatch, "feature geometry does not match the network");
      std::copy(m.data(), m.data() + plane, x.ptr() + i * plane);
    }
    const ForwardOutput<float> fwd = net.Forward(x, Mode::kEval);
    out.middleRows(start, n) = fwd.embedding.cast<double>();
  }
  return out;
}

EmbeddingMatrix ExtractEmbeddings(const MtlNetwork<float> &net,
                                  const std::vector<FeatureMatrix> &features, int batch_size) {
  std::vector<const FeatureMatrix *> ptrs;
  for (const FeatureMatrix &m : features) ptrs.push_back(&m);
  return ExtractEmbeddings(net, ptrs, batch_size);
}

Eigen::VectorXd MeanEmbedding(const EmbeddingMatrix &e) {
  if (e.rows() == 0) throw Error(Errc::kEmptyDataset, "no embeddings");
  return e.colwise().mean().transpose();
}

Eigen::VectorXd LengthNormalize(const Eigen::VectorXd &v) {
  const double n = v.norm();
  if (n == 0.0) throw Error(Errc::kZeroVector, "cannot length-normalize a zero vector");
  return v / n;
}

EmbeddingMatrix CenterLengthNorm(const EmbeddingMatrix &e, const Eigen::VectorXd &mu) {
  if (e.cols() != mu.size()) throw Error(Errc::kDimensionMismatch, "mean dimension differs");
  EmbeddingMatrix out(e.rows(), e.cols());
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    out.row(i) = LengthNormalize(e.row(i).transpose() - mu).transpose();
  return out;
}

Eigen::VectorXd PoolEnrollment(const EmbeddingMatrix &normalized_rows) {
  return LengthNormalize(MeanEmbedding(normalized_rows));
}

}  // namespace srasv
