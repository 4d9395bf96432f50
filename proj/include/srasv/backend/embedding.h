// include/srasv/backend/embedding.h

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

#ifndef SRASV_BACKEND_EMBEDDING_H_
#define SRASV_BACKEND_EMBEDDING_H_

#include <vector>

#include <Eigen/Core>

#include "srasv/feat/feature-types.h"
#include "srasv/net/network.h"

namespace srasv {

/// Rows are embeddings.
using EmbeddingMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Eval-mode ASV embeddings (last hidden ASV activation) of every feature
/// matrix, computed in batches.
EmbeddingMatrix ExtractEmbeddings(const MtlNetwork<float> &net,
                                  const std::vector<const FeatureMatrix *> &features,
                                  int batch_size = 16);
EmbeddingMatrix ExtractEmbeddings(const MtlNetwork<float> &net,
                                  const std::vector<FeatureMatrix> &features,
                                  int batch_size = 16);

Eigen::VectorXd MeanEmbedding(const EmbeddingMatrix &e);

/// e' = (e - mu) / |e - mu| row-wise. Throws kZeroVector.
EmbeddingMatrix CenterLengthNorm(const EmbeddingMatrix &e, const Eigen::VectorXd &mu);
Eigen::VectorXd LengthNormalize(const Eigen::VectorXd &v);

/// Multi-utterance enrollment: mean of normalized rows, renormalized.
Eigen::VectorXd PoolEnrollment(const EmbeddingMatrix &normalized_rows);

}  // namespace srasv

#endif  // SRASV_BACKEND_EMBEDDING_H_
