// include/srasv/loss/a-softmax.h

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

#ifndef SRASV_LOSS_A_SOFTMAX_H_
#define SRASV_LOSS_A_SOFTMAX_H_

#include <vector>

#include "srasv/net/tensor.h"

namespace srasv {

/// psi(theta) = (-1)^k cos(m theta) - 2k on [k pi/m, (k+1) pi/m].
double Psi(double theta, int m);

template <typename T>
struct SoftmaxLossResult {
  double loss = 0.0;
  RowMatrix<T> d_features;  // N x D
  RowMatrix<T> d_weights;   // C x D
  std::vector<T> d_bias;    // C, plain softmax only
};

/// Angular-margin softmax on features x_i (rows) and class vectors w_j
/// (rows of `weights`). Class vectors are normalized and bias is zero; the
/// target logit is |x| ((1 - blend) cos + blend psi). Per-sample losses are
/// scaled by `class_weights[y]` (all ones when empty) and averaged over N.
template <typename T>
SoftmaxLossResult<T> ASoftmaxLoss(const RowMatrix<T> &features, const RowMatrix<T> &weights,
                                  const std::vector<int> &labels, int margin,
                                  double blend = 1.0,
                                  const std::vector<double> &class_weights = {});

/// Affine softmax cross-entropy, logits = x W^T + b.
template <typename T>
SoftmaxLossResult<T> SoftmaxLoss(const RowMatrix<T> &features, const RowMatrix<T> &weights,
                                 const std::vector<T> &bias, const std::vector<int> &labels,
                                 const std::vector<double> &class_weights = {});

/// w_c = N / (C count_c), so that sum_c w_c count_c = N.
std::vector<double> ClassWeights(const std::vector<std::size_t> &counts);

}  // namespace srasv

#endif  // SRASV_LOSS_A_SOFTMAX_H_
