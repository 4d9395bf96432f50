// include/srasv/train/adam.h

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

#ifndef SRASV_TRAIN_ADAM_H_
#define SRASV_TRAIN_ADAM_H_

#include <cstdint>
#include <vector>

#include "srasv/net/network.h"

namespace srasv {

struct AdamConfig {
  double alpha = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void Validate() const;
};

struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::int64_t t = 0;
};

/// One bias-corrected Adam update of every trainable parameter. Moments are
/// kept in double; the state is sized on first use.
template <typename T>
void AdamStep(std::vector<Param<T>> *params, const Gradients<T> &grads, AdamState *state,
              const AdamConfig &cfg);

/// Scales `grads` in place so that their global L2 norm is at most
/// `max_norm` (no-op when max_norm <= 0). Returns the norm before clipping.
template <typename T>
double ClipGradientNorm(Gradients<T> *grads, double max_norm);

}  // namespace srasv

#endif  // SRASV_TRAIN_ADAM_H_
