// include/srasv/loss/joint-loss.h

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

#ifndef SRASV_LOSS_JOINT_LOSS_H_
#define SRASV_LOSS_JOINT_LOSS_H_

#include <vector>

#include "srasv/base/kv-config.h"
#include "srasv/net/network.h"

namespace srasv {

struct LossConfig {
  int margin_m = 4;
  double lambda_reg = 0.001;
  double sd_task_weight = 1.0;
  double asv_task_weight = 1.0;
  std::vector<double> sd_class_weights;   // empty: uniform
  std::vector<double> asv_class_weights;  // empty: uniform
  int margin_warmup_epochs = 5;           // psi blend ramps up over these
  // Final weight of psi in the target logit; 1/6 matches the usual
  // (lambda cos + psi) / (1 + lambda) annealing floor of lambda = 5.
  double margin_blend_max = 1.0 / 6.0;

  /// loss.margin, loss.lambda, loss.sd_weight, loss.asv_weight,
  /// loss.margin_warmup, loss.margin_blend. Class weights are derived from the data.
  static LossConfig FromConfig(const KvConfig &cfg);
  /// Weight of psi in the target logit during 0-based `epoch`.
  double MarginBlend(int epoch) const;
};

struct BatchLabels {
  std::vector<int> sd;   // 0 bonafide, 1 spoof
  std::vector<int> asv;  // speaker index
};

template <typename T>
struct JointLossValue {
  double total = 0.0;
  double sd = 0.0;
  double asv = 0.0;
  double reg = 0.0;  // (lambda / 2) sum |W|^2
  HeadUpstream<T> upstream;
};

/// L = a_sd L_SD + a_asv L_ASV + (lambda / 2) sum |W|^2 over the weight
/// matrices of the enabled parts of the network. Disabled heads contribute
/// neither loss nor penalty.
template <typename T>
JointLossValue<T> JointLoss(const MtlNetwork<T> &net, const ForwardOutput<T> &out,
                            const BatchLabels &labels, const LossConfig &cfg,
                            double margin_blend = 1.0);

/// Adds lambda * W to the gradient of every penalized weight.
template <typename T>
void AddRegularizationGradient(const MtlNetwork<T> &net, double lambda, Gradients<T> *grads);

/// Sum of squared entries of the penalized weights.
template <typename T>
double PenalizedSquaredNorm(const MtlNetwork<T> &net);

/// Whether parameter `index` is in the penalized set.
template <typename T>
bool IsPenalized(const MtlNetwork<T> &net, std::size_t index);

inline double CombineJointLoss(double sd, double asv, double squared_norm, double lambda) {
  return sd + asv + 0.5 * lambda * squared_norm;
}

}  // namespace srasv

#endif  // SRASV_LOSS_JOINT_LOSS_H_
