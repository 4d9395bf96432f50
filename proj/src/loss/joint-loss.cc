// src/loss/joint-loss.cc

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

#include "srasv/loss/joint-loss.h"

#include <algorithm>

#include "srasv/loss/a-softmax.h"

namespace srasv {

LossConfig LossConfig::FromConfig(const KvConfig &cfg) {
  LossConfig c;
  c.margin_m = static_cast<int>(cfg.GetInt("loss.margin", c.margin_m));
  c.lambda_reg = cfg.GetDouble("loss.lambda", c.lambda_reg);
  c.sd_task_weight = cfg.GetDouble("loss.sd_weight", c.sd_task_weight);
  c.asv_task_weight = cfg.GetDouble("loss.asv_weight", c.asv_task_weight);
  c.margin_warmup_epochs = static_cast<int>(cfg.GetInt("loss.margin_warmup", c.margin_warmup_epochs));
  c.margin_blend_max = cfg.GetDouble("loss.margin_blend", c.margin_blend_max);
  if (c.margin_blend_max < 0.0 || c.margin_blend_max > 1.0)
    throw Error(Errc::kBadConfig, "loss.margin_blend must lie in [0, 1]");
  if (c.margin_m < 1) throw Error(Errc::kBadMargin, "loss.margin must be >= 1");
  if (c.lambda_reg < 0.0) throw Error(Errc::kBadConfig, "loss.lambda must be >= 0");
  return c;
}

double LossConfig::MarginBlend(int epoch) const {
  if (margin_warmup_epochs <= 0) return margin_blend_max;
  return margin_blend_max * std::min(1.0, static_cast<double>(epoch + 1) / margin_warmup_epochs);
}

template <typename T>
bool IsPenalized(const MtlNetwork<T> &net, std::size_t index) {
  const Param<T> &p = net.params()[index];
  if (!p.Regularized()) return false;
  const NetConfig &c = net.config();
  if (!c.sd_enabled && p.name.rfind("sd.", 0) == 0) return false;
  if (!c.asv_enabled && p.name.rfind("asv.", 0) == 0) return false;
  return true;
}

template <typename T>
double PenalizedSquaredNorm(const MtlNetwork<T> &net) {
  double sum = 0.0;
  for (std::size_t i = 0; i < net.params().size(); ++i)
    if (IsPenalized(net, i))
      for (T v : net.params()[i].value) sum += static_cast<double>(v) * v;
  return sum;
}

template <typename T>
void AddRegularizationGradient(const MtlNetwork<T> &net, double lambda, Gradients<T> *grads) {
  if (lambda == 0.0) return;
  const T l = static_cast<T>(lambda);
  for (std::size_t i = 0; i < net.params().size(); ++i) {
    if (!IsPenalized(net, i)) continue;
    const AlignedVector<T> &v = net.params()[i].value;
    AlignedVector<T> &g = (*grads)[i];
    for (std::size_t j = 0; j < v.size(); ++j) g[j] += l * v[j];
  }
}

namespace {

template <typename T>
RowMatrix<T> OutputWeights(const MtlNetwork<T> &net, int index) {
  const Param<T> &p = net.params()[index];
  return Eigen::Map<const RowMatrix<T>>(p.value.data(), p.shape[0], p.shape[1]);
}

template <typename T>
SoftmaxLossResult<T> HeadLoss(const MtlNetwork<T> &net, const RowMatrix<T> &features,
                              int weight, int bias, bool normalized,
                              const std::vector<int> &labels, int margin, double blend,
                              const std::vector<double> &class_weights) {
  if (normalized)
    return ASoftmaxLoss(features, OutputWeights(net, weight), labels, margin, blend,
                        class_weights);
  const AlignedVector<T> &b = net.params()[bias].value;
  return SoftmaxLoss(features, OutputWeights(net, weight), std::vector<T>(b.begin(), b.end()),
                     labels, class_weights);
}

template <typename T>
void Scale(SoftmaxLossResult<T> *r, double a) {
  r->loss *= a;
  r->d_features *= static_cast<T>(a);
  r->d_weights *= static_cast<T>(a);
  for (T &v : r->d_bias) v *= static_cast<T>(a);
}

}  // namespace

template <typename T>
JointLossValue<T> JointLoss(const MtlNetwork<T> &net, const ForwardOutput<T> &out,
                            const BatchLabels &labels, const LossConfig &cfg,
                            double margin_blend) {
  const NetConfig &nc = net.config();
  JointLossValue<T> v;
  if (nc.sd_enabled && cfg.sd_task_weight != 0.0) {
    SoftmaxLossResult<T> r =
        HeadLoss(net, out.sd_features, net.sd_output_weight(), net.sd_output_bias(),
                 nc.sd_normalized_output, labels.sd, cfg.margin_m, margin_blend,
                 cfg.sd_class_weights);
    Scale(&r, cfg.sd_task_weight);
    v.sd = r.loss;
    v.upstream.d_sd_features = std::move(r.d_features);
    v.upstream.d_sd_out_weight = std::move(r.d_weights);
    v.upstream.d_sd_out_bias = std::move(r.d_bias);
  }
  if (nc.asv_enabled && cfg.asv_task_weight != 0.0) {
    SoftmaxLossResult<T> r =
        HeadLoss(net, out.asv_features, net.asv_output_weight(), net.asv_output_bias(),
                 nc.asv_normalized_output, labels.asv, cfg.margin_m, margin_blend,
                 cfg.asv_class_weights);
    Scale(&r, cfg.asv_task_weight);
    v.asv = r.loss;
    v.upstream.d_asv_features = std::move(r.d_features);
    v.upstream.d_asv_out_weight = std::move(r.d_weights);
    v.upstream.d_asv_out_bias = std::move(r.d_bias);
  }
  v.reg = 0.5 * cfg.lambda_reg * PenalizedSquaredNorm(net);
  v.total = v.sd + v.asv + v.reg;
  return v;
}

#define SRASV_INSTANTIATE(T)                                                                 \
  template bool IsPenalized(const MtlNetwork<T> &, std::size_t);                             \
  template double PenalizedSquaredNorm(const MtlNetwork<T> &);                               \
  template void AddRegularizationGradient(const MtlNetwork<T> &, double, Gradients<T> *);    \
  template JointLossValue<T> JointLoss(const MtlNetwork<T> &, const ForwardOutput<T> &,      \
                                       const BatchLabels &, const LossConfig &, double);
SRASV_INSTANTIATE(float)
SRASV_INSTANTIATE(double)
#undef SRASV_INSTANTIATE

}  // namespace srasv
