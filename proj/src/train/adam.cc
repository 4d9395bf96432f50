// src/train/adam.cc

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

#include "srasv/train/adam.h"

#include <cmath>

namespace srasv {

void AdamConfig::Validate() const {
  if (!(alpha > 0.0)) throw Error(Errc::kBadConfig, "adam alpha must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0))
    throw Error(Errc::kBadConfig, "adam betas must lie in (0, 1)");
  if (!(eps > 0.0)) throw Error(Errc::kBadConfig, "adam eps must be positive");
}

template <typename T>
void AdamStep(std::vector<Param<T>> *params, const Gradients<T> &grads, AdamState *state,
              const AdamConfig &cfg) {
  if (grads.size() != params->size())
    throw Error(Errc::kShapeMismatch, "gradient list does not match parameter list");
  if (state->m.empty()) {
    state->m.resize(params->size());
    state->v.resize(params->size());
    for (std::size_t i = 0; i < params->size(); ++i) {
      state->m[i].assign((*params)[i].value.size(), 0.0);
      state->v[i].assign((*params)[i].value.size(), 0.0);
    }
  }
  if (state->m.size() != params->size())
    throw Error(Errc::kShapeMismatch, "optimizer state does not match parameter list");
  ++state->t;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state->t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state->t));
  for (std::size_t i = 0; i < params->size(); ++i) {
    Param<T> &p = (*params)[i];
    if (!p.Trainable()) continue;
    const AlignedVector<T> &g = grads[i];
    std::vector<double> &m = state->m[i];
    std::vector<double> &v = state->v[i];
    if (g.size() != p.value.size() || m.size() != p.value.size())
      throw Error(Errc::kShapeMismatch, "gradient shape mismatch for " + p.name);
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double gj = g[j];
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * gj;
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * gj * gj;
      const double step = cfg.alpha * (m[j] / c1) / (std::sqrt(v[j] / c2) + cfg.eps);
      p.value[j] = static_cast<T>(p.value[j] - step);
    }
  }
}

template <typename T>
double ClipGradientNorm(Gradients<T> *grads, double max_norm) {
  double sq = 0.0;
  for (const auto &g : *grads)
    for (T v : g) sq += static_cast<double>(v) * v;
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const T scale = static_cast<T>(max_norm / norm);
    for (auto &g : *grads)
      for (T &v : g) v *= scale;
  }
  return norm;
}

template void AdamStep(std::vector<Param<float>> *, const Gradients<float> &, AdamState *,
                       const AdamConfig &);
template void AdamStep(std::vector<Param<double>> *, const Gradients<double> &, AdamState *,
                       const AdamConfig &);
template double ClipGradientNorm(Gradients<float> *, double);
template double ClipGradientNorm(Gradients<double> *, double);

}  // namespace srasv
