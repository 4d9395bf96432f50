// src/fusion/fusion.cc

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

#include "srasv/fusion/fusion.h"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "srasv/base/error.h"
#include "srasv/base/io.h"

namespace srasv {

namespace {

// log(1 + exp(-z)) without overflow.
double Softplus(double z) { return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z)); }

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct Problem {
  const std::vector<std::vector<double>> *systems;
  const std::vector<int> *labels;
  double pos_weight = 0.0, neg_weight = 0.0;
  double ridge = 0.0;

  double Linear(const std::vector<double> &theta, std::size_t i) const {
    double z = theta.back();
    for (std::size_t k = 0; k + 1 < theta.size(); ++k) z += theta[k] * (*systems)[k][i];
    return z;
  }

  double Objective(const std::vector<double> &theta) const {
    double ll = 0.0;
    for (std::size_t i = 0; i < labels->size(); ++i) {
      const double z = Linear(theta, i);
      ll -= (*labels)[i] ? pos_weight * Softplus(z) : neg_weight * Softplus(-z);
    }
    double sq = 0.0;
    for (std::size_t k = 0; k + 1 < theta.size(); ++k) sq += theta[k] * theta[k];
    return ll - 0.5 * ridge * sq;
  }

  std::vector<double> Gradient(const std::vector<double> &theta) const {
    std::vector<double> g(theta.size(), 0.0);
    for (std::size_t i = 0; i < labels->size(); ++i) {
      const double z = Linear(theta, i);
      const double r = (*labels)[i] ? pos_weight * (1.0 - Sigmoid(z)) : -neg_weight * Sigmoid(z);
      for (std::size_t k = 0; k + 1 < theta.size(); ++k) g[k] += r * (*systems)[k][i];
      g.back() += r;
    }
    for (std::size_t k = 0; k + 1 < theta.size(); ++k) g[k] -= ridge * theta[k];
    return g;
  }
};

void CheckAligned(const std::vector<ScoreSet> &systems) {
  if (systems.empty()) throw Error(Errc::kTrialMismatch, "no systems to fuse");
  for (const ScoreSet &s : systems) {
    if (s.size() != systems[0].size())
      throw Error(Errc::kTrialMismatch, "systems cover different trial counts");
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s.records[i].trial_id != systems[0].records[i].trial_id)
        throw Error(Errc::kTrialMismatch, "trial " + s.records[i].trial_id + " out of alignment");
  }
}

std::vector<std::vector<double>> Columns(const std::vector<ScoreSet> &systems) {
  std::vector<std::vector<double>> out;
  for (const ScoreSet &s : systems) {
    std::vector<double> col;
    for (const ScoreRecord &r : s.records) col.push_back(r.score);
    out.push_back(std::move(col));
  }
  return out;
}

}  // namespace

FusionFit FitFusion(const std::vector<std::vector<double>> &systems, const std::vector<int> &labels,
                    const FusionOptions &opts) {
  if (systems.empty()) throw Error(Errc::kTrialMismatch, "no systems to fuse");
  for (const auto &s : systems)
    if (s.size() != labels.size()) throw Error(Errc::kTrialMismatch, "score and label counts differ");
  std::size_t npos = 0;
  for (int y : labels) npos += y != 0;
  const std::size_t nneg = labels.size() - npos;
  if (npos == 0 || nneg == 0) throw Error(Errc::kOneClassOnly, "fusion needs both classes");

  Problem prob{&systems, &labels, 0.5 / npos, 0.5 / nneg, opts.ridge};
  FusionFit fit;
  std::vector<double> theta(systems.size() + 1, 0.0);
  double f = prob.Objective(theta);
  fit.objective.push_back(f);
  double step = 1.0;
  for (int it = 0; it < opts.iterations; ++it) {
    const std::vector<double> g = prob.Gradient(theta);
    double gg = 0.0;
    for (double v : g) gg += v * v;
    if (gg == 0.0) break;
    step *= 2.0;
    std::vector<double> next(theta.size());
    double fn = f;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries, step *= 0.5) {
      for (std::size_t k = 0; k < theta.size(); ++k) next[k] = theta[k] + step * g[k];
      fn = prob.Objective(next);
      if (fn >= f + 0.5 * step * gg) {  // Armijo condition
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    theta = next;
    const double gain = fn - f;
    f = fn;
    fit.objective.push_back(f);
    if (gain < opts.tolerance) break;
  }
  fit.model.weights.assign(theta.begin(), theta.end() - 1);
  fit.model.offset = theta.back();
  return fit;
}

FusionFit FitFusion(const std::vector<ScoreSet> &systems, const FusionOptions &opts) {
  CheckAligned(systems);
  bool has_nontarget = false;
  for (const ScoreRecord &r : systems[0].records) has_nontarget |= r.key == TrialKey::kNontarget;
  std::vector<std::vector<double>> cols(systems.size());
  std::vector<int> labels;
  for (std::size_t i = 0; i < systems[0].size(); ++i) {
    const auto &key = systems[0].records[i].key;
    if (!key || (*key == TrialKey::kSpoof && has_nontarget)) continue;
    labels.push_back(*key == TrialKey::kTarget || *key == TrialKey::kBonafide);
    for (std::size_t k = 0; k < systems.size(); ++k) cols[k].push_back(systems[k].records[i].score);
  }
  return FitFusion(cols, labels, opts);
}

std::vector<double> ApplyFusion(const FusionModel &model,
                                const std::vector<std::vector<double>> &systems) {
  if (systems.size() != model.weights.size())
    throw Error(Errc::kTrialMismatch, "fusion model expects " + std::to_string(model.weights.size()) +
                                          " systems, got " + std::to_string(systems.size()));
  const std::size_t n = systems.empty() ? 0 : systems[0].size();
  std::vector<double> out(n, model.offset);
  for (std::size_t k = 0; k < systems.size(); ++k) {
    if (systems[k].size() != n) throw Error(Errc::kTrialMismatch, "systems cover different trial counts");
    for (std::size_t i = 0; i < n; ++i) out[i] += model.weights[k] * systems[k][i];
  }
  return out;
}

ScoreSet ApplyFusion(const FusionModel &model, const std::vector<ScoreSet> &systems) {
  CheckAligned(systems);
  const std::vector<double> fused = ApplyFusion(model, Columns(systems));
  ScoreSet out = systems[0];
  for (std::size_t i = 0; i < fused.size(); ++i) out.records[i].score = fused[i];
  return out;
}

void SaveFusionModel(const std::string &path, const FusionModel &model) {
  std::string text;
  char line[64];
  for (double w : model.weights) {
    std::snprintf(line, sizeof(line), "%.17g\n", w);
    text += line;
  }
  std::snprintf(line, sizeof(line), "%.17g\n", model.offset);
  text += line;
  WriteFileAtomic(path, text);
}

FusionModel LoadFusionModel(const std::string &path) {
  std::istringstream in(ReadFileBytes(path));
  std::vector<double> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(line, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || line.find_first_not_of(" \t\r", used) != std::string::npos)
      throw Error(Errc::kMalformedLine, path + ":" + std::to_string(lineno) + ": not a number");
    values.push_back(v);
  }
  if (values.size() < 2) throw Error(Errc::kMalformedLine, path + ": fusion model needs >= 2 lines");
  FusionModel m;
  m.offset = values.back();
  m.weights.assign(values.begin(), values.end() - 1);
  return m;
}

}  // namespace srasv
