// include/srasv/fusion/fusion.h

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

#ifndef SRASV_FUSION_FUSION_H_
#define SRASV_FUSION_FUSION_H_

#include <string>
#include <vector>

#include "srasv/metrics/score-set.h"

namespace srasv {

/// fused = w . s + b.
struct FusionModel {
  std::vector<double> weights;
  double offset = 0.0;
};

struct FusionOptions {
  int iterations = 500;
  double ridge = 1e-4;
  double tolerance = 1e-9;  // stop when the objective gain falls below this
};

struct FusionFit {
  FusionModel model;
  std::vector<double> objective;  // from the zero initialisation onwards
};

/// Full-batch gradient ascent with backtracking on the class-balanced
/// logistic log-likelihood minus ridge/2 |w|^2. `systems[k][i]` is the
/// score of system k on trial i. Throws kTrialMismatch, kOneClassOnly.
FusionFit FitFusion(const std::vector<std::vector<double>> &systems, const std::vector<int> &labels,
                    const FusionOptions &opts = {});

/// Trials must match by id and order. Positives are target/bona fide
/// trials; negatives are nontargets, or spoofs in a set without nontargets.
FusionFit FitFusion(const std::vector<ScoreSet> &systems, const FusionOptions &opts = {});

std::vector<double> ApplyFusion(const FusionModel &model,
                                const std::vector<std::vector<double>> &systems);
/// Keys and attack ids are taken from the first set.
ScoreSet ApplyFusion(const FusionModel &model, const std::vector<ScoreSet> &systems);

/// One weight per line, offset last.
void SaveFusionModel(const std::string &path, const FusionModel &model);
FusionModel LoadFusionModel(const std::string &path);

}  // namespace srasv

#endif  // SRASV_FUSION_FUSION_H_
