// include/srasv/backend/plda.h

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

#ifndef SRASV_BACKEND_PLDA_H_
#define SRASV_BACKEND_PLDA_H_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "srasv/backend/embedding.h"

namespace srasv {

/// Two-covariance model: x = mu + y + e, y ~ N(0, Sb), e ~ N(0, Sw).
struct PldaModel {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sb;
  Eigen::MatrixXd sw;

  int dim() const { return static_cast<int>(mu.size()); }
};

struct PldaTrainOptions {
  int iterations = 10;
  double floor_scale = 1e-6;  // eigenvalue floor = floor_scale * trace / dim
};

struct PldaTrainResult {
  PldaModel model;
  std::vector<double> log_likelihood;  // after initialisation and each iteration
  bool degenerate = false;             // no within-class scatter: Sw set to the floor
};

/// EM with mu fixed at the global mean. Needs >= 2 classes. Model values
/// are rounded to float precision so that model files round-trip exactly.
PldaTrainResult TrainPlda(const EmbeddingMatrix &x, const std::vector<int> &labels,
                          const PldaTrainOptions &opts = {});

/// Marginal log-likelihood of the labeled data under `model`.
double PldaLogLikelihood(const PldaModel &model, const EmbeddingMatrix &x,
                         const std::vector<int> &labels);

/// Closed-form same-vs-different LLR for single-vector sides.
class PldaScorer {
 public:
  explicit PldaScorer(const PldaModel &model);
  double Score(const Eigen::VectorXd &enroll, const Eigen::VectorXd &test) const;
  const PldaModel &model() const { return model_; }

 private:
  PldaModel model_;
  Eigen::MatrixXd q_;  // quadratic term shared by both sides
  Eigen::MatrixXd p_;  // cross term
  double offset_ = 0.0;
};

/// Domain adaptation: mu re-estimated on the (normalized) enrollment data.
PldaModel AdaptPlda(const PldaModel &model, const EmbeddingMatrix &enrollment);

void SavePlda(const std::string &path, const PldaModel &model);
PldaModel LoadPlda(const std::string &path);

}  // namespace srasv

#endif  // SRASV_BACKEND_PLDA_H_
