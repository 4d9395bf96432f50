// src/backend/snorm.cc

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

#include "srasv/backend/snorm.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "srasv/base/error.h"

namespace srasv {

CohortStats TopKStats(std::vector<double> scores, int top_k) {
  if (top_k < 2 || static_cast<std::size_t>(top_k) > scores.size())
    throw Error(Errc::kCohortTooSmall, "cohort of " + std::to_string(scores.size()) +
                                           " scores cannot supply top_k = " + std::to_string(top_k));
  std::partial_sort(scores.begin(), scores.begin() + top_k, scores.end(), std::greater<double>());
  double mean = 0.0;
  for (int i = 0; i < top_k; ++i) mean += scores[i];
  mean /= top_k;
  double var = 0.0;
  for (int i = 0; i < top_k; ++i) var += (scores[i] - mean) * (scores[i] - mean);
  var /= top_k;
  if (!(var > 0.0)) throw Error(Errc::kZeroVariance, "cohort scores have zero variance");
  return {mean, std::sqrt(var)};
}

double AdaptiveSNorm(double raw, const CohortStats &enroll, const CohortStats &test) {
  if (!(enroll.stddev > 0.0) || !(test.stddev > 0.0))
    throw Error(Errc::kZeroVariance, "cohort standard deviation must be positive");
  return 0.5 * ((raw - enroll.mean) / enroll.stddev + (raw - test.mean) / test.stddev);
}

double AdaptiveSNorm(double raw, const std::vector<double> &enroll_cohort,
                     const std::vector<double> &test_cohort, int top_k) {
  return AdaptiveSNorm(raw, TopKStats(enroll_cohort, top_k), TopKStats(test_cohort, top_k));
}

int DefaultTopK(std::size_t cohort_size) {
  return static_cast<int>(std::min<std::size_t>(200, cohort_size));
}

}  // namespace srasv
