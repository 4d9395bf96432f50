// include/srasv/backend/snorm.h

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

#ifndef SRASV_BACKEND_SNORM_H_
#define SRASV_BACKEND_SNORM_H_

#include <vector>

namespace srasv {

struct CohortStats {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Mean and population standard deviation of the `top_k` highest scores.
/// Throws kCohortTooSmall unless size >= top_k >= 2, kZeroVariance if the
/// selected scores are all equal.
CohortStats TopKStats(std::vector<double> scores, int top_k);

/// s' = 0.5 * [(s - mu_e) / sigma_e + (s - mu_t) / sigma_t].
double AdaptiveSNorm(double raw, const CohortStats &enroll, const CohortStats &test);
double AdaptiveSNorm(double raw, const std::vector<double> &enroll_cohort,
                     const std::vector<double> &test_cohort, int top_k);

/// min(200, cohort size).
int DefaultTopK(std::size_t cohort_size);

}  // namespace srasv

#endif  // SRASV_BACKEND_SNORM_H_
