// include/srasv/metrics/detection.h

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

#ifndef SRASV_METRICS_DETECTION_H_
#define SRASV_METRICS_DETECTION_H_

#include <string>
#include <vector>

namespace srasv {

// Trials are accepted when score >= threshold. "Positives" are the class that
// should be accepted (targets, bona fide speech).

struct DetPoint {
  double threshold = 0.0;  // +inf for the reject-all point
  double far = 0.0;        // negatives accepted
  double frr = 0.0;        // positives rejected
  std::size_t false_accepts = 0;
  std::size_t false_rejects = 0;
};

/// Operating points at every distinct score plus the reject-all point, in
/// increasing threshold order (FAR non-increasing, FRR non-decreasing).
/// Throws kOneClassOnly or kNonFiniteScore.
std::vector<DetPoint> DetCurve(const std::vector<double> &positives,
                               const std::vector<double> &negatives);

/// Vertices of the lower convex hull of the DET points (ROC convex hull),
/// ordered by increasing FAR.
std::vector<DetPoint> ConvexHull(const std::vector<DetPoint> &det);

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;  // threshold of the hull vertex nearest the crossing
};

/// Equal error rate where the ROC convex hull crosses FAR = FRR.
EerResult Eer(const std::vector<double> &positives, const std::vector<double> &negatives);
EerResult EerFromDet(const std::vector<DetPoint> &det);

/// DET points as CSV "threshold,far,frr".
std::string DetCsv(const std::vector<DetPoint> &det);

}  // namespace srasv

#endif  // SRASV_METRICS_DETECTION_H_
