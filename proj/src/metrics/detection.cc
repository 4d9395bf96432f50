// src/metrics/detection.cc

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

#include "srasv/metrics/detection.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "srasv/base/error.h"

namespace srasv {

namespace {

void CheckScores(const std::vector<double> &pos, const std::vector<double> &neg) {
  if (pos.empty() || neg.empty())
    throw Error(Errc::kOneClassOnly, "rates need both positive and negative trials");
  for (const auto *v : {&pos, &neg})
    for (double s : *v)
      if (!std::isfinite(s)) throw Error(Errc::kNonFiniteScore, "non-finite score");
}

}  // namespace

std::vector<DetPoint> DetCurve(const std::vector<double> &positives,
                               const std::vector<double> &negatives) {
  CheckScores(positives, negatives);
  std::vector<double> pos = positives, neg = negatives, all;
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  std::merge(pos.begin(), pos.end(), neg.begin(), neg.end(), std::back_inserter(all));
  all.erase(std::unique(all.begin(), all.end()), all.end());
  all.push_back(std::numeric_limits<double>::infinity());
  const double np = static_cast<double>(pos.size()), nn = static_cast<double>(neg.size());
  std::vector<DetPoint> out;
  out.reserve(all.size());
  for (double t : all) {
    DetPoint p;
    p.threshold = t;
    p.false_rejects = std::lower_bound(pos.begin(), pos.end(), t) - pos.begin();
    p.false_accepts = neg.end() - std::lower_bound(neg.begin(), neg.end(), t);
    p.frr = p.false_rejects / np;
    p.far = p.false_accepts / nn;
    out.push_back(p);
  }
  return out;
}

std::vector<DetPoint> ConvexHull(const std::vector<DetPoint> &det) {
  if (det.empty()) return {};
  // Integer coordinates on the common grid (fa * Np, fr * Nn) keep the
  // orientation tests exact.
  const DetPoint &last = det.back();
  const long long np = static_cast<long long>(last.false_rejects);
  const long long nn = static_cast<long long>(det.front().false_accepts);
  auto x = [&](const DetPoint &p) { return static_cast<long long>(p.false_accepts) * np; };
  auto y = [&](const DetPoint &p) { return static_cast<long long>(p.false_rejects) * nn; };
  std::vector<DetPoint> hull;
  for (auto it = det.rbegin(); it != det.rend(); ++it) {
    while (hull.size() >= 2) {
      const DetPoint &a = hull[hull.size() - 2], &b = hull.back();
      const __int128 cross = static_cast<__int128>(x(b) - x(a)) * (y(*it) - y(a)) -
                             static_cast<__int128>(y(b) - y(a)) * (x(*it) - x(a));
      if (cross > 0) break;
      hull.pop_back();
    }
    hull.push_back(*it);
  }
  return hull;
}

EerResult EerFromDet(const std::vector<DetPoint> &det) {
  const std::vector<DetPoint> hull = ConvexHull(det);
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const DetPoint &a = hull[i];
    const double da = a.far - a.frr;
    if (da == 0.0) return {a.far, a.threshold};
    if (i + 1 == hull.size()) break;
    const DetPoint &b = hull[i + 1];
    const double db = b.far - b.frr;
    if (da < 0.0 && db > 0.0) {
      const double t = (a.frr - a.far) / ((b.far - a.far) - (b.frr - a.frr));
      const double eer = a.far + t * (b.far - a.far);
      const bool pick_a = std::abs(da) < std::abs(db) ||
                          (std::abs(da) == std::abs(db) && a.threshold < b.threshold);
      return {eer, pick_a ? a.threshold : b.threshold};
    }
  }
  throw Error(Errc::kOneClassOnly, "DET curve does not cross the diagonal");
}

EerResult Eer(const std::vector<double> &positives, const std::vector<double> &negatives) {
  return EerFromDet(DetCurve(positives, negatives));
}

std::string DetCsv(const std::vector<DetPoint> &det) {
  std::string out = "threshold,far,frr\n";
  char line[96];
  for (const DetPoint &p : det) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", p.threshold, p.far, p.frr);
    out += line;
  }
  return out;
}

}  // namespace srasv
