// tests/support/metric-oracles.h

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

#ifndef SRASV_TESTS_METRIC_ORACLES_H_
#define SRASV_TESTS_METRIC_ORACLES_H_

// Exhaustive reference implementations used to check the metrics module.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace srasv::testing {

struct SweepPoint {
  double threshold, far, frr;
};

inline std::vector<SweepPoint> BruteForceSweep(const std::vector<double> &pos,
                                               const std::vector<double> &neg) {
  std::vector<double> t = pos;
  t.insert(t.end(), neg.begin(), neg.end());
  t.push_back(-std::numeric_limits<double>::infinity());
  t.push_back(std::numeric_limits<double>::infinity());
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  std::vector<SweepPoint> out;
  for (double thr : t) {
    std::size_t miss = 0, fa = 0;
    for (double s : pos) miss += s < thr;
    for (double s : neg) fa += s >= thr;
    out.push_back({thr, static_cast<double>(fa) / neg.size(), static_cast<double>(miss) / pos.size()});
  }
  return out;
}

/// Smallest v with (v, v) in the convex hull of the sweep points: every
/// point on the diagonal and every pair whose segment crosses it.
inline double BruteForceEer(const std::vector<double> &pos, const std::vector<double> &neg) {
  const std::vector<SweepPoint> pts = BruteForceSweep(pos, neg);
  double best = 1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double di = pts[i].far - pts[i].frr;
    if (di == 0.0) best = std::min(best, pts[i].far);
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const double dj = pts[j].far - pts[j].frr;
      if (!(di < 0.0 && dj > 0.0)) continue;
      const double t = (pts[i].frr - pts[i].far) /
                       ((pts[j].far - pts[i].far) - (pts[j].frr - pts[i].frr));
      best = std::min(best, pts[i].far + t * (pts[j].far - pts[i].far));
    }
  }
  return best;
}

inline double BruteForceMinTdcf(const std::vector<double> &bona, const std::vector<double> &spoof,
                                double c1, double c2) {
  double best = std::numeric_limits<double>::infinity();
  for (const SweepPoint &p : BruteForceSweep(bona, spoof))
    best = std::min(best, (c1 / c2) * p.frr + p.far);
  return best;
}

struct RandomScores {
  std::vector<double> pos, neg;
};

/// 1000-trial sets with a random class split, separation and optional ties.
inline RandomScores MakeRandomScores(std::uint64_t seed, int n = 1000) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> split(50, n - 50);
  std::uniform_real_distribution<double> shift(-0.5, 3.0);
  std::normal_distribution<double> g(0.0, 1.0);
  const int npos = split(rng);
  const double d = shift(rng);
  const bool ties = seed % 3 == 0;
  RandomScores r;
  for (int i = 0; i < n; ++i) {
    double s = g(rng) + (i < npos ? d : 0.0);
    if (ties) s = std::round(s * 4.0) / 4.0;
    (i < npos ? r.pos : r.neg).push_back(s);
  }
  return r;
}

}  // namespace srasv::testing

#endif  // SRASV_TESTS_METRIC_ORACLES_H_
