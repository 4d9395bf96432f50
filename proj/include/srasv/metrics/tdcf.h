// include/srasv/metrics/tdcf.h

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

#ifndef SRASV_METRICS_TDCF_H_
#define SRASV_METRICS_TDCF_H_

#include <string>
#include <vector>

#include "srasv/metrics/score-set.h"

namespace srasv {

struct TdcfParams {
  double pi_tar = 0.9405;
  double pi_non = 0.0095;
  double pi_spoof = 0.05;
  double c_miss_sd = 1.0;
  double c_fa_sd = 10.0;
  double c_miss_asv = 1.0;
  double c_fa_asv = 10.0;

  /// Throws kBadConfig unless priors sum to 1 and all costs are positive.
  void Validate() const;
};

struct AsvOperatingPoint {
  double threshold = 0.0;
  double p_miss = 0.0;
  double p_fa = 0.0;
  double p_miss_spoof = 0.0;
};

/// Threshold at the target/nontarget EER point; spoofs scoring below it count
/// as missed spoofs (0 when there are none). Throws kOneClassOnly.
AsvOperatingPoint ComputeAsvOperatingPoint(const std::vector<double> &target,
                                           const std::vector<double> &nontarget,
                                           const std::vector<double> &spoof);

struct TdcfConstants {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Throws kNonpositiveC2. Warns when C1 < 0.
TdcfConstants ComputeTdcfConstants(const TdcfParams &p, const AsvOperatingPoint &op);

struct TdcfCurvePoint {
  double threshold = 0.0;  // -inf: accept all, +inf: reject all
  double value = 0.0;
};

struct MinTdcfResult {
  double min_value = 0.0;
  double threshold = 0.0;
  std::vector<TdcfCurvePoint> curve;
};

/// t-DCF_norm(s) = (C1 / C2) * Pmiss_sd(s) + Pfa_sd(s) over all distinct SD
/// scores plus both sentinels. Throws kOneClassOnly, kNonpositiveC2.
MinTdcfResult MinTdcfNorm(const std::vector<double> &bonafide, const std::vector<double> &spoof,
                          double c1, double c2);

struct AttackRow {
  std::string attack;
  double sd_eer = 0.0;
  double min_tdcf = 0.0;
};

struct TandemReport {
  double sd_eer = 0.0;
  double asv_eer = 0.0;
  AsvOperatingPoint asv;
  TdcfConstants constants;
  double min_tdcf = 0.0;
  double min_tdcf_threshold = 0.0;
  std::vector<AttackRow> attacks;
};

/// Per attack: all bona fide SD trials pooled with that attack's spoofs. The
/// ASV spoof miss rate uses the ASV spoof trials of the same attack when the
/// ASV scores carry attack ids, the pooled spoof trials otherwise.
/// Throws kUnknownAttackLabel for spoof trials without an attack id.
std::vector<AttackRow> PerAttackReport(const ScoreSet &sd, const ScoreSet &asv,
                                       const TdcfParams &params);

/// Pooled SD/ASV metrics plus the per-attack table.
TandemReport EvaluateTandem(const ScoreSet &sd, const ScoreSet &asv, const TdcfParams &params);

std::string TandemReportCsv(const TandemReport &r);
std::string TandemReportText(const TandemReport &r);

}  // namespace srasv

#endif  // SRASV_METRICS_TDCF_H_
