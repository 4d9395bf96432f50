// src/metrics/tdcf.cc

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

#include "srasv/metrics/tdcf.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "srasv/base/error.h"
#include "srasv/base/log.h"
#include "srasv/metrics/detection.h"

namespace srasv {

namespace {

double FractionBelow(const std::vector<double> &v, double t) {
  if (v.empty()) return 0.0;
  return static_cast<double>(std::count_if(v.begin(), v.end(), [t](double s) { return s < t; })) /
         v.size();
}

double FractionAtOrAbove(const std::vector<double> &v, double t) {
  if (v.empty()) return 0.0;
  return static_cast<double>(std::count_if(v.begin(), v.end(), [t](double s) { return s >= t; })) /
         v.size();
}

void CheckAttackLabels(const ScoreSet &s) {
  for (const ScoreRecord &r : s.records)
    if (r.key == TrialKey::kSpoof && (r.attack.empty() || r.attack == "-"))
      throw Error(Errc::kUnknownAttackLabel, "spoof trial " + r.trial_id + " has no attack id");
}

bool HasAttackIds(const ScoreSet &asv) {
  for (const ScoreRecord &r : asv.records)
    if (r.key == TrialKey::kSpoof && !r.attack.empty() && r.attack != "-") return true;
  return false;
}

}  // namespace

void TdcfParams::Validate() const {
  if (std::abs(pi_tar + pi_non + pi_spoof - 1.0) > 1e-12)
    throw Error(Errc::kBadConfig, "t-DCF priors must sum to 1");
  if (!(c_miss_sd > 0 && c_fa_sd > 0 && c_miss_asv > 0 && c_fa_asv > 0))
    throw Error(Errc::kBadConfig, "t-DCF costs must be positive");
  if (pi_tar < 0 || pi_non < 0 || pi_spoof < 0) throw Error(Errc::kBadConfig, "negative prior");
}

AsvOperatingPoint ComputeAsvOperatingPoint(const std::vector<double> &target,
                                           const std::vector<double> &nontarget,
                                           const std::vector<double> &spoof) {
  const EerResult e = Eer(target, nontarget);
  AsvOperatingPoint op;
  op.threshold = e.threshold;
  op.p_miss = FractionBelow(target, op.threshold);
  op.p_fa = FractionAtOrAbove(nontarget, op.threshold);
  op.p_miss_spoof = FractionBelow(spoof, op.threshold);
  return op;
}

TdcfConstants ComputeTdcfConstants(const TdcfParams &p, const AsvOperatingPoint &op) {
  p.Validate();
  TdcfConstants c;
  c.c0 = p.pi_tar * p.c_miss_asv * op.p_miss + p.pi_non * p.c_fa_asv * op.p_fa;
  c.c1 = p.pi_tar * p.c_miss_sd - c.c0;
  c.c2 = p.c_fa_sd * p.pi_spoof * (1.0 - op.p_miss_spoof);
  if (!(c.c2 > 0.0))
    throw Error(Errc::kNonpositiveC2, "C2 <= 0: the ASV system rejects every spoof; t-DCF undefined");
  if (c.c1 < 0.0) SRASV_WARN("C1 < 0 (ASV worse than the reject-all countermeasure)");
  return c;
}

MinTdcfResult MinTdcfNorm(const std::vector<double> &bonafide, const std::vector<double> &spoof,
                          double c1, double c2) {
  if (!(c2 > 0.0)) throw Error(Errc::kNonpositiveC2, "C2 must be positive");
  const std::vector<DetPoint> det = DetCurve(bonafide, spoof);
  const double ratio = c1 / c2;
  MinTdcfResult r;
  r.curve.reserve(det.size() + 1);
  r.curve.push_back({-std::numeric_limits<double>::infinity(), 1.0});
  for (const DetPoint &p : det) r.curve.push_back({p.threshold, ratio * p.frr + p.far});
  r.min_value = r.curve.front().value;
  r.threshold = r.curve.front().threshold;
  for (const TdcfCurvePoint &p : r.curve) {
    if (p.value < r.min_value) {
      r.min_value = p.value;
      r.threshold = p.threshold;
    }
  }
  return r;
}

std::vector<AttackRow> PerAttackReport(const ScoreSet &sd, const ScoreSet &asv,
                                       const TdcfParams &params) {
  CheckAttackLabels(sd);
  const std::vector<double> bona = sd.WithKey(TrialKey::kBonafide);
  const std::vector<double> tar = asv.WithKey(TrialKey::kTarget);
  const std::vector<double> non = asv.WithKey(TrialKey::kNontarget);
  const bool asv_attacks = HasAttackIds(asv);
  std::vector<AttackRow> rows;
  for (const std::string &attack : sd.Attacks()) {
    const std::vector<double> spoof = sd.WithKey(TrialKey::kSpoof, attack);
    const std::vector<double> asv_spoof =
        asv.WithKey(TrialKey::kSpoof, asv_attacks ? attack : std::string());
    const TdcfConstants c =
        ComputeTdcfConstants(params, ComputeAsvOperatingPoint(tar, non, asv_spoof));
    AttackRow row;
    row.attack = attack;
    row.sd_eer = Eer(bona, spoof).eer;
    row.min_tdcf = MinTdcfNorm(bona, spoof, c.c1, c.c2).min_value;
    rows.push_back(row);
  }
  return rows;
}

TandemReport EvaluateTandem(const ScoreSet &sd, const ScoreSet &asv, const TdcfParams &params) {
  TandemReport r;
  const std::vector<double> bona = sd.WithKey(TrialKey::kBonafide);
  const std::vector<double> spoof = sd.WithKey(TrialKey::kSpoof);
  const std::vector<double> tar = asv.WithKey(TrialKey::kTarget);
  const std::vector<double> non = asv.WithKey(TrialKey::kNontarget);
  r.sd_eer = Eer(bona, spoof).eer;
  r.asv_eer = Eer(tar, non).eer;
  r.asv = ComputeAsvOperatingPoint(tar, non, asv.WithKey(TrialKey::kSpoof));
  r.constants = ComputeTdcfConstants(params, r.asv);
  const MinTdcfResult m = MinTdcfNorm(bona, spoof, r.constants.c1, r.constants.c2);
  r.min_tdcf = m.min_value;
  r.min_tdcf_threshold = m.threshold;
  r.attacks = PerAttackReport(sd, asv, params);
  return r;
}

std::string TandemReportCsv(const TandemReport &r) {
  std::string out = "attack,sd_eer,min_tdcf_norm\n";
  char line[160];
  std::snprintf(line, sizeof(line), "pooled,%.17g,%.17g\n", r.sd_eer, r.min_tdcf);
  out += line;
  for (const AttackRow &a : r.attacks) {
    std::snprintf(line, sizeof(line), "%s,%.17g,%.17g\n", a.attack.c_str(), a.sd_eer, a.min_tdcf);
    out += line;
  }
  return out;
}

std::string TandemReportText(const TandemReport &r) {
  std::string out;
  char line[200];
  std::snprintf(line, sizeof(line), "SD EER          %6.2f%%\n", 100.0 * r.sd_eer);
  out += line;
  std::snprintf(line, sizeof(line), "ASV EER         %6.2f%%\n", 100.0 * r.asv_eer);
  out += line;
  std::snprintf(line, sizeof(line), "min t-DCF_norm  %.4f\n", r.min_tdcf);
  out += line;
  std::snprintf(line, sizeof(line), "ASV operating point: threshold %.6g, Pmiss %.4f, Pfa %.4f, Pmiss_spoof %.4f\n",
                r.asv.threshold, r.asv.p_miss, r.asv.p_fa, r.asv.p_miss_spoof);
  out += line;
  std::snprintf(line, sizeof(line), "C0 %.6f  C1 %.6f  C2 %.6f\n", r.constants.c0, r.constants.c1,
                r.constants.c2);
  out += line;
  std::snprintf(line, sizeof(line), "%-12s %10s %14s\n", "attack", "SD EER", "min t-DCF");
  out += line;
  for (const AttackRow &a : r.attacks) {
    std::snprintf(line, sizeof(line), "%-12s %9.2f%% %14.4f\n", a.attack.c_str(), 100.0 * a.sd_eer,
                  a.min_tdcf);
    out += line;
  }
  return out;
}

}  // namespace srasv
