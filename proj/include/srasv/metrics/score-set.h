// include/srasv/metrics/score-set.h

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

#ifndef SRASV_METRICS_SCORE_SET_H_
#define SRASV_METRICS_SCORE_SET_H_

#include <optional>
#include <string>
#include <vector>

namespace srasv {

enum class TrialKey { kTarget, kNontarget, kSpoof, kBonafide };

const char *TrialKeyName(TrialKey key);
/// Throws kMalformedLine for anything outside the four key names.
TrialKey ParseTrialKey(const std::string &name);

struct ScoreRecord {
  std::string trial_id;
  double score = 0.0;
  std::optional<TrialKey> key;
  std::string attack;  // "-" or empty for bona fide trials
};

struct ScoreSet {
  std::vector<ScoreRecord> records;

  std::size_t size() const { return records.size(); }
  /// Scores of the records carrying `key` (and `attack`, when non-empty).
  std::vector<double> WithKey(TrialKey key, const std::string &attack = "") const;
  /// Distinct attack ids of the spoof records in first-seen order.
  std::vector<std::string> Attacks() const;
};

}  // namespace srasv

#endif  // SRASV_METRICS_SCORE_SET_H_
