// src/metrics/score-set.cc

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

#include "srasv/metrics/score-set.h"

#include <algorithm>

#include "srasv/base/error.h"

namespace srasv {

const char *TrialKeyName(TrialKey key) {
  switch (key) {
    case TrialKey::kTarget: return "target";
    case TrialKey::kNontarget: return "nontarget";
    case TrialKey::kSpoof: return "spoof";
    case TrialKey::kBonafide: return "bonafide";
  }
  return "?";
}

TrialKey ParseTrialKey(const std::string &name) {
  if (name == "target") return TrialKey::kTarget;
  if (name == "nontarget") return TrialKey::kNontarget;
  if (name == "spoof") return TrialKey::kSpoof;
  if (name == "bonafide") return TrialKey::kBonafide;
  throw Error(Errc::kMalformedLine, "unknown trial key '" + name + "'");
}

std::vector<double> ScoreSet::WithKey(TrialKey key, const std::string &attack) const {
  std::vector<double> out;
  for (const ScoreRecord &r : records)
    if (r.key == key && (attack.empty() || r.attack == attack)) out.push_back(r.score);
  return out;
}

std::vector<std::string> ScoreSet::Attacks() const {
  std::vector<std::string> out;
  for (const ScoreRecord &r : records)
    if (r.key == TrialKey::kSpoof && std::find(out.begin(), out.end(), r.attack) == out.end())
      out.push_back(r.attack);
  return out;
}

}  // namespace srasv
