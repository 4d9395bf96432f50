// include/srasv/proto/protocol.h

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

#ifndef SRASV_PROTO_PROTOCOL_H_
#define SRASV_PROTO_PROTOCOL_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "srasv/metrics/score-set.h"

namespace srasv {

/// Countermeasure protocol line: speaker, utterance, [extra columns,]
/// attack ("-" for bona fide), key. The last two columns are the attack and
/// key, so 5-column challenge files parse unchanged.
struct CmProtocolEntry {
  std::string speaker_id;
  std::string utterance_id;
  std::string attack_id = "-";
  TrialKey key = TrialKey::kBonafide;

  bool operator==(const CmProtocolEntry &) const = default;
};

/// Speaker-verification trial: enrolled speaker, test utterance, [attack,]
/// key in {target, nontarget, spoof}.
struct AsvTrialEntry {
  std::string enroll_speaker_id;
  std::string test_utterance_id;
  TrialKey key = TrialKey::kTarget;
  std::string attack_id = "-";

  std::string TrialId() const { return enroll_speaker_id + ":" + test_utterance_id; }
  bool operator==(const AsvTrialEntry &) const = default;
};

/// Enrolled speaker and the utterances that define it.
struct EnrollmentEntry {
  std::string speaker_id;
  std::vector<std::string> utterance_ids;

  bool operator==(const EnrollmentEntry &) const = default;
};

// Parsers throw kMalformedLine with "source:line" in the message and
// kDuplicateUtterance for repeated utterance ids.
std::vector<CmProtocolEntry> ParseCmProtocol(std::string_view text, const std::string &source = "");
std::vector<CmProtocolEntry> ReadCmProtocol(const std::filesystem::path &path);
std::string FormatCmProtocol(const std::vector<CmProtocolEntry> &entries);
void WriteCmProtocol(const std::filesystem::path &path, const std::vector<CmProtocolEntry> &entries);

std::vector<AsvTrialEntry> ParseAsvTrials(std::string_view text, const std::string &source = "");
std::vector<AsvTrialEntry> ReadAsvTrials(const std::filesystem::path &path);
std::string FormatAsvTrials(const std::vector<AsvTrialEntry> &trials);
void WriteAsvTrials(const std::filesystem::path &path, const std::vector<AsvTrialEntry> &trials);

/// One speaker per line followed by its utterance ids.
std::vector<EnrollmentEntry> ParseEnrollment(std::string_view text, const std::string &source = "");
std::vector<EnrollmentEntry> ReadEnrollment(const std::filesystem::path &path);
std::string FormatEnrollment(const std::vector<EnrollmentEntry> &entries);
void WriteEnrollment(const std::filesystem::path &path, const std::vector<EnrollmentEntry> &entries);

/// Score file: "trial_id score [key [attack]]", scores with 17 significant
/// digits. Throws kNonFiniteScore on write or read of a non-finite value.
std::string FormatScoreFile(const ScoreSet &scores);
ScoreSet ParseScoreFile(std::string_view text, const std::string &source = "");
void WriteScoreFile(const std::filesystem::path &path, const ScoreSet &scores);
ScoreSet ReadScoreFile(const std::filesystem::path &path);

}  // namespace srasv

#endif  // SRASV_PROTO_PROTOCOL_H_
