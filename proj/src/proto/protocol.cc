// src/proto/protocol.cc

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

#include "srasv/proto/protocol.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_set>

#include "srasv/base/error.h"
#include "srasv/base/io.h"

namespace srasv {

namespace {

std::vector<std::string> Tokens(const std::string &line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

[[noreturn]] void Malformed(const std::string &source, int line, const std::string &what) {
  throw Error(Errc::kMalformedLine,
              (source.empty() ? std::string("line ") : source + ":") + std::to_string(line) + ": " + what);
}

// Calls fn(tokens, line_number) for every non-blank line.
template <typename Fn>
void ForEachLine(std::string_view text, Fn fn) {
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::vector<std::string> tok = Tokens(line);
    if (!tok.empty()) fn(tok, n);
  }
}

TrialKey KeyAt(const std::string &token, const std::string &source, int line) {
  try {
    return ParseTrialKey(token);
  } catch (const Error &) {
    Malformed(source, line, "unknown key '" + token + "'");
  }
}

}  // namespace

std::vector<CmProtocolEntry> ParseCmProtocol(std::string_view text, const std::string &source) {
  std::vector<CmProtocolEntry> out;
  std::unordered_set<std::string> seen;
  ForEachLine(text, [&](const std::vector<std::string> &tok, int line) {
    if (tok.size() < 4) Malformed(source, line, "expected at least 4 columns");
    CmProtocolEntry e;
    e.speaker_id = tok[0];
    e.utterance_id = tok[1];
    e.attack_id = tok[tok.size() - 2];
    e.key = KeyAt(tok.back(), source, line);
    if (e.key != TrialKey::kBonafide && e.key != TrialKey::kSpoof)
      Malformed(source, line, "key must be bonafide or spoof");
    if ((e.key == TrialKey::kSpoof) != (e.attack_id != "-"))
      Malformed(source, line, "attack id and key disagree");
    if (!seen.insert(e.utterance_id).second)
      throw Error(Errc::kDuplicateUtterance, source + ":" + std::to_string(line) +
                                                 ": duplicate utterance " + e.utterance_id);
    out.push_back(std::move(e));
  });
  return out;
}

std::vector<CmProtocolEntry> ReadCmProtocol(const std::filesystem::path &path) {
  return ParseCmProtocol(ReadFileBytes(path), path.string());
}

std::string FormatCmProtocol(const std::vector<CmProtocolEntry> &entries) {
  std::string out;
  for (const CmProtocolEntry &e : entries)
    out += e.speaker_id + " " + e.utterance_id + " " + e.attack_id + " " + TrialKeyName(e.key) + "\n";
  return out;
}

void WriteCmProtocol(const std::filesystem::path &path, const std::vector<CmProtocolEntry> &entries) {
  WriteFileAtomic(path, FormatCmProtocol(entries));
}

std::vector<AsvTrialEntry> ParseAsvTrials(std::string_view text, const std::string &source) {
  std::vector<AsvTrialEntry> out;
  ForEachLine(text, [&](const std::vector<std::string> &tok, int line) {
    if (tok.size() < 3) Malformed(source, line, "expected at least 3 columns");
    AsvTrialEntry t;
    t.enroll_speaker_id = tok[0];
    t.test_utterance_id = tok[1];
    t.key = KeyAt(tok.back(), source, line);
    if (t.key == TrialKey::kBonafide) Malformed(source, line, "key must be target, nontarget or spoof");
    if (tok.size() >= 4) t.attack_id = tok[tok.size() - 2];
    // Challenge files write "bonafide target"; the attack column carries
    // meaning only for spoofs.
    if (t.key != TrialKey::kSpoof) t.attack_id = "-";
    out.push_back(std::move(t));
  });
  return out;
}

std::vector<AsvTrialEntry> ReadAsvTrials(const std::filesystem::path &path) {
  return ParseAsvTrials(ReadFileBytes(path), path.string());
}

std::string FormatAsvTrials(const std::vector<AsvTrialEntry> &trials) {
  std::string out;
  for (const AsvTrialEntry &t : trials) {
    out += t.enroll_speaker_id + " " + t.test_utterance_id + " ";
    if (t.key == TrialKey::kSpoof) out += t.attack_id + " ";
    out += std::string(TrialKeyName(t.key)) + "\n";
  }
  return out;
}

void WriteAsvTrials(const std::filesystem::path &path, const std::vector<AsvTrialEntry> &trials) {
  WriteFileAtomic(path, FormatAsvTrials(trials));
}

std::vector<EnrollmentEntry> ParseEnrollment(std::string_view text, const std::string &source) {
  std::vector<EnrollmentEntry> out;
  std::unordered_set<std::string> speakers;
  ForEachLine(text, [&](const std::vector<std::string> &tok, int line) {
    if (tok.size() < 2) Malformed(source, line, "speaker without enrollment utterances");
    if (!speakers.insert(tok[0]).second) Malformed(source, line, "speaker enrolled twice");
    out.push_back({tok[0], std::vector<std::string>(tok.begin() + 1, tok.end())});
  });
  return out;
}

std::vector<EnrollmentEntry> ReadEnrollment(const std::filesystem::path &path) {
  return ParseEnrollment(ReadFileBytes(path), path.string());
}

std::string FormatEnrollment(const std::vector<EnrollmentEntry> &entries) {
  std::string out;
  for (const EnrollmentEntry &e : entries) {
    out += e.speaker_id;
    for (const std::string &u : e.utterance_ids) out += " " + u;
    out += "\n";
  }
  return out;
}

void WriteEnrollment(const std::filesystem::path &path, const std::vector<EnrollmentEntry> &entries) {
  WriteFileAtomic(path, FormatEnrollment(entries));
}

std::string FormatScoreFile(const ScoreSet &scores) {
  std::string out;
  char num[40];
  for (const ScoreRecord &r : scores.records) {
    if (!std::isfinite(r.score))
      throw Error(Errc::kNonFiniteScore, "non-finite score for trial " + r.trial_id);
    std::snprintf(num, sizeof(num), "%.17g", r.score);
    out += r.trial_id + " " + num;
    if (r.key) {
      out += " ";
      out += TrialKeyName(*r.key);
      if (!r.attack.empty() && r.attack != "-") out += " " + r.attack;
    }
    out += "\n";
  }
  return out;
}

ScoreSet ParseScoreFile(std::string_view text, const std::string &source) {
  ScoreSet s;
  ForEachLine(text, [&](const std::vector<std::string> &tok, int line) {
    if (tok.size() < 2 || tok.size() > 4) Malformed(source, line, "expected 2 to 4 columns");
    ScoreRecord r;
    r.trial_id = tok[0];
    const std::string &v = tok[1];
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), r.score);
    if (ec != std::errc() || end != v.data() + v.size()) {
      std::string lower;
      for (char c : v) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (lower.find("nan") != std::string::npos || lower.find("inf") != std::string::npos)
        throw Error(Errc::kNonFiniteScore, source + ":" + std::to_string(line) + ": score " + v);
      Malformed(source, line, "bad score '" + v + "'");
    }
    if (!std::isfinite(r.score))
      throw Error(Errc::kNonFiniteScore, source + ":" + std::to_string(line) + ": score " + v);
    if (tok.size() >= 3) r.key = KeyAt(tok[2], source, line);
    if (tok.size() == 4) r.attack = tok[3];
    s.records.push_back(std::move(r));
  });
  return s;
}

void WriteScoreFile(const std::filesystem::path &path, const ScoreSet &scores) {
  WriteFileAtomic(path, FormatScoreFile(scores));
}

ScoreSet ReadScoreFile(const std::filesystem::path &path) {
  return ParseScoreFile(ReadFileBytes(path), path.string());
}

}  // namespace srasv
