// tests/unit/proto-test.cc

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

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "srasv/base/error.h"
#include "srasv/feat/wave-io.h"
#include "srasv/proto/protocol.h"
#include "srasv/proto/synth-corpus.h"

using namespace srasv;
namespace fs = std::filesystem;

namespace {

template <typename F>
Errc ErrcOf(F &&f) {
  try {
    f();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("no exception thrown");
  return Errc::kBadConfig;
}

std::string Slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> TreeContents(const fs::path &root) {
  std::map<std::string, std::string> files;
  for (const auto &e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = Slurp(e.path());
  return files;
}

SynthCorpusSpec SmallSpec() {
  SynthCorpusSpec s;
  s.n_speakers = 3;
  s.utts_per_speaker = 3;
  s.n_dev_speakers = 2;
  s.n_eval_speakers = 2;
  s.test_utts_per_speaker = 2;
  s.enroll_per_speaker = 1;
  s.duration_s = 1.0;
  return s;
}

}  // namespace

TEST_CASE("cm protocol parsing") {
  CHECK(ParseCmProtocol("").empty());
  CHECK(ParseCmProtocol("\n\n").empty());

  const auto e = ParseCmProtocol("LA_0001 LA_T_100 A07 spoof\nLA_0001 LA_T_101 - bonafide\n");
  REQUIRE(e.size() == 2);
  CHECK(e[0].speaker_id == "LA_0001");
  CHECK(e[0].utterance_id == "LA_T_100");
  CHECK(e[0].attack_id == "A07");
  CHECK(e[0].key == TrialKey::kSpoof);
  CHECK(e[1].attack_id == "-");
  CHECK(e[1].key == TrialKey::kBonafide);

  // Challenge files carry an extra environment column.
  const auto five = ParseCmProtocol("LA_0079 LA_T_1138215 - - bonafide\nLA_0079 LA_T_1271820 - A01 spoof\n");
  REQUIRE(five.size() == 2);
  CHECK(five[1].attack_id == "A01");
  CHECK(five[1].key == TrialKey::kSpoof);

  CHECK(ErrcOf([] { ParseCmProtocol("LA_0001 LA_T_100 - spoof\n"); }) == Errc::kMalformedLine);
  CHECK(ErrcOf([] { ParseCmProtocol("LA_0001 LA_T_100 A07 bonafide\n"); }) == Errc::kMalformedLine);
  CHECK(ErrcOf([] { ParseCmProtocol("LA_0001 LA_T_100 spoof\n"); }) == Errc::kMalformedLine);
  CHECK(ErrcOf([] { ParseCmProtocol("LA_0001 LA_T_100 A07 fake\n"); }) == Errc::kMalformedLine);
  CHECK(ErrcOf([] { ParseCmProtocol("a u1 - bonafide\nb u1 A01 spoof\n"); }) == Errc::kDuplicateUtterance);

  try {
    ParseCmProtocol("a u1 - bonafide\nbroken\n", "cm.txt");
    FAIL("expected MalformedLine");
  } catch (const Error &err) {
    CHECK(std::string(err.what()).find("cm.txt:2") != std::string::npos);
  }
}

TEST_CASE("protocol round trips") {
  const std::vector<CmProtocolEntry> cm = {
      {"S1", "u1", "-", TrialKey::kBonafide}, {"S1", "u2", "A07", TrialKey::kSpoof}, {"S2", "u3", "-", TrialKey::kBonafide}};
  const std::string text = FormatCmProtocol(cm);
  CHECK(ParseCmProtocol(text) == cm);
  CHECK(FormatCmProtocol(ParseCmProtocol(text)) == text);

  const std::vector<AsvTrialEntry> trials = {{"S1", "u1", TrialKey::kTarget, "-"},
                                             {"S1", "u3", TrialKey::kNontarget, "-"},
                                             {"S1", "u2", TrialKey::kSpoof, "A07"}};
  CHECK(ParseAsvTrials(FormatAsvTrials(trials)) == trials);
  CHECK(trials[2].TrialId() == "S1:u2");
  CHECK(ErrcOf([] { ParseAsvTrials("S1 u1 bonafide\n"); }) == Errc::kMalformedLine);

  const std::vector<EnrollmentEntry> enroll = {{"S1", {"a", "b"}}, {"S2", {"c"}}};
  CHECK(ParseEnrollment(FormatEnrollment(enroll)) == enroll);
  CHECK(ErrcOf([] { ParseEnrollment("S1\n"); }) == Errc::kMalformedLine);

  const fs::path p = fs::temp_directory_path() / "srasv-proto-cm.txt";
  WriteCmProtocol(p, cm);
  CHECK(ReadCmProtocol(p) == cm);
  fs::remove(p);
}

TEST_CASE("score file round trip is bitwise") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 30.0);
  ScoreSet s;
  for (int i = 0; i < 100; ++i) {
    ScoreRecord r;
    r.trial_id = "t" + std::to_string(i);
    r.score = g(rng) * std::pow(10.0, (i % 7) - 3);
    if (i % 3 == 0) r.key = TrialKey::kSpoof, r.attack = "A0" + std::to_string(i % 5);
    if (i % 3 == 1) r.key = TrialKey::kBonafide;
    s.records.push_back(r);
  }
  const ScoreSet back = ParseScoreFile(FormatScoreFile(s));
  REQUIRE(back.records.size() == s.records.size());
  for (std::size_t i = 0; i < s.records.size(); ++i) {
    CHECK(back.records[i].trial_id == s.records[i].trial_id);
    CHECK(std::memcmp(&back.records[i].score, &s.records[i].score, sizeof(double)) == 0);
    CHECK(back.records[i].key == s.records[i].key);
    CHECK(back.records[i].attack == s.records[i].attack);
  }
}

TEST_CASE("score file golden bytes and errors") {
  ScoreSet s;
  s.records.push_back({"a", 0.1, TrialKey::kTarget, ""});
  s.records.push_back({"b", -2.5, TrialKey::kSpoof, "A07"});
  s.records.push_back({"c", 3.0, std::nullopt, ""});
  CHECK(FormatScoreFile(s) == "a 0.10000000000000001 target\nb -2.5 spoof A07\nc 3\n");

  ScoreSet bad;
  bad.records.push_back({"a", std::numeric_limits<double>::quiet_NaN(), std::nullopt, ""});
  CHECK(ErrcOf([&] { FormatScoreFile(bad); }) == Errc::kNonFiniteScore);
  CHECK(ErrcOf([] { ParseScoreFile("a nan\n"); }) == Errc::kNonFiniteScore);
  CHECK(ErrcOf([] { ParseScoreFile("a inf target\n"); }) == Errc::kNonFiniteScore);
  CHECK(ErrcOf([] { ParseScoreFile("a 1x\n"); }) == Errc::kMalformedLine);
  CHECK(ErrcOf([] { ParseScoreFile("a\n"); }) == Errc::kMalformedLine);
}

TEST_CASE("spoof transforms") {
  CHECK(ParseSpoofTransform("lowpass") == SpoofTransform::kLowpass);
  CHECK(std::string(SpoofTransformName(SpoofTransform::kEcho)) == "echo");
  CHECK(ErrcOf([] { ParseSpoofTransform("vocoder"); }) == Errc::kBadSpec);

  const VoiceModel v = MakeVoice(7, 0);
  CHECK(v.f0 >= 90.0);
  CHECK(v.f0 <= 220.0);
  const Waveform w = SynthesizeUtterance(v, 3, 1.0);
  CHECK(w.samples.size() == 16000);
  const Waveform w2 = SynthesizeUtterance(v, 3, 1.0);
  CHECK(w.samples == w2.samples);
  for (SpoofTransform t : {SpoofTransform::kLowpass, SpoofTransform::kClip, SpoofTransform::kEcho}) {
    const Waveform s = ApplySpoof(w, t);
    REQUIRE(s.samples.size() == w.samples.size());
    CHECK(s.samples != w.samples);
    float peak = 0.0f;
    for (float x : s.samples) peak = std::max(peak, std::abs(x));
    CHECK(peak <= 1.0f);
  }
}

TEST_CASE("synth corpus option validation") {
  SynthCorpusSpec s;
  s.n_speakers = 1;
  CHECK(ErrcOf([&] { s.Validate(); }) == Errc::kBadSpec);
  s = SynthCorpusSpec();
  s.heldout_per_speaker = s.utts_per_speaker;
  CHECK(ErrcOf([&] { s.Validate(); }) == Errc::kBadSpec);
  s = SynthCorpusSpec();
  s.spoof_transforms = {SpoofTransform::kClip, SpoofTransform::kClip};
  CHECK(ErrcOf([&] { s.Validate(); }) == Errc::kBadSpec);
}

TEST_CASE("synth corpus is deterministic and well formed") {
  const SynthCorpusSpec spec = SmallSpec();
  const fs::path a = fs::temp_directory_path() / "srasv-proto-synth-a";
  const fs::path b = fs::temp_directory_path() / "srasv-proto-synth-b";
  fs::remove_all(a);
  fs::remove_all(b);
  const SynthCorpusSummary sa = GenerateSynthCorpus(spec, a);
  GenerateSynthCorpus(spec, b);
  CHECK(TreeContents(a) == TreeContents(b));

  const int n_transforms = static_cast<int>(spec.spoof_transforms.size());
  CHECK(sa.train_bonafide == spec.n_speakers * spec.utts_per_speaker);
  CHECK(sa.train_spoof == sa.train_bonafide * n_transforms);
  const int test_speakers = spec.n_dev_speakers + spec.n_eval_speakers;
  CHECK(sa.bonafide_files ==
        sa.train_bonafide + test_speakers * (spec.enroll_per_speaker + spec.test_utts_per_speaker));
  CHECK(sa.spoof_files == sa.train_spoof + test_speakers * spec.test_utts_per_speaker * n_transforms);

  const CorpusLayout layout(a);
  std::map<std::string, std::set<std::string>> speakers_of_split;
  std::set<std::string> transform_names;
  for (SpoofTransform t : spec.spoof_transforms) transform_names.insert(SpoofTransformName(t));
  for (const char *split : {"train", "heldout", "dev", "eval"}) {
    for (const CmProtocolEntry &e : ReadCmProtocol(layout.CmProtocol(split))) {
      speakers_of_split[split].insert(e.speaker_id);
      CHECK(fs::exists(layout.Wav(e.utterance_id)));
      if (e.key == TrialKey::kSpoof) {
        CHECK(transform_names.count(e.attack_id) == 1);
        CHECK(e.utterance_id.size() > e.attack_id.size());
        CHECK(e.utterance_id.substr(e.utterance_id.size() - e.attack_id.size()) == e.attack_id);
      }
    }
  }
  CHECK(speakers_of_split["train"] == speakers_of_split["heldout"]);
  for (const std::string &s : speakers_of_split["eval"]) {
    CHECK(speakers_of_split["train"].count(s) == 0);
    CHECK(speakers_of_split["dev"].count(s) == 0);
  }

  const Waveform w = ReadWav(layout.Wav(ReadCmProtocol(layout.CmProtocol("train"))[0].utterance_id));
  CHECK(w.sample_rate == 16000);
  CHECK(w.samples.size() == 16000);

  for (const char *split : {"dev", "eval"}) {
    std::map<std::string, std::string> owner;
    for (const CmProtocolEntry &e : ReadCmProtocol(layout.CmProtocol(split))) owner[e.utterance_id] = e.speaker_id;
    const auto enroll = ReadEnrollment(layout.Enrollment(split));
    CHECK(enroll.size() == static_cast<std::size_t>(spec.n_dev_speakers));
    std::set<std::string> enroll_utts;
    for (const auto &e : enroll)
      for (const auto &u : e.utterance_ids) enroll_utts.insert(u);
    int targets = 0, nontargets = 0, spoofs = 0;
    for (const AsvTrialEntry &t : ReadAsvTrials(layout.AsvTrials(split))) {
      REQUIRE(owner.count(t.test_utterance_id) == 1);
      CHECK(enroll_utts.count(t.test_utterance_id) == 0);
      switch (t.key) {
        case TrialKey::kTarget:
          ++targets;
          CHECK(owner[t.test_utterance_id] == t.enroll_speaker_id);
          break;
        case TrialKey::kNontarget:
          ++nontargets;
          CHECK(owner[t.test_utterance_id] != t.enroll_speaker_id);
          break;
        case TrialKey::kSpoof:
          ++spoofs;
          CHECK(owner[t.test_utterance_id] == t.enroll_speaker_id);
          CHECK(transform_names.count(t.attack_id) == 1);
          break;
        default:
          FAIL("unexpected trial key");
      }
    }
    CHECK(targets == 2 * spec.test_utts_per_speaker);
    CHECK(nontargets == 2 * spec.test_utts_per_speaker);
    CHECK(spoofs == 2 * spec.test_utts_per_speaker * n_transforms);
  }

  const auto utts = CorpusUtterances(layout);
  CHECK(static_cast<int>(utts.size()) == sa.bonafide_files + sa.spoof_files);
  CHECK(std::set<std::string>(utts.begin(), utts.end()).size() == utts.size());
  fs::remove_all(a);
  fs::remove_all(b);
}
