// include/srasv/proto/synth-corpus.h

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

#ifndef SRASV_PROTO_SYNTH_CORPUS_H_
#define SRASV_PROTO_SYNTH_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "srasv/base/kv-config.h"
#include "srasv/feat/wave-io.h"
#include "srasv/proto/protocol.h"

namespace srasv {

enum class SpoofTransform { kLowpass, kClip, kEcho };

const char *SpoofTransformName(SpoofTransform t);
/// Throws kBadSpec.
SpoofTransform ParseSpoofTransform(const std::string &name);

struct SynthCorpusSpec {
  std::uint64_t seed = 7;
  int n_speakers = 10;  // training speakers
  int utts_per_speaker = 6;
  int heldout_per_speaker = 1;  // of the training speakers' utterances
  int n_dev_speakers = 4;
  int n_eval_speakers = 4;
  int test_utts_per_speaker = 6;  // dev/eval speakers, excluding enrollment
  int enroll_per_speaker = 2;
  double duration_s = 1.5;
  std::vector<SpoofTransform> spoof_transforms = {SpoofTransform::kLowpass, SpoofTransform::kClip,
                                                  SpoofTransform::kEcho};

  /// synth.* keys: synth.seed, synth.speakers, synth.utts, synth.heldout,
  /// synth.dev_speakers, synth.eval_speakers, synth.test_utts, synth.enroll,
  /// synth.duration, synth.transforms (comma-separated).
  static SynthCorpusSpec FromConfig(const KvConfig &cfg);
  /// Throws kBadSpec.
  void Validate() const;
};

/// Seeded voice of one speaker.
struct VoiceModel {
  double f0 = 120.0;
  std::vector<double> formants;
  std::vector<double> bandwidths;
  double tilt_db_per_octave = -6.0;
  double breathiness = 0.2;  // aspiration noise level relative to voicing
  double vibrato_hz = 4.0;
  double syllable_hz = 4.0;
};

VoiceModel MakeVoice(std::uint64_t seed, int speaker_index);
Waveform SynthesizeUtterance(const VoiceModel &voice, std::uint64_t seed, double duration_s);
Waveform ApplySpoof(const Waveform &wave, SpoofTransform t);

/// File layout of a generated corpus.
struct CorpusLayout {
  std::filesystem::path root;

  explicit CorpusLayout(std::filesystem::path dir) : root(std::move(dir)) {}
  std::filesystem::path Wav(const std::string &utt) const { return root / "wav" / (utt + ".wav"); }
  /// split in {train, heldout, dev, eval}.
  std::filesystem::path CmProtocol(const std::string &split) const {
    return root / "protocols" / ("cm." + split + ".txt");
  }
  /// split in {dev, eval}.
  std::filesystem::path AsvTrials(const std::string &split) const {
    return root / "protocols" / ("asv." + split + ".trl.txt");
  }
  std::filesystem::path Enrollment(const std::string &split) const {
    return root / "protocols" / ("enroll." + split + ".txt");
  }
  /// Training speakers in class-index order.
  std::filesystem::path Speakers() const { return root / "protocols" / "speakers.train.txt"; }
  std::filesystem::path Manifest() const { return root / "manifest.txt"; }
};

struct SynthCorpusSummary {
  int bonafide_files = 0;
  int spoof_files = 0;
  int train_bonafide = 0;  // train + heldout splits
  int train_spoof = 0;
};

/// Writes WAV files, protocols, trial and enrollment lists and a manifest
/// under `out_dir`. Byte-identical for identical specs.
SynthCorpusSummary GenerateSynthCorpus(const SynthCorpusSpec &spec, const std::filesystem::path &out_dir);

/// Every utterance referenced by the corpus protocols and enrollment lists,
/// in a fixed order.
std::vector<std::string> CorpusUtterances(const CorpusLayout &layout);

}  // namespace srasv

#endif  // SRASV_PROTO_SYNTH_CORPUS_H_
