// src/proto/synth-corpus.cc

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

#include "srasv/proto/synth-corpus.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_set>

#include "srasv/base/error.h"
#include "srasv/base/io.h"

namespace srasv {

namespace {

std::uint64_t SplitMix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t Derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return SplitMix(SplitMix(SplitMix(seed) ^ a) ^ (b * 0xD6E8FEB86659FD93ull));
}

void NormalizePeak(std::vector<float> *x, double peak) {
  float m = 0.0f;
  for (float v : *x) m = std::max(m, std::abs(v));
  if (m == 0.0f) return;
  const double g = peak / m;
  for (float &v : *x) v = static_cast<float>(v * g);
}

std::vector<float> Lowpass(const std::vector<float> &x, double cutoff_hz) {
  constexpr int kTaps = 129;
  constexpr int kHalf = kTaps / 2;
  const double fc = cutoff_hz / kSampleRate;
  std::vector<double> h(kTaps);
  double sum = 0.0;
  for (int i = 0; i < kTaps; ++i) {
    const int n = i - kHalf;
    const double sinc = n == 0 ? 2 * fc : std::sin(2 * std::numbers::pi * fc * n) / (std::numbers::pi * n);
    const double w = 0.54 - 0.46 * std::cos(2 * std::numbers::pi * i / (kTaps - 1));
    h[i] = sinc * w;
    sum += h[i];
  }
  for (double &v : h) v /= sum;
  const long len = static_cast<long>(x.size());
  std::vector<float> y(x.size());
  for (long n = 0; n < len; ++n) {
    double acc = 0.0;
    for (int k = 0; k < kTaps; ++k) {
      const long j = n + kHalf - k;
      if (j >= 0 && j < len) acc += h[k] * x[j];
    }
    y[n] = static_cast<float>(acc);
  }
  return y;
}

constexpr const char *kSplits[] = {"train", "heldout", "dev", "eval"};

std::string SpeakerId(char split, int i) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "SPK_%c%02d", split, i);
  return buf;
}

std::string UttId(const std::string &speaker, int u) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_%02d", u);
  return speaker + buf;
}

}  // namespace

const char *SpoofTransformName(SpoofTransform t) {
  switch (t) {
    case SpoofTransform::kLowpass: return "lowpass";
    case SpoofTransform::kClip: return "clip";
    case SpoofTransform::kEcho: return "echo";
  }
  return "?";
}

SpoofTransform ParseSpoofTransform(const std::string &name) {
  if (name == "lowpass") return SpoofTransform::kLowpass;
  if (name == "clip") return SpoofTransform::kClip;
  if (name == "echo") return SpoofTransform::kEcho;
  throw Error(Errc::kBadSpec, "unknown spoof transform '" + name + "'");
}

SynthCorpusSpec SynthCorpusSpec::FromConfig(const KvConfig &cfg) {
  SynthCorpusSpec s;
  s.seed = static_cast<std::uint64_t>(cfg.GetInt("synth.seed", static_cast<std::int64_t>(s.seed)));
  s.n_speakers = static_cast<int>(cfg.GetInt("synth.speakers", s.n_speakers));
  s.utts_per_speaker = static_cast<int>(cfg.GetInt("synth.utts", s.utts_per_speaker));
  s.heldout_per_speaker = static_cast<int>(cfg.GetInt("synth.heldout", s.heldout_per_speaker));
  s.n_dev_speakers = static_cast<int>(cfg.GetInt("synth.dev_speakers", s.n_dev_speakers));
  s.n_eval_speakers = static_cast<int>(cfg.GetInt("synth.eval_speakers", s.n_eval_speakers));
  s.test_utts_per_speaker = static_cast<int>(cfg.GetInt("synth.test_utts", s.test_utts_per_speaker));
  s.enroll_per_speaker = static_cast<int>(cfg.GetInt("synth.enroll", s.enroll_per_speaker));
  s.duration_s = cfg.GetDouble("synth.duration", s.duration_s);
  if (auto t = cfg.Get("synth.transforms")) {
    s.spoof_transforms.clear();
    std::stringstream ss(*t);
    std::string name;
    while (std::getline(ss, name, ','))
      if (!name.empty()) s.spoof_transforms.push_back(ParseSpoofTransform(name));
  }
  s.Validate();
  return s;
}

void SynthCorpusSpec::Validate() const {
  if (n_speakers < 2) throw Error(Errc::kBadSpec, "need at least 2 training speakers");
  if (duration_s < 1.0) throw Error(Errc::kBadSpec, "utterances must last at least 1 s");
  if (utts_per_speaker < 1 || heldout_per_speaker < 0 || heldout_per_speaker >= utts_per_speaker)
    throw Error(Errc::kBadSpec, "heldout utterances must leave at least one training utterance");
  if (n_dev_speakers < 0 || n_eval_speakers < 0)
    throw Error(Errc::kBadSpec, "negative speaker count");
  if ((n_dev_speakers > 0 || n_eval_speakers > 0) && (enroll_per_speaker < 1 || test_utts_per_speaker < 1))
    throw Error(Errc::kBadSpec, "dev/eval speakers need enrollment and test utterances");
  std::unordered_set<int> seen;
  for (SpoofTransform t : spoof_transforms)
    if (!seen.insert(static_cast<int>(t)).second) throw Error(Errc::kBadSpec, "repeated spoof transform");
}

VoiceModel MakeVoice(std::uint64_t seed, int speaker_index) {
  std::mt19937_64 rng(Derive(seed, 0x5EED0001, speaker_index));
  auto u = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  VoiceModel v;
  v.f0 = u(90.0, 220.0);
  v.formants = {u(300.0, 850.0), u(900.0, 2300.0), u(2400.0, 3300.0), u(3500.0, 4800.0)};
  v.bandwidths = {u(50.0, 120.0), u(70.0, 160.0), u(100.0, 220.0), u(150.0, 300.0)};
  v.tilt_db_per_octave = u(-6.0, -3.0);
  v.breathiness = u(0.1, 0.3);
  v.vibrato_hz = u(2.0, 6.0);
  v.syllable_hz = u(3.0, 6.0);
  return v;
}

Waveform SynthesizeUtterance(const VoiceModel &voice, std::uint64_t seed, double duration_s) {
  std::mt19937_64 rng(seed);
  auto u = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  std::normal_distribution<double> noise(0.0, 1.0);
  const std::size_t n = static_cast<std::size_t>(std::llround(duration_s * kSampleRate));
  const double f0 = voice.f0 * u(0.95, 1.05);
  const double vib_phase = u(0.0, 2 * std::numbers::pi), syl_phase = u(0.0, std::numbers::pi);
  const double decline = u(-0.08, 0.02);
  const double nyquist = kSampleRate / 2.0;
  const int max_h = static_cast<int>(nyquist / (f0 * 0.9));
  std::vector<double> phase(max_h + 1, 0.0);
  for (int h = 1; h <= max_h; ++h) phase[h] = u(0.0, 2 * std::numbers::pi);

  auto gain = [&](double f) {
    double r = 0.02;
    for (std::size_t k = 0; k < voice.formants.size(); ++k) {
      const double d = (f - voice.formants[k]) / voice.bandwidths[k];
      r += 1.0 / (1.0 + d * d);
    }
    return r * std::pow(10.0, voice.tilt_db_per_octave * std::log2(f / 100.0) / 20.0);
  };

  Waveform w;
  w.samples.resize(n);
  double rms = 0.0;
  for (int h = 1; h <= max_h; ++h)
    if (f0 * h < nyquist * 0.98) rms += 0.5 * gain(f0 * h) * gain(f0 * h);
  const double breath = voice.breathiness * std::sqrt(rms);
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kSampleRate;
    const double fi = f0 * (1.0 + 0.04 * std::sin(2 * std::numbers::pi * voice.vibrato_hz * t + vib_phase) +
                            decline * t / duration_s);
    const double env = 0.2 + 0.8 * std::sqrt(std::abs(std::sin(std::numbers::pi * voice.syllable_hz * t + syl_phase)));
    double v = 0.0;
    for (int h = 1; h <= max_h; ++h) {
      const double fh = fi * h;
      phase[h] += 2 * std::numbers::pi * fh / kSampleRate;
      if (fh < nyquist * 0.98) v += gain(fh) * std::sin(phase[h]);
    }
    // Aspiration: first-differenced white noise, tilted towards high bands.
    const double white = noise(rng);
    const double asp = 0.5 * (white - prev);
    prev = white;
    w.samples[i] = static_cast<float>(env * (v + breath * asp) + 0.002 * breath * noise(rng));
  }
  NormalizePeak(&w.samples, 0.5);
  return w;
}

Waveform ApplySpoof(const Waveform &wave, SpoofTransform t) {
  Waveform out = wave;
  switch (t) {
    case SpoofTransform::kLowpass:
      out.samples = Lowpass(wave.samples, 3400.0);
      break;
    case SpoofTransform::kClip: {
      constexpr double kDrive = 4.0;
      float peak = 0.0f;
      for (float v : wave.samples) peak = std::max(peak, std::abs(v));
      if (peak == 0.0f) break;
      for (float &v : out.samples) v = static_cast<float>(std::tanh(kDrive * v / peak) / std::tanh(kDrive) * peak);
      break;
    }
    case SpoofTransform::kEcho: {
      const std::size_t delay = static_cast<std::size_t>(0.025 * kSampleRate);
      for (std::size_t i = delay; i < out.samples.size(); ++i) out.samples[i] += 0.5f * wave.samples[i - delay];
      break;
    }
  }
  NormalizePeak(&out.samples, 0.5);
  return out;
}

SynthCorpusSummary GenerateSynthCorpus(const SynthCorpusSpec &spec, const std::filesystem::path &out_dir) {
  spec.Validate();
  const CorpusLayout layout(out_dir);
  SynthCorpusSummary summary;
  std::vector<CmProtocolEntry> cm[4];
  std::vector<std::string> train_speakers;

  auto emit = [&](const VoiceModel &voice, const std::string &spk, int global, int u, bool spoofs,
                  std::vector<CmProtocolEntry> *protocol) {
    const std::string utt = UttId(spk, u);
    const Waveform w = SynthesizeUtterance(voice, Derive(spec.seed, global, u), spec.duration_s);
    WriteWav(layout.Wav(utt), w);
    ++summary.bonafide_files;
    if (protocol) protocol->push_back({spk, utt, "-", TrialKey::kBonafide});
    if (!spoofs) return;
    for (SpoofTransform t : spec.spoof_transforms) {
      const std::string name = SpoofTransformName(t);
      WriteWav(layout.Wav(utt + "_" + name), ApplySpoof(w, t));
      ++summary.spoof_files;
      protocol->push_back({spk, utt + "_" + name, name, TrialKey::kSpoof});
    }
  };

  int global = 0;
  for (int s = 0; s < spec.n_speakers; ++s, ++global) {
    const std::string spk = SpeakerId('T', s);
    train_speakers.push_back(spk);
    const VoiceModel voice = MakeVoice(spec.seed, global);
    for (int u = 0; u < spec.utts_per_speaker; ++u) {
      const bool heldout = u >= spec.utts_per_speaker - spec.heldout_per_speaker;
      emit(voice, spk, global, u, true, &cm[heldout ? 1 : 0]);
    }
  }
  summary.train_bonafide = summary.bonafide_files;
  summary.train_spoof = summary.spoof_files;

  for (int split = 2; split < 4; ++split) {
    const int count = split == 2 ? spec.n_dev_speakers : spec.n_eval_speakers;
    if (count == 0) continue;
    std::vector<EnrollmentEntry> enroll;
    std::vector<std::string> speakers;
    for (int s = 0; s < count; ++s, ++global) {
      const std::string spk = SpeakerId(split == 2 ? 'D' : 'E', s);
      speakers.push_back(spk);
      const VoiceModel voice = MakeVoice(spec.seed, global);
      EnrollmentEntry e{spk, {}};
      for (int u = 0; u < spec.enroll_per_speaker; ++u) {
        emit(voice, spk, global, u, false, nullptr);
        e.utterance_ids.push_back(UttId(spk, u));
      }
      enroll.push_back(e);
      for (int u = 0; u < spec.test_utts_per_speaker; ++u)
        emit(voice, spk, global, spec.enroll_per_speaker + u, true, &cm[split]);
    }
    std::vector<AsvTrialEntry> trials;
    for (const std::string &claim : speakers) {
      for (const CmProtocolEntry &e : cm[split]) {
        if (e.key == TrialKey::kSpoof) {
          if (e.speaker_id == claim) trials.push_back({claim, e.utterance_id, TrialKey::kSpoof, e.attack_id});
        } else {
          trials.push_back({claim, e.utterance_id,
                            e.speaker_id == claim ? TrialKey::kTarget : TrialKey::kNontarget, "-"});
        }
      }
    }
    WriteEnrollment(layout.Enrollment(kSplits[split]), enroll);
    WriteAsvTrials(layout.AsvTrials(kSplits[split]), trials);
  }
  for (int split = 0; split < 4; ++split) WriteCmProtocol(layout.CmProtocol(kSplits[split]), cm[split]);

  std::string speakers_text;
  for (const std::string &s : train_speakers) speakers_text += s + "\n";
  WriteFileAtomic(layout.Speakers(), speakers_text);

  std::ostringstream m;
  m << "seed " << spec.seed << "\nspeakers " << spec.n_speakers << "\nutts_per_speaker " << spec.utts_per_speaker
    << "\ndev_speakers " << spec.n_dev_speakers << "\neval_speakers " << spec.n_eval_speakers
    << "\nduration_s " << spec.duration_s << "\ntransforms";
  for (SpoofTransform t : spec.spoof_transforms) m << " " << SpoofTransformName(t);
  m << "\nbonafide_files " << summary.bonafide_files << "\nspoof_files " << summary.spoof_files
    << "\ntrain_bonafide " << summary.train_bonafide << "\ntrain_spoof " << summary.train_spoof << "\n";
  WriteFileAtomic(layout.Manifest(), m.str());
  return summary;
}

std::vector<std::string> CorpusUtterances(const CorpusLayout &layout) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  auto add = [&](const std::string &u) {
    if (seen.insert(u).second) out.push_back(u);
  };
  for (const char *split : kSplits) {
    if (std::filesystem::exists(layout.CmProtocol(split)))
      for (const CmProtocolEntry &e : ReadCmProtocol(layout.CmProtocol(split))) add(e.utterance_id);
    if (std::filesystem::exists(layout.Enrollment(split)))
      for (const EnrollmentEntry &e : ReadEnrollment(layout.Enrollment(split)))
        for (const std::string &u : e.utterance_ids) add(u);
  }
  return out;
}

}  // namespace srasv
