// include/srasv/feat/wave-io.h

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

#ifndef SRASV_FEAT_WAVE_IO_H_
#define SRASV_FEAT_WAVE_IO_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace srasv {

constexpr int kSampleRate = 16000;

struct Waveform {
  std::vector<float> samples;  // in [-1, 1]
  int sample_rate = kSampleRate;
  std::string source_id;
};

/// Parses a RIFF/WAVE container holding 16-bit PCM mono audio at 16 kHz.
/// Samples are scaled by 1/32768. Throws kNotWav, kUnsupportedFormat or
/// kTruncated.
Waveform ParseWav(std::string_view bytes, const std::string &source_id = "");
Waveform ReadWav(const std::filesystem::path &path);

/// Canonical 44-byte-header encoding. Samples are rounded to int16 after
/// clamping to [-1, 32767/32768].
std::string EncodeWav(const Waveform &wave);
void WriteWav(const std::filesystem::path &path, const Waveform &wave);

}  // namespace srasv

#endif  // SRASV_FEAT_WAVE_IO_H_
