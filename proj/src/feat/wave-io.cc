// src/feat/wave-io.cc

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

#include "srasv/feat/wave-io.h"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "srasv/base/error.h"
#include "srasv/base/io.h"

namespace srasv {

Waveform ParseWav(std::string_view bytes, const std::string &source_id) {
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" ||
      bytes.substr(8, 4) != "WAVE")
    throw Error(Errc::kNotWav, "missing RIFF/WAVE magic in '" + source_id + "'");

  ByteReader reader(bytes, Errc::kTruncated);
  reader.GetBytes(12);
  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  while (reader.remaining() >= 8) {
    std::string_view id = reader.GetBytes(4);
    std::uint32_t size = reader.Get<std::uint32_t>();
    if (id == "fmt ") {
      if (size < 16) throw Error(Errc::kUnsupportedFormat, "short fmt chunk");
      std::string_view fmt = reader.GetBytes(size);
      ByteReader f(fmt, Errc::kTruncated);
      format = f.Get<std::uint16_t>();
      channels = f.Get<std::uint16_t>();
      rate = f.Get<std::uint32_t>();
      f.Get<std::uint32_t>();  // byte rate
      f.Get<std::uint16_t>();  // block align
      bits = f.Get<std::uint16_t>();
      have_fmt = true;
      if (size % 2 == 1 && reader.remaining() > 0) reader.GetBytes(1);
    } else if (id == "data") {
      if (!have_fmt)
        throw Error(Errc::kUnsupportedFormat, "data chunk before fmt chunk");
      if (format != 1 || channels != 1 || bits != 16 || rate != kSampleRate)
        throw Error(Errc::kUnsupportedFormat,
                    "need 16-bit PCM mono 16 kHz, got format=" +
                        std::to_string(format) + " channels=" +
                        std::to_string(channels) + " bits=" +
                        std::to_string(bits) + " rate=" + std::to_string(rate));
      if (size > reader.remaining())
        throw Error(Errc::kTruncated, "data chunk declares " + std::to_string(size) +
                                          " bytes, " + std::to_string(reader.remaining()) +
                                          " present");
      std::string_view pcm = reader.GetBytes(size);
      Waveform wave;
      wave.source_id = source_id;
      wave.sample_rate = static_cast<int>(rate);
      wave.samples.resize(size / 2);
      for (std::size_t i = 0; i < wave.samples.size(); ++i) {
        std::int16_t v;
        std::memcpy(&v, pcm.data() + 2 * i, 2);
        wave.samples[i] = static_cast<float>(v) / 32768.0f;
      }
      return wave;
    } else {
      if (size > reader.remaining())
        throw Error(Errc::kTruncated, "chunk overruns file");
      reader.GetBytes(size);
      if (size % 2 == 1 && reader.remaining() > 0) reader.GetBytes(1);
    }
  }
  throw Error(have_fmt ? Errc::kTruncated : Errc::kUnsupportedFormat,
              "no data chunk in '" + source_id + "'");
}

Waveform ReadWav(const std::filesystem::path &path) {
  return ParseWav(ReadFileBytes(path), path.stem().string());
}

std::string EncodeWav(const Waveform &wave) {
  if (wave.sample_rate != kSampleRate)
    throw Error(Errc::kUnsupportedFormat, "only 16 kHz output is supported");
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(wave.samples.size() * 2);
  ByteWriter w;
  w.PutBytes("RIFF");
  w.Put<std::uint32_t>(36 + data_bytes);
  w.PutBytes("WAVE");
  w.PutBytes("fmt ");
  w.Put<std::uint32_t>(16);
  w.Put<std::uint16_t>(1);
  w.Put<std::uint16_t>(1);
  w.Put<std::uint32_t>(kSampleRate);
  w.Put<std::uint32_t>(kSampleRate * 2);
  w.Put<std::uint16_t>(2);
  w.Put<std::uint16_t>(16);
  w.PutBytes("data");
  w.Put<std::uint32_t>(data_bytes);
  for (float s : wave.samples) {
    double scaled = std::round(static_cast<double>(s) * 32768.0);
    scaled = std::clamp(scaled, -32768.0, 32767.0);
    w.Put<std::int16_t>(static_cast<std::int16_t>(scaled));
  }
  return w.bytes();
}

void WriteWav(const std::filesystem::path &path, const Waveform &wave) {
  WriteFileAtomic(path, EncodeWav(wave));
}

}  // namespace srasv
