// src/feat/feature-llfb.cc

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

#include "srasv/feat/feature-llfb.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "srasv/base/error.h"
#include "srasv/feat/fftw-plan.h"

namespace srasv {

int LlfbOptions::FrameLength() const {
  return static_cast<int>(std::lround(frame_length_ms * 1e-3 * sample_rate));
}

int LlfbOptions::FrameShift() const {
  return static_cast<int>(std::lround(frame_shift_ms * 1e-3 * sample_rate));
}

LlfbComputer::LlfbComputer(const LlfbOptions &opts) : opts_(opts) {
  const int frame = opts_.FrameLength();
  if (frame < 2 || opts_.FrameShift() < 1 || opts_.fft_size < frame ||
      opts_.num_filters < 1)
    throw Error(Errc::kBadConfig, "invalid LLFB framing");
  window_.resize(frame);
  for (int i = 0; i < frame; ++i)
    window_[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (frame - 1));

  const int num_bins = opts_.fft_size / 2 + 1;
  const double spacing = opts_.sample_rate / 2.0 / (opts_.num_filters + 1);
  weights_.assign(opts_.num_filters, std::vector<double>(num_bins, 0.0));
  for (int f = 0; f < opts_.num_filters; ++f) {
    const double left = f * spacing, center = (f + 1) * spacing,
                 right = (f + 2) * spacing;
    for (int b = 0; b < num_bins; ++b) {
      const double hz = b * opts_.sample_rate / opts_.fft_size;
      double w = 0.0;
      if (hz > left && hz <= center)
        w = (hz - left) / (center - left);
      else if (hz > center && hz < right)
        w = (right - hz) / (right - center);
      weights_[f][b] = w;
    }
  }
  plan_ = std::make_unique<RealFftPlan>(opts_.fft_size);
}

LlfbComputer::~LlfbComputer() = default;

int LlfbComputer::NumFrames(std::size_t num_samples) const {
  const std::size_t frame = opts_.FrameLength();
  if (num_samples < frame) return 0;
  return static_cast<int>((num_samples - frame) / opts_.FrameShift() + 1);
}

double LlfbComputer::FilterCenter(int filter) const {
  return (filter + 1) * opts_.sample_rate / 2.0 / (opts_.num_filters + 1);
}

FeatureMatrix LlfbComputer::Compute(const Waveform &wave) const {
  const int frames = NumFrames(wave.samples.size());
  if (frames == 0)
    throw Error(Errc::kTooShort, "LLFB needs at least one " +
                                     std::to_string(opts_.FrameLength()) +
                                     "-sample frame");
  const int n = opts_.fft_size;
  const int frame = opts_.FrameLength();
  const int shift = opts_.FrameShift();
  const int num_bins = n / 2 + 1;
  FftwBuffer<double> in(n);
  FftwBuffer<fftw_complex> out(num_bins);
  std::vector<double> power(num_bins);
  FeatureMatrix feats(opts_.num_filters, frames);
  for (int t = 0; t < frames; ++t) {
    const std::size_t start = static_cast<std::size_t>(t) * shift;
    for (int i = 0; i < n; ++i)
      in[i] = i < frame ? window_[i] * wave.samples[start + i] : 0.0;
    plan_->Forward(in.data(), out.data());
    for (int b = 0; b < num_bins; ++b)
      power[b] = out[b][0] * out[b][0] + out[b][1] * out[b][1];
    for (int f = 0; f < opts_.num_filters; ++f) {
      double energy = 0.0;
      const std::vector<double> &w = weights_[f];
      for (int b = 0; b < num_bins; ++b) energy += w[b] * power[b];
      feats(f, t) = static_cast<float>(std::log(energy + opts_.log_floor));
    }
  }
  return feats;
}

FeatureMatrix ComputeLlfb(const Waveform &wave, const LlfbOptions &opts) {
  LlfbComputer computer(opts);
  return computer.Compute(wave);
}

}  // namespace srasv
