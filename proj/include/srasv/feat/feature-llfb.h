// include/srasv/feat/feature-llfb.h

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

#ifndef SRASV_FEAT_FEATURE_LLFB_H_
#define SRASV_FEAT_FEATURE_LLFB_H_

#include <memory>
#include <vector>

#include "srasv/feat/feature-types.h"
#include "srasv/feat/wave-io.h"

namespace srasv {

class RealFftPlan;

struct LlfbOptions {
  double sample_rate = kSampleRate;
  int num_filters = 80;
  double frame_length_ms = 20.0;
  double frame_shift_ms = 10.0;
  int fft_size = 512;
  double log_floor = 1e-10;

  int FrameLength() const;
  int FrameShift() const;
};

/// Log linear-filterbank energies: Hamming-windowed frames, power spectrum,
/// triangular filters with centres equally spaced over [0, Nyquist].
class LlfbComputer {
 public:
  explicit LlfbComputer(const LlfbOptions &opts);
  ~LlfbComputer();
  LlfbComputer(const LlfbComputer &) = delete;
  LlfbComputer &operator=(const LlfbComputer &) = delete;

  const LlfbOptions &options() const { return opts_; }
  /// (len - frame) / shift + 1; zero when the signal is shorter than a frame.
  int NumFrames(std::size_t num_samples) const;
  /// Filter i peaks at (i + 1) * Nyquist / (num_filters + 1).
  double FilterCenter(int filter) const;
  /// Weight of filter `filter` on FFT bin `bin`.
  double FilterWeight(int filter, int bin) const { return weights_[filter][bin]; }

  FeatureMatrix Compute(const Waveform &wave) const;

 private:
  LlfbOptions opts_;
  std::vector<double> window_;
  std::vector<std::vector<double>> weights_;  // num_filters x (fft/2 + 1)
  std::unique_ptr<RealFftPlan> plan_;
};

FeatureMatrix ComputeLlfb(const Waveform &wave, const LlfbOptions &opts = {});

}  // namespace srasv

#endif  // SRASV_FEAT_FEATURE_LLFB_H_
