// include/srasv/feat/feature-cqt.h

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

#ifndef SRASV_FEAT_FEATURE_CQT_H_
#define SRASV_FEAT_FEATURE_CQT_H_

#include <complex>
#include <memory>
#include <vector>

#include "srasv/feat/feature-types.h"
#include "srasv/feat/wave-io.h"

namespace srasv {

class RealFftPlan;

/// Constant-Q analysis grid. The defaults give 9 octaves x 96 bins = 864
/// rows between Nyquist/512 and Nyquist, one column every 8 ms.
struct CqtOptions {
  double sample_rate = kSampleRate;
  int octaves = 9;
  int bins_per_octave = 96;
  double hop_seconds = 0.008;
  // Coefficient re-sampling period of the reference toolkit. Kept for
  // bookkeeping; the frame hop is set by hop_seconds.
  int resample_period = 16;
  double log_floor = 1e-10;
  // Spectral-kernel entries below this fraction of the kernel peak are
  // dropped.
  double sparsity = 1e-3;

  double FMax() const { return sample_rate / 2.0; }
  double FMin() const;
  int NumBins() const { return octaves * bins_per_octave; }
  /// 228.7 * (2^(1/B) - 2^(-1/B)): the bandwidth offset that widens the
  /// low-frequency bins.
  double Gamma() const;
  double CenterFrequency(int bin) const;
  double QualityFactor() const;
  /// Hann window length of a bin: Q * fs / (f_k + gamma / alpha).
  int WindowLength(int bin) const;
  int HopSamples() const;
};

/// Brown-Puckette constant-Q transform with precomputed sparse spectral
/// kernels. Construction is the expensive part; Compute() is const and safe
/// to call concurrently.
class CqtComputer {
 public:
  explicit CqtComputer(const CqtOptions &opts);
  ~CqtComputer();
  CqtComputer(const CqtComputer &) = delete;
  CqtComputer &operator=(const CqtComputer &) = delete;

  const CqtOptions &options() const { return opts_; }
  int FftSize() const { return fft_size_; }
  int LongestWindow() const { return longest_window_; }
  int NumFrames(std::size_t num_samples) const;

  /// Log-magnitude CQT, NumBins() x NumFrames(). Throws kTooShort when the
  /// waveform is shorter than the longest analysis window.
  FeatureMatrix Compute(const Waveform &wave) const;

  /// Linear complex coefficients of bin `bin` for the frame centred at
  /// `center`; used by the log-magnitude path and exposed for inspection.
  std::vector<std::complex<double>> FrameCoefficients(
      const std::vector<double> &signal, long center) const;

 private:
  struct SparseKernel {
    std::vector<int> index;
    std::vector<std::complex<double>> weight;  // conj(K[j]) / N_fft
  };

  CqtOptions opts_;
  int fft_size_ = 0;
  int longest_window_ = 0;
  std::vector<SparseKernel> kernels_;
  std::unique_ptr<RealFftPlan> plan_;
};

/// Convenience wrapper building a one-shot CqtComputer.
FeatureMatrix ComputeCqt(const Waveform &wave, const CqtOptions &opts = {});

}  // namespace srasv

#endif  // SRASV_FEAT_FEATURE_CQT_H_
