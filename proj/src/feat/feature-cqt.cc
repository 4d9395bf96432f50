// src/feat/feature-cqt.cc

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

#include "srasv/feat/feature-cqt.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "srasv/base/error.h"
#include "srasv/feat/fftw-plan.h"

namespace srasv {

double CqtOptions::FMin() const { return FMax() / std::ldexp(1.0, octaves); }

double CqtOptions::Gamma() const {
  const double b = bins_per_octave;
  return 228.7 * (std::pow(2.0, 1.0 / b) - std::pow(2.0, -1.0 / b));
}

double CqtOptions::CenterFrequency(int bin) const {
  return FMin() * std::pow(2.0, static_cast<double>(bin) / bins_per_octave);
}

double CqtOptions::QualityFactor() const {
  return 1.0 / (std::pow(2.0, 1.0 / bins_per_octave) - 1.0);
}

int CqtOptions::WindowLength(int bin) const {
  const double b = bins_per_octave;
  const double alpha = std::pow(2.0, 1.0 / b) - std::pow(2.0, -1.0 / b);
  const double len =
      QualityFactor() * sample_rate / (CenterFrequency(bin) + Gamma() / alpha);
  return std::max(2, static_cast<int>(std::lround(len)));
}

int CqtOptions::HopSamples() const {
  return static_cast<int>(std::lround(hop_seconds * sample_rate));
}

CqtComputer::CqtComputer(const CqtOptions &opts) : opts_(opts) {
  if (opts_.octaves < 1 || opts_.bins_per_octave < 1 || opts_.HopSamples() < 1)
    throw Error(Errc::kBadConfig, "invalid CQT geometry");
  const int num_bins = opts_.NumBins();
  longest_window_ = 0;
  for (int k = 0; k < num_bins; ++k)
    longest_window_ = std::max(longest_window_, opts_.WindowLength(k));
  fft_size_ = 1;
  while (fft_size_ < longest_window_) fft_size_ *= 2;

  const int n = fft_size_;
  ComplexFftPlan c2c(n);
  std::vector<std::complex<double>> temporal(n), spectral(n);
  kernels_.resize(num_bins);
  for (int k = 0; k < num_bins; ++k) {
    const int len = opts_.WindowLength(k);
    const double fk = opts_.CenterFrequency(k);
    std::fill(temporal.begin(), temporal.end(), std::complex<double>(0.0, 0.0));
    const int start = n / 2 - len / 2;
    double wsum = 0.0;
    for (int i = 0; i < len; ++i)
      wsum += 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / len);
    for (int i = 0; i < len; ++i) {
      const int p = start + i;
      const double w = (0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / len)) / wsum;
      const double phase = 2.0 * std::numbers::pi * fk * (p - n / 2) / opts_.sample_rate;
      temporal[p] = std::polar(w, phase);
    }
    c2c.Forward(temporal.data(), spectral.data());
    double peak = 0.0;
    for (const auto &v : spectral) peak = std::max(peak, std::abs(v));
    SparseKernel &kern = kernels_[k];
    for (int j = 0; j < n; ++j) {
      if (std::abs(spectral[j]) > opts_.sparsity * peak) {
        kern.index.push_back(j);
        kern.weight.push_back(std::conj(spectral[j]) / static_cast<double>(n));
      }
    }
  }
  plan_ = std::make_unique<RealFftPlan>(n);
}

CqtComputer::~CqtComputer() = default;

int CqtComputer::NumFrames(std::size_t num_samples) const {
  return std::max<int>(1, static_cast<int>(num_samples / opts_.HopSamples()));
}

std::vector<std::complex<double>> CqtComputer::FrameCoefficients(
    const std::vector<double> &signal, long center) const {
  const int n = fft_size_;
  FftwBuffer<double> in(n);
  FftwBuffer<fftw_complex> out(n / 2 + 1);
  const long start = center - n / 2;
  const long len = static_cast<long>(signal.size());
  for (int i = 0; i < n; ++i) {
    const long p = start + i;
    in[i] = (p >= 0 && p < len) ? signal[p] : 0.0;
  }
  plan_->Forward(in.data(), out.data());
  std::vector<std::complex<double>> coeffs(kernels_.size());
  for (std::size_t k = 0; k < kernels_.size(); ++k) {
    const SparseKernel &kern = kernels_[k];
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t e = 0; e < kern.index.size(); ++e) {
      const int j = kern.index[e];
      std::complex<double> x;
      if (j <= n / 2)
        x = {out[j][0], out[j][1]};
      else
        x = {out[n - j][0], -out[n - j][1]};
      acc += x * kern.weight[e];
    }
    coeffs[k] = acc;
  }
  return coeffs;
}

FeatureMatrix CqtComputer::Compute(const Waveform &wave) const {
  if (wave.samples.size() < static_cast<std::size_t>(longest_window_))
    throw Error(Errc::kTooShort,
                "CQT needs at least " + std::to_string(longest_window_) +
                    " samples, got " + std::to_string(wave.samples.size()));
  std::vector<double> signal(wave.samples.begin(), wave.samples.end());
  const int frames = NumFrames(signal.size());
  const int hop = opts_.HopSamples();
  FeatureMatrix out(opts_.NumBins(), frames);
  for (int t = 0; t < frames; ++t) {
    const long center = static_cast<long>(t) * hop + hop / 2;
    std::vector<std::complex<double>> coeffs = FrameCoefficients(signal, center);
    for (int k = 0; k < opts_.NumBins(); ++k)
      out(k, t) = static_cast<float>(std::log(std::abs(coeffs[k]) + opts_.log_floor));
  }
  return out;
}

FeatureMatrix ComputeCqt(const Waveform &wave, const CqtOptions &opts) {
  CqtComputer computer(opts);
  return computer.Compute(wave);
}

}  // namespace srasv
