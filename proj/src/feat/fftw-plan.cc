// src/feat/fftw-plan.cc

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

#include "srasv/feat/fftw-plan.h"

#include <cstring>
#include <mutex>

namespace srasv {

namespace {
std::mutex &PlannerMutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFftPlan::RealFftPlan(int n) : n_(n) {
  FftwBuffer<double> in(n);
  FftwBuffer<fftw_complex> out(n / 2 + 1);
  std::lock_guard<std::mutex> lock(PlannerMutex());
  plan_ = fftw_plan_dft_r2c_1d(n, in.data(), out.data(), FFTW_ESTIMATE);
}

RealFftPlan::~RealFftPlan() {
  std::lock_guard<std::mutex> lock(PlannerMutex());
  fftw_destroy_plan(plan_);
}

void RealFftPlan::Forward(double *in, fftw_complex *out) const {
  fftw_execute_dft_r2c(plan_, in, out);
}

ComplexFftPlan::ComplexFftPlan(int n) : n_(n) {
  FftwBuffer<fftw_complex> in(n), out(n);
  std::lock_guard<std::mutex> lock(PlannerMutex());
  plan_ = fftw_plan_dft_1d(n, in.data(), out.data(), FFTW_FORWARD, FFTW_ESTIMATE);
}

ComplexFftPlan::~ComplexFftPlan() {
  std::lock_guard<std::mutex> lock(PlannerMutex());
  fftw_destroy_plan(plan_);
}

void ComplexFftPlan::Forward(const std::complex<double> *in,
                             std::complex<double> *out) const {
  FftwBuffer<fftw_complex> a(n_), b(n_);
  std::memcpy(a.data(), in, sizeof(fftw_complex) * n_);
  fftw_execute_dft(plan_, a.data(), b.data());
  std::memcpy(static_cast<void *>(out), b.data(), sizeof(fftw_complex) * n_);
}

}  // namespace srasv
