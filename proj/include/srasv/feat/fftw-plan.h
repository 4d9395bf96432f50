// include/srasv/feat/fftw-plan.h

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

#ifndef SRASV_FEAT_FFTW_PLAN_H_
#define SRASV_FEAT_FFTW_PLAN_H_

#include <fftw3.h>

#include <complex>
#include <cstddef>

namespace srasv {

/// Aligned scratch array owned through fftw_malloc.
template <typename T>
class FftwBuffer {
 public:
  explicit FftwBuffer(std::size_t n)
      : data_(static_cast<T *>(fftw_malloc(sizeof(T) * n))) {}
  ~FftwBuffer() { fftw_free(data_); }
  FftwBuffer(const FftwBuffer &) = delete;
  FftwBuffer &operator=(const FftwBuffer &) = delete;
  T *data() { return data_; }
  T &operator[](std::size_t i) { return data_[i]; }

 private:
  T *data_;
};

/// Real-to-complex forward plan of size n. Planning is serialized; execution
/// through Forward() uses the new-array interface and is thread-safe.
class RealFftPlan {
 public:
  explicit RealFftPlan(int n);
  ~RealFftPlan();
  RealFftPlan(const RealFftPlan &) = delete;
  RealFftPlan &operator=(const RealFftPlan &) = delete;
  int size() const { return n_; }
  void Forward(double *in, fftw_complex *out) const;

 private:
  int n_;
  fftw_plan plan_;
};

class ComplexFftPlan {
 public:
  explicit ComplexFftPlan(int n);
  ~ComplexFftPlan();
  ComplexFftPlan(const ComplexFftPlan &) = delete;
  ComplexFftPlan &operator=(const ComplexFftPlan &) = delete;
  void Forward(const std::complex<double> *in, std::complex<double> *out) const;

 private:
  int n_;
  fftw_plan plan_;
};

}  // namespace srasv

#endif  // SRASV_FEAT_FFTW_PLAN_H_
