// include/srasv/net/tensor.h

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

#ifndef SRASV_NET_TENSOR_H_
#define SRASV_NET_TENSOR_H_

#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

#include <Eigen/Core>
#include <Eigen/StdVector>

#include "srasv/base/error.h"

namespace srasv {

/// Aligned storage; keeps vectorized Eigen reductions bitwise reproducible.
template <typename T>
using AlignedVector = std::vector<T, Eigen::aligned_allocator<T>>;

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense row-major tensor. Activations in the trunk use (N, C, H, W) with H
/// the frequency axis and W the time axis.
template <typename T>
struct Tensor {
  std::vector<int> shape;
  AlignedVector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> dims, T fill = T(0))
      : shape(std::move(dims)), data(NumElements(shape), fill) {}

  static std::size_t NumElements(const std::vector<int> &dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                           [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); });
  }
  int rank() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape.at(i); }
  std::size_t size() const { return data.size(); }
  T *ptr() { return data.data(); }
  const T *ptr() const { return data.data(); }
  bool Consistent() const { return NumElements(shape) == data.size(); }
};

}  // namespace srasv

#endif  // SRASV_NET_TENSOR_H_
