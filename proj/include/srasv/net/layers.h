// include/srasv/net/layers.h

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

#ifndef SRASV_NET_LAYERS_H_
#define SRASV_NET_LAYERS_H_

// Per-sample building blocks of the residual MFM trunk. Activations are laid
// out channel-major (C x H x W) and every routine works on one sample.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "srasv/net/tensor.h"

namespace srasv {

struct ConvGeometry {
  int in_channels = 1;
  int out_channels = 1;
  int kernel = 3;
  int stride = 1;
  int pad = 1;
  int in_h = 1;
  int in_w = 1;

  int OutH() const { return (in_h + 2 * pad - kernel) / stride + 1; }
  int OutW() const { return (in_w + 2 * pad - kernel) / stride + 1; }
  bool Pointwise() const { return kernel == 1 && stride == 1 && pad == 0; }
  int PatchSize() const { return in_channels * kernel * kernel; }
};

template <typename T>
void Im2Col(const T *in, const ConvGeometry &g, T *col) {
  const int oh = g.OutH(), ow = g.OutW(), k = g.kernel;
  const int positions = oh * ow;
  for (int c = 0; c < g.in_channels; ++c) {
    const T *plane = in + static_cast<std::size_t>(c) * g.in_h * g.in_w;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        T *row = col + static_cast<std::size_t>((c * k + ky) * k + kx) * positions;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * g.stride - g.pad + ky;
          T *dst = row + static_cast<std::size_t>(oy) * ow;
          if (iy < 0 || iy >= g.in_h) {
            std::fill(dst, dst + ow, T(0));
            continue;
          }
          const T *src = plane + static_cast<std::size_t>(iy) * g.in_w;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * g.stride - g.pad + kx;
            dst[ox] = (ix >= 0 && ix < g.in_w) ? src[ix] : T(0);
          }
        }
      }
    }
  }
}

/// Accumulates the column buffer back onto the input gradient.
template <typename T>
void Col2ImAdd(const T *col, const ConvGeometry &g, T *din) {
  const int oh = g.OutH(), ow = g.OutW(), k = g.kernel;
  const int positions = oh * ow;
  for (int c = 0; c < g.in_channels; ++c) {
    T *plane = din + static_cast<std::size_t>(c) * g.in_h * g.in_w;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const T *row = col + static_cast<std::size_t>((c * k + ky) * k + kx) * positions;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * g.stride - g.pad + ky;
          if (iy < 0 || iy >= g.in_h) continue;
          const T *src = row + static_cast<std::size_t>(oy) * ow;
          T *dst = plane + static_cast<std::size_t>(iy) * g.in_w;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * g.stride - g.pad + kx;
            if (ix >= 0 && ix < g.in_w) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

/// out (Cout x OH*OW) = W (Cout x Cin*k*k) * im2col(in) + bias.
template <typename T>
void ConvForward(const T *in, const ConvGeometry &g, const T *weight, const T *bias,
                 T *out, AlignedVector<T> *scratch) {
  using Map = Eigen::Map<const RowMatrix<T>>;
  const int positions = g.OutH() * g.OutW();
  const T *col = in;
  if (!g.Pointwise()) {
    scratch->resize(static_cast<std::size_t>(g.PatchSize()) * positions);
    Im2Col(in, g, scratch->data());
    col = scratch->data();
  }
  Map w(weight, g.out_channels, g.PatchSize());
  Map c(col, g.PatchSize(), positions);
  Eigen::Map<RowMatrix<T>> o(out, g.out_channels, positions);
  o.noalias() = w * c;
  for (int oc = 0; oc < g.out_channels; ++oc) o.row(oc).array() += bias[oc];
}

/// Accumulates weight/bias gradients and writes (not adds) the input gradient.
template <typename T>
void ConvBackward(const T *in, const ConvGeometry &g, const T *weight, const T *dout,
                  T *din, T *dweight, T *dbias, AlignedVector<T> *scratch) {
  using Map = Eigen::Map<const RowMatrix<T>>;
  const int positions = g.OutH() * g.OutW();
  const std::size_t patch_elems = static_cast<std::size_t>(g.PatchSize()) * positions;
  Map w(weight, g.out_channels, g.PatchSize());
  Map d(dout, g.out_channels, positions);
  Eigen::Map<RowMatrix<T>> dw(dweight, g.out_channels, g.PatchSize());
  for (int oc = 0; oc < g.out_channels; ++oc) dbias[oc] += d.row(oc).sum();
  if (g.Pointwise()) {
    Map c(in, g.PatchSize(), positions);
    dw.noalias() += d * c.transpose();
    if (din) {
      Eigen::Map<RowMatrix<T>> dc(din, g.PatchSize(), positions);
      dc.noalias() = w.transpose() * d;
    }
    return;
  }
  scratch->resize(patch_elems);
  Im2Col(in, g, scratch->data());
  {
    Map c(scratch->data(), g.PatchSize(), positions);
    dw.noalias() += d * c.transpose();
  }
  if (din) {
    Eigen::Map<RowMatrix<T>> dc(scratch->data(), g.PatchSize(), positions);
    dc.noalias() = w.transpose() * d;
    std::fill(din, din + static_cast<std::size_t>(g.in_channels) * g.in_h * g.in_w, T(0));
    Col2ImAdd(scratch->data(), g, din);
  }
}

/// Max-Feature-Map over paired channel halves: out[c] = max(in[c], in[c+k]).
/// Ties select the first half; `first_wins` records the choice.
template <typename T>
void MfmForward(const T *in, int channels, std::size_t plane, T *out,
                std::uint8_t *first_wins) {
  const int k = channels / 2;
  const std::size_t n = static_cast<std::size_t>(k) * plane;
  const T *a = in;
  const T *b = in + n;
  for (std::size_t i = 0; i < n; ++i) {
    const bool first = a[i] >= b[i];
    out[i] = first ? a[i] : b[i];
    if (first_wins) first_wins[i] = first ? 1 : 0;
  }
}

template <typename T>
void MfmBackward(const T *dout, int channels, std::size_t plane,
                 const std::uint8_t *first_wins, T *din) {
  const int k = channels / 2;
  const std::size_t n = static_cast<std::size_t>(k) * plane;
  for (std::size_t i = 0; i < n; ++i) {
    din[i] = first_wins[i] ? dout[i] : T(0);
    din[i + n] = first_wins[i] ? T(0) : dout[i];
  }
}

/// Tensor-level MFM on (N, 2k, H, W) or (N, 2k). Throws kOddChannels.
template <typename T>
Tensor<T> Mfm(const Tensor<T> &in) {
  if (in.rank() < 2) throw Error(Errc::kShapeMismatch, "MFM needs a channel axis");
  const int channels = in.dim(1);
  if (channels % 2 != 0)
    throw Error(Errc::kOddChannels, "MFM over " + std::to_string(channels) + " channels");
  std::vector<int> shape = in.shape;
  shape[1] = channels / 2;
  Tensor<T> out(shape);
  std::size_t plane = 1;
  for (int i = 2; i < in.rank(); ++i) plane *= in.dim(i);
  const std::size_t per_in = channels * plane, per_out = per_in / 2;
  for (int n = 0; n < in.dim(0); ++n)
    MfmForward(in.ptr() + n * per_in, channels, plane, out.ptr() + n * per_out,
               static_cast<std::uint8_t *>(nullptr));
  return out;
}

template <typename T>
inline T LeakyRelu(T x, T slope) {
  return x > T(0) ? x : slope * x;
}

}  // namespace srasv

#endif  // SRASV_NET_LAYERS_H_
