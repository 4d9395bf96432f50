// src/net/network.cc

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

#include "srasv/net/network.h"

#include <cmath>
#include <random>

namespace srasv {

namespace {

int HalveCeil(int n) { return (n - 1) / 2 + 1; }

std::string Join(const std::vector<int> &v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

NetConfig NetConfig::FromConfig(const KvConfig &cfg) {
  NetConfig c;
  c.input_rows = static_cast<int>(cfg.GetInt("net.input_rows", c.input_rows));
  c.input_cols = static_cast<int>(cfg.GetInt("net.input_cols", c.input_cols));
  c.input_kind = ParseFeatureKind(cfg.GetString("net.input_kind", FeatureKindName(c.input_kind)));
  c.block_filters = cfg.GetIntList("net.filters", c.block_filters);
  c.sd_hidden = cfg.GetIntList("net.sd_hidden", c.sd_hidden);
  c.asv_hidden = cfg.GetIntList("net.asv_hidden", c.asv_hidden);
  c.n_speakers = static_cast<int>(cfg.GetInt("net.n_speakers", c.n_speakers));
  c.sd_enabled = cfg.GetBool("net.sd_head", c.sd_enabled);
  c.asv_enabled = cfg.GetBool("net.asv_head", c.asv_enabled);
  c.sd_normalized_output = cfg.GetBool("net.sd_normalized_output", c.sd_normalized_output);
  c.asv_normalized_output = cfg.GetBool("net.asv_normalized_output", c.asv_normalized_output);
  c.dropout = static_cast<float>(cfg.GetDouble("net.dropout", c.dropout));
  c.lrelu_slope = static_cast<float>(cfg.GetDouble("net.lrelu_slope", c.lrelu_slope));
  c.bn_momentum = static_cast<float>(cfg.GetDouble("net.bn_momentum", c.bn_momentum));
  c.bn_eps = static_cast<float>(cfg.GetDouble("net.bn_eps", c.bn_eps));
  return c;
}

int NetConfig::TrunkOutputDim() const {
  int w = input_cols;
  for (std::size_t i = 0; i < block_filters.size(); ++i) w = HalveCeil(w);
  return w * (block_filters.empty() ? 1 : block_filters.back() / 2);
}

std::size_t ParamCountReport::Get(const std::string &layer) const {
  for (const auto &[name, n] : layers)
    if (name == layer) return n;
  throw Error(Errc::kShapeMismatch, "no layer named " + layer);
}

template <typename T>
MtlNetwork<T>::MtlNetwork(const NetConfig &cfg) : cfg_(cfg) {
  if (cfg_.block_filters.empty())
    throw Error(Errc::kShapeMismatch, "network needs at least one residual block");
  if (cfg_.input_rows < 1 || cfg_.input_cols < 1)
    throw Error(Errc::kShapeMismatch, "input geometry must be positive");
  if (!cfg_.sd_enabled && !cfg_.asv_enabled)
    throw Error(Errc::kShapeMismatch, "at least one head must be enabled");
  if (cfg_.dropout < 0.0f || cfg_.dropout >= 1.0f)
    throw Error(Errc::kBadConfig, "dropout must lie in [0, 1)");
  int in_ch = 1;
  for (std::size_t b = 0; b < cfg_.block_filters.size(); ++b) {
    const int f = cfg_.block_filters[b];
    if (f < 2 || f % 2 != 0)
      throw Error(Errc::kOddChannels, "block filters must be even: " + Join(cfg_.block_filters));
    const std::string p = "block" + std::to_string(b + 1) + ".";
    BlockRef ref;
    ref.entry = AddConv(p + "entry", in_ch, f, 3, 2, 1);
    ref.bn[0] = AddBn(p + "bn1", f / 2);
    ref.conv[0] = AddConv(p + "nin1", f / 2, f, 1, 1, 0);
    ref.bn[1] = AddBn(p + "bn2", f / 2);
    ref.conv[1] = AddConv(p + "conv", f / 2, f, 3, 1, 1);
    ref.bn[2] = AddBn(p + "bn3", f / 2);
    ref.conv[2] = AddConv(p + "nin2", f / 2, f, 1, 1, 0);
    blocks_.push_back(ref);
    in_ch = f / 2;
  }
  sd_ = BuildHead("sd", cfg_.sd_enabled, cfg_.sd_normalized_output, cfg_.sd_hidden, 2);
  asv_ = BuildHead("asv", cfg_.asv_enabled, cfg_.asv_normalized_output, cfg_.asv_hidden,
                   cfg_.n_speakers);
}

template <typename T>
int MtlNetwork<T>::AddParam(const std::string &name, std::vector<int> shape, ParamRole role) {
  Param<T> p;
  p.name = name;
  p.value.assign(Tensor<T>::NumElements(shape), T(0));
  p.shape = std::move(shape);
  p.role = role;
  params_.push_back(std::move(p));
  return static_cast<int>(params_.size()) - 1;
}

template <typename T>
typename MtlNetwork<T>::ConvRef MtlNetwork<T>::AddConv(const std::string &prefix, int in,
                                                       int out, int kernel, int stride,
                                                       int pad) {
  ConvRef c;
  c.weight = AddParam(prefix + ".weight", {out, in, kernel, kernel}, ParamRole::kWeight);
  c.bias = AddParam(prefix + ".bias", {out}, ParamRole::kBias);
  c.in_channels = in;
  c.out_channels = out;
  c.kernel = kernel;
  c.stride = stride;
  c.pad = pad;
  return c;
}

template <typename T>
typename MtlNetwork<T>::BnRef MtlNetwork<T>::AddBn(const std::string &prefix, int channels) {
  BnRef b;
  b.scale = AddParam(prefix + ".scale", {channels}, ParamRole::kBnScale);
  b.shift = AddParam(prefix + ".shift", {channels}, ParamRole::kBnShift);
  b.mean = AddParam(prefix + ".running_mean", {channels}, ParamRole::kBnRunningMean);
  b.var = AddParam(prefix + ".running_var", {channels}, ParamRole::kBnRunningVar);
  b.channels = channels;
  params_[b.var].value.assign(channels, T(1));
  params_[b.scale].value.assign(channels, T(1));
  return b;
}

template <typename T>
typename MtlNetwork<T>::FcRef MtlNetwork<T>::AddFc(const std::string &prefix, int in, int out) {
  FcRef f;
  f.weight = AddParam(prefix + ".weight", {out, in}, ParamRole::kWeight);
  f.bias = AddParam(prefix + ".bias", {out}, ParamRole::kBias);
  f.in = in;
  f.out = out;
  return f;
}

template <typename T>
typename MtlNetwork<T>::HeadRef MtlNetwork<T>::BuildHead(const std::string &name, bool enabled,
                                                         bool normalized,
                                                         const std::vector<int> &hidden,
                                                         int classes) {
  HeadRef h;
  h.enabled = enabled;
  h.normalized = normalized;
  if (!enabled) return h;
  if (hidden.empty()) throw Error(Errc::kShapeMismatch, name + " head needs a hidden layer");
  if (classes < 2) throw Error(Errc::kShapeMismatch, name + " head needs >= 2 classes");
  int in = cfg_.TrunkOutputDim();
  for (std::size_t l = 0; l < hidden.size(); ++l) {
    h.hidden.push_back(AddFc(name + ".fc" + std::to_string(l + 1), in, hidden[l]));
    in = hidden[l];
  }
  h.output = AddFc(name + ".out", in, classes);
  return h;
}

template <typename T>
int MtlNetwork<T>::FindParam(const std::string &name) const {
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (params_[i].name == name) return static_cast<int>(i);
  return -1;
}

template <typename T>
void MtlNetwork<T>::InitParams(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (Param<T> &p : params_) {
    switch (p.role) {
      case ParamRole::kWeight: {
        std::size_t fan_in = 1;
        for (std::size_t d = 1; d < p.shape.size(); ++d) fan_in *= p.shape[d];
        std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / fan_in));
        for (T &v : p.value) v = static_cast<T>(normal(rng));
        break;
      }
      case ParamRole::kBnScale:
      case ParamRole::kBnRunningVar:
        std::fill(p.value.begin(), p.value.end(), T(1));
        break;
      default:
        std::fill(p.value.begin(), p.value.end(), T(0));
    }
  }
}

template <typename T>
ConvGeometry MtlNetwork<T>::Geometry(const ConvRef &c, int h, int w) const {
  ConvGeometry g;
  g.in_channels = c.in_channels;
  g.out_channels = c.out_channels;
  g.kernel = c.kernel;
  g.stride = c.stride;
  g.pad = c.pad;
  g.in_h = h;
  g.in_w = w;
  return g;
}

template <typename T>
Tensor<T> MtlNetwork<T>::BlockForward(const BlockRef &b, const Tensor<T> &x, Mode mode,
                                      BlockTrace<T> *trace) const {
  const int n = x.dim(0), h = x.dim(2), w = x.dim(3);
  const ConvGeometry ge = Geometry(b.entry, h, w);
  const int oh = ge.OutH(), ow = ge.OutW();
  const int f = b.entry.out_channels, k = f / 2;
  const std::size_t plane = static_cast<std::size_t>(oh) * ow;
  const std::size_t per_half = k * plane, per_full = f * plane;
  const T slope = static_cast<T>(cfg_.lrelu_slope);
  const T eps = static_cast<T>(cfg_.bn_eps);

  AlignedVector<T> scratch, pre(per_full);
  Tensor<T> entry({n, k, oh, ow});
  if (trace) {
    trace->input = x;
    trace->entry_mask.resize(n * per_half);
  }
  const std::size_t in_stride = static_cast<std::size_t>(x.dim(1)) * h * w;
  for (int i = 0; i < n; ++i) {
    ConvForward(x.ptr() + i * in_stride, ge, params_[b.entry.weight].value.data(),
                params_[b.entry.bias].value.data(), pre.data(), &scratch);
    MfmForward(pre.data(), f, plane, entry.ptr() + i * per_half,
               trace ? trace->entry_mask.data() + i * per_half : nullptr);
  }

  Tensor<T> hcur = entry;
  Tensor<T> act({n, k, oh, ow});
  for (int s = 0; s < 3; ++s) {
    const BnRef &bn = b.bn[s];
    const T *gamma = params_[bn.scale].value.data();
    const T *beta = params_[bn.shift].value.data();
    std::vector<T> mean(k), var(k), inv(k);
    if (mode == Mode::kTrain) {
      const double m = static_cast<double>(n) * plane;
      for (int c = 0; c < k; ++c) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
          const T *p = hcur.ptr() + i * per_half + c * plane;
          for (std::size_t j = 0; j < plane; ++j) sum += p[j];
        }
        const double mu = sum / m;
        double sq = 0.0;
        for (int i = 0; i < n; ++i) {
          const T *p = hcur.ptr() + i * per_half + c * plane;
          for (std::size_t j = 0; j < plane; ++j) sq += (p[j] - mu) * (p[j] - mu);
        }
        mean[c] = static_cast<T>(mu);
        var[c] = static_cast<T>(sq / m);
      }
    } else {
      mean.assign(params_[bn.mean].value.begin(), params_[bn.mean].value.end());
      var.assign(params_[bn.var].value.begin(), params_[bn.var].value.end());
    }
    for (int c = 0; c < k; ++c) inv[c] = T(1) / std::sqrt(var[c] + eps);

    Tensor<T> xhat;
    if (trace) xhat = Tensor<T>({n, k, oh, ow});
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < k; ++c) {
        const std::size_t off = i * per_half + c * plane;
        const T *src = hcur.ptr() + off;
        T *dst = act.ptr() + off;
        for (std::size_t j = 0; j < plane; ++j) {
          const T xh = (src[j] - mean[c]) * inv[c];
          if (trace) xhat.data[off + j] = xh;
          dst[j] = LeakyRelu(gamma[c] * xh + beta[c], slope);
        }
      }
    }

    const ConvRef &cv = b.conv[s];
    const ConvGeometry g = Geometry(cv, oh, ow);
    if (trace) {
      trace->mask[s].resize(n * per_half);
      trace->xhat[s] = std::move(xhat);
      trace->act[s] = act;
      trace->batch_mean[s] = mean;
      trace->batch_var[s] = var;
      trace->inv_std[s] = inv;
    }
    for (int i = 0; i < n; ++i) {
      ConvForward(act.ptr() + i * per_half, g, params_[cv.weight].value.data(),
                  params_[cv.bias].value.data(), pre.data(), &scratch);
      MfmForward(pre.data(), f, plane, hcur.ptr() + i * per_half,
                 trace ? trace->mask[s].data() + i * per_half : nullptr);
    }
  }
  for (std::size_t j = 0; j < hcur.size(); ++j) hcur.data[j] += entry.data[j];
  return hcur;
}

template <typename T>
Tensor<T> MtlNetwork<T>::BlockBackward(const BlockRef &b, const BlockTrace<T> &trace,
                                       const Tensor<T> &dout, Gradients<T> *grads) const {
  const int n = dout.dim(0), k = dout.dim(1), oh = dout.dim(2), ow = dout.dim(3);
  const int f = 2 * k;
  const std::size_t plane = static_cast<std::size_t>(oh) * ow;
  const std::size_t per_half = k * plane, per_full = f * plane;
  const T slope = static_cast<T>(cfg_.lrelu_slope);

  AlignedVector<T> scratch, dpre(per_full);
  Tensor<T> dh = dout;
  Tensor<T> dact({n, k, oh, ow});
  for (int s = 2; s >= 0; --s) {
    const ConvRef &cv = b.conv[s];
    const ConvGeometry g = Geometry(cv, oh, ow);
    for (int i = 0; i < n; ++i) {
      MfmBackward(dh.ptr() + i * per_half, f, plane, trace.mask[s].data() + i * per_half,
                  dpre.data());
      ConvBackward(trace.act[s].ptr() + i * per_half, g, params_[cv.weight].value.data(),
                   dpre.data(), dact.ptr() + i * per_half, (*grads)[cv.weight].data(),
                   (*grads)[cv.bias].data(), &scratch);
    }
    const BnRef &bn = b.bn[s];
    const T *gamma = params_[bn.scale].value.data();
    T *dgamma = (*grads)[bn.scale].data();
    T *dbeta = (*grads)[bn.shift].data();
    const double m = static_cast<double>(n) * plane;
    for (int c = 0; c < k; ++c) {
      double sum_dy = 0.0, sum_dy_xhat = 0.0;
      for (int i = 0; i < n; ++i) {
        const std::size_t off = i * per_half + c * plane;
        const T *a = trace.act[s].ptr() + off;
        const T *xh = trace.xhat[s].ptr() + off;
        T *d = dact.ptr() + off;
        for (std::size_t j = 0; j < plane; ++j) {
          d[j] *= a[j] > T(0) ? T(1) : slope;
          sum_dy += d[j];
          sum_dy_xhat += d[j] * xh[j];
        }
      }
      dgamma[c] += static_cast<T>(sum_dy_xhat);
      dbeta[c] += static_cast<T>(sum_dy);
      const double scale = gamma[c] * trace.inv_std[s][c] / m;
      for (int i = 0; i < n; ++i) {
        const std::size_t off = i * per_half + c * plane;
        const T *xh = trace.xhat[s].ptr() + off;
        const T *d = dact.ptr() + off;
        T *out = dh.ptr() + off;
        for (std::size_t j = 0; j < plane; ++j)
          out[j] = static_cast<T>(scale * (m * d[j] - sum_dy - xh[j] * sum_dy_xhat));
      }
    }
  }
  // Skip connection: the entry output feeds both the sum and the inner path.
  for (std::size_t j = 0; j < dh.size(); ++j) dh.data[j] += dout.data[j];

  const Tensor<T> &x = trace.input;
  const ConvGeometry ge = Geometry(b.entry, x.dim(2), x.dim(3));
  const bool need_input_grad = &b != &blocks_.front();
  Tensor<T> dx;
  if (need_input_grad) dx = Tensor<T>(x.shape);
  const std::size_t in_stride = static_cast<std::size_t>(x.dim(1)) * x.dim(2) * x.dim(3);
  for (int i = 0; i < n; ++i) {
    MfmBackward(dh.ptr() + i * per_half, f, plane, trace.entry_mask.data() + i * per_half,
                dpre.data());
    ConvBackward(x.ptr() + i * in_stride, ge, params_[b.entry.weight].value.data(), dpre.data(),
                 need_input_grad ? dx.ptr() + i * in_stride : nullptr,
                 (*grads)[b.entry.weight].data(), (*grads)[b.entry.bias].data(), &scratch);
  }
  return dx;
}

template <typename T>
void MtlNetwork<T>::HeadForward(const HeadRef &h, const RowMatrix<T> &x, Mode mode,
                                std::uint64_t seed, RowMatrix<T> *features,
                                RowMatrix<T> *embedding, RowMatrix<T> *logits,
                                HeadTrace<T> *trace) const {
  std::mt19937_64 rng(seed);
  const double keep_prob = 1.0 - cfg_.dropout;
  const T slope = static_cast<T>(cfg_.lrelu_slope);
  RowMatrix<T> a = x;
  for (std::size_t l = 0; l < h.hidden.size(); ++l) {
    const FcRef &fc = h.hidden[l];
    Eigen::Map<const RowMatrix<T>> w(params_[fc.weight].value.data(), fc.out, fc.in);
    Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> bias(params_[fc.bias].value.data(),
                                                               fc.out);
    RowMatrix<T> z = a * w.transpose();
    z.rowwise() += bias;
    if (trace) {
      trace->inputs.push_back(a);
      trace->pre.push_back(z);
    }
    a = z.unaryExpr([slope](T v) { return LeakyRelu(v, slope); });
    if (l + 1 == h.hidden.size() && embedding) *embedding = a;
    if (mode == Mode::kTrain) {
      RowMatrix<T> keep(a.rows(), a.cols());
      const T scale = static_cast<T>(1.0 / keep_prob);
      for (Eigen::Index i = 0; i < keep.size(); ++i) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        keep.data()[i] = u < keep_prob ? scale : T(0);
      }
      a = a.cwiseProduct(keep);
      if (trace) trace->keep.push_back(std::move(keep));
    }
  }
  *features = a;
  const FcRef &out = h.output;
  Eigen::Map<const RowMatrix<T>> w(params_[out.weight].value.data(), out.out, out.in);
  if (h.normalized) {
    RowMatrix<T> wn = w;
    for (Eigen::Index j = 0; j < wn.rows(); ++j) {
      const T norm = wn.row(j).norm();
      if (norm > T(0)) wn.row(j) /= norm;
    }
    *logits = a * wn.transpose();
  } else {
    Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> bias(params_[out.bias].value.data(),
                                                               out.out);
    *logits = a * w.transpose();
    logits->rowwise() += bias;
  }
}

template <typename T>
RowMatrix<T> MtlNetwork<T>::HeadBackward(const HeadRef &h, const HeadTrace<T> &trace,
                                         const RowMatrix<T> &dfeat, Gradients<T> *grads) const {
  const T slope = static_cast<T>(cfg_.lrelu_slope);
  RowMatrix<T> da = dfeat;
  for (int l = static_cast<int>(h.hidden.size()) - 1; l >= 0; --l) {
    const FcRef &fc = h.hidden[l];
    if (!trace.keep.empty()) da = da.cwiseProduct(trace.keep[l]);
    RowMatrix<T> dz = da.cwiseProduct(
        trace.pre[l].unaryExpr([slope](T v) { return v > T(0) ? T(1) : slope; }));
    Eigen::Map<RowMatrix<T>> dw((*grads)[fc.weight].data(), fc.out, fc.in);
    dw.noalias() += dz.transpose() * trace.inputs[l];
    Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>> db((*grads)[fc.bias].data(), fc.out);
    db += dz.colwise().sum();
    Eigen::Map<const RowMatrix<T>> w(params_[fc.weight].value.data(), fc.out, fc.in);
    da = dz * w;
  }
  return da;
}

template <typename T>
ForwardOutput<T> MtlNetwork<T>::Forward(const Tensor<T> &input, Mode mode,
                                        std::uint64_t dropout_seed) const {
  if (input.rank() != 4 || input.dim(1) != 1 || !input.Consistent())
    throw Error(Errc::kShapeMismatch, "network input must be (N, 1, rows, cols)");
  if (input.dim(3) != cfg_.input_cols || input.dim(0) < 1 || input.dim(2) < 1)
    throw Error(Errc::kShapeMismatch,
                "network expects " + std::to_string(cfg_.input_cols) + " frames, got " +
                    std::to_string(input.dim(3)));
  ForwardOutput<T> out;
  ForwardTrace<T> *trace = nullptr;
  if (mode == Mode::kTrain) {
    out.trace.emplace();
    trace = &*out.trace;
    trace->blocks.resize(blocks_.size());
  }
  Tensor<T> x = input;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    x = BlockForward(blocks_[b], x, mode, trace ? &trace->blocks[b] : nullptr);
    out.block_shapes.push_back(x.shape);
  }
  const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  out.trunk_shape = x.shape;
  if (trace) trace->trunk_shape = x.shape;
  // (C, H, W) -> per frequency row, merge time x channel; average the rows.
  RowMatrix<T> pooled = RowMatrix<T>::Zero(n, static_cast<Eigen::Index>(w) * c);
  const T inv_h = T(1) / static_cast<T>(h);
  for (int i = 0; i < n; ++i)
    for (int ch = 0; ch < c; ++ch)
      for (int r = 0; r < h; ++r) {
        const T *row = x.ptr() + ((static_cast<std::size_t>(i) * c + ch) * h + r) * w;
        for (int t = 0; t < w; ++t) pooled(i, t * c + ch) += row[t] * inv_h;
      }

  constexpr std::uint64_t kSdSalt = 0x9E3779B97F4A7C15ull;
  constexpr std::uint64_t kAsvSalt = 0xC2B2AE3D27D4EB4Full;
  if (sd_.enabled)
    HeadForward(sd_, pooled, mode, dropout_seed ^ kSdSalt, &out.sd_features, nullptr,
                &out.sd_logits, trace ? &trace->sd : nullptr);
  if (asv_.enabled)
    HeadForward(asv_, pooled, mode, dropout_seed ^ kAsvSalt, &out.asv_features,
                &out.embedding, &out.asv_logits, trace ? &trace->asv : nullptr);
  return out;
}

template <typename T>
Gradients<T> MtlNetwork<T>::ZeroGradients() const {
  Gradients<T> g(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) g[i].assign(params_[i].value.size(), T(0));
  return g;
}

template <typename T>
Gradients<T> MtlNetwork<T>::ComputeGradients(const ForwardOutput<T> &fwd,
                                             const HeadUpstream<T> &up) const {
  if (!fwd.trace) throw Error(Errc::kMissingTrace, "backward needs a train-mode forward");
  const ForwardTrace<T> &trace = *fwd.trace;
  Gradients<T> grads = ZeroGradients();
  const int n = trace.trunk_shape[0], c = trace.trunk_shape[1], h = trace.trunk_shape[2],
            w = trace.trunk_shape[3];
  RowMatrix<T> dpooled = RowMatrix<T>::Zero(n, static_cast<Eigen::Index>(w) * c);
  auto head = [&](const HeadRef &ref, const HeadTrace<T> &ht, const RowMatrix<T> &dfeat,
                  const RowMatrix<T> &dw, const std::vector<T> &db) {
    if (!ref.enabled) return;
    if (dw.size() != 0) {
      if (dw.rows() != ref.output.out || dw.cols() != ref.output.in)
        throw Error(Errc::kShapeMismatch, "output weight gradient shape");
      std::copy(dw.data(), dw.data() + dw.size(), grads[ref.output.weight].begin());
    }
    if (!db.empty()) std::copy(db.begin(), db.end(), grads[ref.output.bias].begin());
    if (dfeat.size() == 0) return;
    if (dfeat.rows() != n || dfeat.cols() != ref.output.in)
      throw Error(Errc::kShapeMismatch, "head feature gradient shape");
    dpooled += HeadBackward(ref, ht, dfeat, &grads);
  };
  head(sd_, trace.sd, up.d_sd_features, up.d_sd_out_weight, up.d_sd_out_bias);
  head(asv_, trace.asv, up.d_asv_features, up.d_asv_out_weight, up.d_asv_out_bias);

  Tensor<T> dx(trace.trunk_shape);
  const T inv_h = T(1) / static_cast<T>(h);
  for (int i = 0; i < n; ++i)
    for (int ch = 0; ch < c; ++ch)
      for (int r = 0; r < h; ++r) {
        T *row = dx.ptr() + ((static_cast<std::size_t>(i) * c + ch) * h + r) * w;
        for (int t = 0; t < w; ++t) row[t] = dpooled(i, t * c + ch) * inv_h;
      }
  for (int b = static_cast<int>(blocks_.size()) - 1; b >= 0; --b)
    dx = BlockBackward(blocks_[b], trace.blocks[b], dx, &grads);
  return grads;
}

template <typename T>
void MtlNetwork<T>::UpdateRunningStats(const ForwardTrace<T> &trace) {
  UpdateRunningStats(trace, cfg_.bn_momentum);
}

template <typename T>
void MtlNetwork<T>::UpdateRunningStats(const ForwardTrace<T> &trace, double momentum) {
  const T mom = static_cast<T>(momentum);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    for (int s = 0; s < 3; ++s) {
      const BnRef &bn = blocks_[b].bn[s];
      AlignedVector<T> &rm = params_[bn.mean].value;
      AlignedVector<T> &rv = params_[bn.var].value;
      for (int c = 0; c < bn.channels; ++c) {
        rm[c] = mom * rm[c] + (T(1) - mom) * trace.blocks[b].batch_mean[s][c];
        rv[c] = mom * rv[c] + (T(1) - mom) * trace.blocks[b].batch_var[s][c];
      }
    }
  }
}

template <typename T>
Gradients<T> MtlNetwork<T>::Backward(const ForwardOutput<T> &fwd,
                                     const HeadUpstream<T> &upstream) {
  Gradients<T> g = ComputeGradients(fwd, upstream);
  UpdateRunningStats(*fwd.trace);
  return g;
}

template <typename T>
ParamCountReport MtlNetwork<T>::CountParams() const {
  ParamCountReport r;
  auto layer_of = [](const std::string &name) {
    const std::size_t dot = name.find('.');
    if (name.rfind("block", 0) == 0) return name.substr(0, dot);
    return name.substr(0, name.find('.', dot + 1));
  };
  for (const Param<T> &p : params_) {
    const std::string layer = layer_of(p.name);
    if (r.layers.empty() || r.layers.back().first != layer) r.layers.emplace_back(layer, 0);
    r.layers.back().second += p.value.size();
    r.total += p.value.size();
  }
  return r;
}

template <typename T>
LayerCounts MtlNetwork<T>::CountLayers() const {
  LayerCounts c;
  for (const BlockRef &b : blocks_) {
    c.conv += 1;  // entry
    c.mfm += 1;
    for (const ConvRef &cv : b.conv) {
      (cv.kernel == 1 ? c.nin : c.conv) += 1;
      c.mfm += 1;
    }
  }
  for (const HeadRef *h : {&sd_, &asv_}) {
    if (!h->enabled) continue;
    c.fc += static_cast<int>(h->hidden.size());
    c.output += 1;
  }
  return c;
}

template <typename T>
std::vector<std::vector<int>> MtlNetwork<T>::ShapeLadder(int rows, int cols) const {
  std::vector<std::vector<int>> ladder;
  for (int f : cfg_.block_filters) {
    rows = HalveCeil(rows);
    cols = HalveCeil(cols);
    ladder.push_back({rows, cols, f / 2});
  }
  return ladder;
}

template <typename T>
void MtlNetwork<T>::LoadTrunkFrom(const MtlNetwork &other) {
  for (Param<T> &p : params_) {
    if (p.name.rfind("block", 0) != 0) continue;
    const int j = other.FindParam(p.name);
    if (j < 0 || other.params()[j].shape != p.shape)
      throw Error(Errc::kShapeMismatch, "trunk parameter " + p.name + " does not match");
    p.value = other.params()[j].value;
  }
}

template class MtlNetwork<float>;
template class MtlNetwork<double>;

}  // namespace srasv
