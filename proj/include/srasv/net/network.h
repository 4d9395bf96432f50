// include/srasv/net/network.h

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

#ifndef SRASV_NET_NETWORK_H_
#define SRASV_NET_NETWORK_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "srasv/base/kv-config.h"
#include "srasv/feat/feature-types.h"
#include "srasv/net/layers.h"
#include "srasv/net/tensor.h"

namespace srasv {

/// Architecture of the multi-task network. Defaults reproduce the 864x400
/// CQT configuration with 78 training speakers.
struct NetConfig {
  int input_rows = 864;
  int input_cols = 400;
  FeatureKind input_kind = FeatureKind::kCqt;
  std::vector<int> block_filters = {32, 64, 128};  // pre-MFM channel counts
  std::vector<int> sd_hidden = {512, 128, 64};
  std::vector<int> asv_hidden = {512, 128};
  int n_speakers = 78;
  bool sd_enabled = true;
  bool asv_enabled = true;
  // Output layers evaluated with unit-norm class vectors and no bias
  // (A-softmax). When false the head is a plain affine softmax layer.
  bool sd_normalized_output = true;
  bool asv_normalized_output = true;
  float dropout = 0.7f;  // drop probability of every hidden FC
  float lrelu_slope = 0.01f;
  float bn_momentum = 0.99f;
  float bn_eps = 1e-5f;

  /// net.* keys: net.filters, net.sd_hidden, net.asv_hidden, net.n_speakers,
  /// net.sd_head, net.asv_head, net.dropout, ...
  static NetConfig FromConfig(const KvConfig &cfg);
  int TrunkOutputDim() const;
  int EmbeddingDim() const { return asv_hidden.empty() ? 0 : asv_hidden.back(); }
};

enum class ParamRole : std::uint8_t {
  kWeight = 0,
  kBias = 1,
  kBnScale = 2,
  kBnShift = 3,
  kBnRunningMean = 4,
  kBnRunningVar = 5,
};

template <typename T>
struct Param {
  std::string name;
  std::vector<int> shape;
  AlignedVector<T> value;
  ParamRole role = ParamRole::kWeight;

  bool Trainable() const {
    return role != ParamRole::kBnRunningMean && role != ParamRole::kBnRunningVar;
  }
  /// Included in the L2 penalty: convolution, NIN and FC weight matrices.
  bool Regularized() const { return role == ParamRole::kWeight; }
};

/// One gradient buffer per parameter, same order and sizes. Buffers of BN
/// running statistics stay zero.
template <typename T>
using Gradients = std::vector<AlignedVector<T>>;

enum class Mode { kTrain, kEval };

struct LayerCounts {
  int conv = 0;
  int nin = 0;
  int mfm = 0;
  int fc = 0;  // hidden fully connected layers
  int output = 0;
};

struct ParamCountReport {
  std::vector<std::pair<std::string, std::size_t>> layers;
  std::size_t total = 0;
  std::size_t Get(const std::string &layer) const;
};

template <typename T>
struct BlockTrace {
  Tensor<T> input;
  std::vector<std::uint8_t> entry_mask;
  Tensor<T> xhat[3];
  Tensor<T> act[3];
  std::vector<std::uint8_t> mask[3];
  std::vector<T> batch_mean[3];
  std::vector<T> batch_var[3];
  std::vector<T> inv_std[3];
};

template <typename T>
struct HeadTrace {
  std::vector<RowMatrix<T>> inputs;  // input of each hidden FC
  std::vector<RowMatrix<T>> pre;     // pre-activation of each hidden FC
  std::vector<RowMatrix<T>> keep;    // dropout scale (0 or 1/keep_prob)
};

/// Cached activations of a train-mode forward pass.
template <typename T>
struct ForwardTrace {
  std::vector<BlockTrace<T>> blocks;
  std::vector<int> trunk_shape;  // (N, C, H, W) of the last block output
  HeadTrace<T> sd;
  HeadTrace<T> asv;
};

template <typename T>
struct ForwardOutput {
  RowMatrix<T> sd_logits;     // N x 2
  RowMatrix<T> asv_logits;    // N x n_speakers
  RowMatrix<T> sd_features;   // input of the SD output layer
  RowMatrix<T> asv_features;  // input of the ASV output layer
  RowMatrix<T> embedding;     // ASV last hidden activation, before dropout
  std::vector<std::vector<int>> block_shapes;  // output shape of each block
  std::vector<int> trunk_shape;
  std::optional<ForwardTrace<T>> trace;
};

/// Upstream gradients arriving at the two heads. Output-layer weight
/// gradients are produced by the loss and copied into the result.
template <typename T>
struct HeadUpstream {
  RowMatrix<T> d_sd_features;
  RowMatrix<T> d_asv_features;
  RowMatrix<T> d_sd_out_weight;
  RowMatrix<T> d_asv_out_weight;
  std::vector<T> d_sd_out_bias;
  std::vector<T> d_asv_out_bias;
};

/// Residual MFM trunk shared by a spoofing-detection head and a speaker
/// head. Parameters live in a flat, named list so that optimisers,
/// checkpoints and gradient checks can walk them uniformly.
template <typename T>
class MtlNetwork {
 public:
  explicit MtlNetwork(const NetConfig &cfg);

  const NetConfig &config() const { return cfg_; }
  std::vector<Param<T>> &params() { return params_; }
  const std::vector<Param<T>> &params() const { return params_; }
  int FindParam(const std::string &name) const;  // -1 when absent

  /// He-normal weights, zero biases, unit BN scale and running variance.
  void InitParams(std::uint64_t seed);

  /// `input` is (N, 1, rows, cols). Dropout masks are drawn from
  /// `dropout_seed` so a replay with the same seed reuses them. Eval mode
  /// uses BN running statistics and never returns a trace.
  ForwardOutput<T> Forward(const Tensor<T> &input, Mode mode,
                           std::uint64_t dropout_seed = 0) const;

  /// Gradients of every trainable parameter. Also folds the batch
  /// statistics of the trace into the BN running averages.
  Gradients<T> Backward(const ForwardOutput<T> &fwd, const HeadUpstream<T> &upstream);

  /// Same as Backward() without touching the running statistics.
  Gradients<T> ComputeGradients(const ForwardOutput<T> &fwd,
                                const HeadUpstream<T> &upstream) const;
  void UpdateRunningStats(const ForwardTrace<T> &trace);
  void UpdateRunningStats(const ForwardTrace<T> &trace, double momentum);

  Gradients<T> ZeroGradients() const;

  ParamCountReport CountParams() const;
  LayerCounts CountLayers() const;
  /// Analytic output shapes (H, W, C) of each block for an input of `rows` x
  /// `cols`.
  std::vector<std::vector<int>> ShapeLadder(int rows, int cols) const;

  /// Copies every `block*` parameter from `other`; shapes must match.
  void LoadTrunkFrom(const MtlNetwork &other);

  int sd_output_weight() const { return sd_.output.weight; }
  int sd_output_bias() const { return sd_.output.bias; }
  int asv_output_weight() const { return asv_.output.weight; }
  int asv_output_bias() const { return asv_.output.bias; }

  template <typename U>
  MtlNetwork<U> Cast() const {
    MtlNetwork<U> out(cfg_);
    for (std::size_t i = 0; i < params_.size(); ++i)
      out.params()[i].value.assign(params_[i].value.begin(), params_[i].value.end());
    return out;
  }

 private:
  struct ConvRef {
    int weight = -1, bias = -1;
    int in_channels = 0, out_channels = 0, kernel = 3, stride = 1, pad = 1;
  };
  struct BnRef {
    int scale = -1, shift = -1, mean = -1, var = -1, channels = 0;
  };
  struct BlockRef {
    ConvRef entry;
    BnRef bn[3];
    ConvRef conv[3];
  };
  struct FcRef {
    int weight = -1, bias = -1, in = 0, out = 0;
  };
  struct HeadRef {
    bool enabled = false;
    bool normalized = true;
    std::vector<FcRef> hidden;
    FcRef output;
  };

  int AddParam(const std::string &name, std::vector<int> shape, ParamRole role);
  ConvRef AddConv(const std::string &prefix, int in, int out, int kernel, int stride, int pad);
  BnRef AddBn(const std::string &prefix, int channels);
  FcRef AddFc(const std::string &prefix, int in, int out);
  HeadRef BuildHead(const std::string &name, bool enabled, bool normalized,
                    const std::vector<int> &hidden, int classes);

  Tensor<T> BlockForward(const BlockRef &b, const Tensor<T> &x, Mode mode,
                         BlockTrace<T> *trace) const;
  Tensor<T> BlockBackward(const BlockRef &b, const BlockTrace<T> &trace,
                          const Tensor<T> &dout, Gradients<T> *grads) const;
  void HeadForward(const HeadRef &h, const RowMatrix<T> &x, Mode mode,
                   std::uint64_t seed, RowMatrix<T> *features, RowMatrix<T> *embedding,
                   RowMatrix<T> *logits, HeadTrace<T> *trace) const;
  RowMatrix<T> HeadBackward(const HeadRef &h, const HeadTrace<T> &trace,
                            const RowMatrix<T> &dfeat, Gradients<T> *grads) const;
  ConvGeometry Geometry(const ConvRef &c, int h, int w) const;

  NetConfig cfg_;
  std::vector<Param<T>> params_;
  std::vector<BlockRef> blocks_;
  HeadRef sd_;
  HeadRef asv_;
};

}  // namespace srasv

#endif  // SRASV_NET_NETWORK_H_
