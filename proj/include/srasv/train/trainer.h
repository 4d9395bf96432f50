// include/srasv/train/trainer.h

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

#ifndef SRASV_TRAIN_TRAINER_H_
#define SRASV_TRAIN_TRAINER_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "srasv/base/kv-config.h"
#include "srasv/feat/feature-types.h"
#include "srasv/loss/joint-loss.h"
#include "srasv/net/network.h"
#include "srasv/train/adam.h"

namespace srasv {

struct TrainConfig {
  int batch_size = 32;
  int epochs = 30;
  AdamConfig adam;
  std::uint64_t seed = 1;
  double clip_norm = 5.0;       // <= 0 disables clipping
  int patience = 0;             // epochs without dev improvement; 0 = off
  bool sd_class_weighting = true;
  bool asv_class_weighting = false;
  // BN running averages use momentum min(m, k / (k + 1)) at update k, a
  // cumulative mean until the configured momentum takes over.
  bool bn_warmup = true;
  std::string checkpoint_dir;   // best.ckpt / final.ckpt written when set
  std::string log_path;         // CSV epoch log written when set
  std::string trunk_checkpoint; // trunk-only warm start when set
  std::string select = "loss";  // dev criterion: "loss" or "sd_eer"

  /// train.* keys: batch_size, epochs, alpha, beta1, beta2, eps, seed,
  /// clip_norm, patience, sd_class_weighting, asv_class_weighting,
  /// bn_warmup, checkpoint_dir, log, trunk_init, select.
  static TrainConfig FromConfig(const KvConfig &cfg);
  void Validate() const;
};

/// In-memory labeled training data: one unified feature matrix per
/// utterance with its SD key (0 bonafide, 1 spoof) and speaker index.
struct LabeledSet {
  std::vector<std::string> ids;
  std::vector<FeatureMatrix> features;
  std::vector<int> sd;
  std::vector<int> speaker;

  std::size_t size() const { return features.size(); }
  void Add(std::string id, FeatureMatrix m, int sd_label, int speaker_index);
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_loss = 0.0;  // NaN when no dev set
  double dev_sd_eer = 0.0;  // NaN unless select == "sd_eer"
  double seconds = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> log;
  int best_epoch = 0;  // 0 when no epoch ran
  double best_dev_loss = 0.0;
  double best_dev_sd_eer = 0.0;  // NaN unless select == "sd_eer"
  std::vector<Param<float>> best_params;  // equals final params without dev set
};

/// Stacks the selected utterances into an (N, 1, rows, cols) tensor.
Tensor<float> MakeBatch(const LabeledSet &set, const std::vector<std::size_t> &indices);

/// Mean joint loss of `set` in eval mode, evaluated in batches.
double EvaluateLoss(const MtlNetwork<float> &net, const LabeledSet &set, const LossConfig &loss,
                    int batch_size);

/// SD EER of `set` in eval mode with score = bona fide logit - spoof logit.
/// Throws kOneClassOnly when the set lacks either class.
double EvaluateSdEer(const MtlNetwork<float> &net, const LabeledSet &set, int batch_size);

/// Seeded Fisher-Yates permutation of [0, n).
std::vector<std::size_t> ShuffledOrder(std::size_t n, std::uint64_t seed);

/// Mini-batch joint training with Adam. `net` holds the final parameters on
/// return; the dev-best parameters are in the result (and best.ckpt).
/// `on_epoch` is called after every epoch when set.
TrainResult Train(MtlNetwork<float> *net, const LabeledSet &train, const LabeledSet *dev,
                  const TrainConfig &cfg, LossConfig loss,
                  const std::function<void(const EpochRecord &)> &on_epoch = {});

/// CSV epoch,train_loss,dev_loss,dev_sd_eer. Epoch times are only logged,
/// so the file is identical across reruns.
void WriteTrainLog(const std::string &path, const std::vector<EpochRecord> &log);

}  // namespace srasv

#endif  // SRASV_TRAIN_TRAINER_H_
