// src/train/trainer.cc

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

#include "srasv/train/trainer.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <random>

#include "srasv/base/io.h"
#include "srasv/base/log.h"
#include "srasv/loss/a-softmax.h"
#include "srasv/metrics/detection.h"
#include "srasv/net/checkpoint.h"

namespace srasv {

namespace {

std::uint64_t Mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ (b + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2));
  x ^= x >> 33;
  x *= 0xFF51AFD7ED558CCDull;
  x ^= x >> 33;
  return x;
}

BatchLabels LabelsOf(const LabeledSet &set, const std::vector<std::size_t> &idx) {
  BatchLabels l;
  for (std::size_t i : idx) {
    l.sd.push_back(set.sd[i]);
    l.asv.push_back(set.speaker[i]);
  }
  return l;
}

void CheckSet(const LabeledSet &set, const MtlNetwork<float> &net, const char *what) {
  const NetConfig &c = net.config();
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set.features[i].rows() != c.input_rows || set.features[i].cols() != c.input_cols)
      throw Error(Errc::kShapeMismatch, std::string(what) + " utterance " + set.ids[i] +
                                            " does not match the network input geometry");
    if (set.sd[i] < 0 || set.sd[i] > 1)
      throw Error(Errc::kLabelOutOfRange, "bad SD key for " + set.ids[i]);
    if (c.asv_enabled && (set.speaker[i] < 0 || set.speaker[i] >= c.n_speakers))
      throw Error(Errc::kLabelOutOfRange, "speaker index of " + set.ids[i] + " outside [0, " +
                                              std::to_string(c.n_speakers) + ")");
  }
}

std::vector<double> WeightsFromLabels(const std::vector<int> &labels, int classes) {
  std::vector<std::size_t> counts(classes, 0);
  for (int y : labels) ++counts.at(y);
  return ClassWeights(counts);
}

}  // namespace

TrainConfig TrainConfig::FromConfig(const KvConfig &cfg) {
  TrainConfig c;
  c.batch_size = static_cast<int>(cfg.GetInt("train.batch_size", c.batch_size));
  c.epochs = static_cast<int>(cfg.GetInt("train.epochs", c.epochs));
  c.adam.alpha = cfg.GetDouble("train.alpha", c.adam.alpha);
  c.adam.beta1 = cfg.GetDouble("train.beta1", c.adam.beta1);
  c.adam.beta2 = cfg.GetDouble("train.beta2", c.adam.beta2);
  c.adam.eps = cfg.GetDouble("train.eps", c.adam.eps);
  c.seed = static_cast<std::uint64_t>(cfg.GetInt("train.seed", static_cast<std::int64_t>(c.seed)));
  c.clip_norm = cfg.GetDouble("train.clip_norm", c.clip_norm);
  c.patience = static_cast<int>(cfg.GetInt("train.patience", c.patience));
  c.sd_class_weighting = cfg.GetBool("train.sd_class_weighting", c.sd_class_weighting);
  c.asv_class_weighting = cfg.GetBool("train.asv_class_weighting", c.asv_class_weighting);
  c.bn_warmup = cfg.GetBool("train.bn_warmup", c.bn_warmup);
  c.checkpoint_dir = cfg.GetString("train.checkpoint_dir", c.checkpoint_dir);
  c.log_path = cfg.GetString("train.log", c.log_path);
  c.trunk_checkpoint = cfg.GetString("train.trunk_init", c.trunk_checkpoint);
  c.select = cfg.GetString("train.select", c.select);
  c.Validate();
  return c;
}

void TrainConfig::Validate() const {
  if (batch_size < 1) throw Error(Errc::kBadConfig, "train.batch_size must be >= 1");
  if (epochs < 0) throw Error(Errc::kBadConfig, "train.epochs must be >= 0");
  if (patience < 0) throw Error(Errc::kBadConfig, "train.patience must be >= 0");
  if (select != "loss" && select != "sd_eer")
    throw Error(Errc::kBadConfig, "train.select must be loss or sd_eer, got '" + select + "'");
  adam.Validate();
}

void LabeledSet::Add(std::string id, FeatureMatrix m, int sd_label, int speaker_index) {
  ids.push_back(std::move(id));
  features.push_back(std::move(m));
  sd.push_back(sd_label);
  speaker.push_back(speaker_index);
}

Tensor<float> MakeBatch(const LabeledSet &set, const std::vector<std::size_t> &indices) {
  if (indices.empty()) throw Error(Errc::kEmptyDataset, "empty batch");
  const int rows = static_cast<int>(set.features[indices[0]].rows());
  const int cols = static_cast<int>(set.features[indices[0]].cols());
  Tensor<float> t({static_cast<int>(indices.size()), 1, rows, cols});
  const std::size_t plane = static_cast<std::size_t>(rows) * cols;
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const FeatureMatrix &m = set.features[indices[b]];
    if (m.rows() != rows || m.cols() != cols)
      throw Error(Errc::kShapeMismatch, "batch members differ in shape");
    std::copy(m.data(), m.data() + plane, t.ptr() + b * plane);
  }
  return t;
}

double EvaluateLoss(const MtlNetwork<float> &net, const LabeledSet &set, const LossConfig &loss,
                    int batch_size) {
  if (set.size() == 0) throw Error(Errc::kEmptyDataset, "empty evaluation set");
  double total = 0.0;
  for (std::size_t start = 0; start < set.size(); start += batch_size) {
    std::vector<std::size_t> idx;
    for (std::size_t i = start; i < std::min(set.size(), start + batch_size); ++i) idx.push_back(i);
    const auto out = net.Forward(MakeBatch(set, idx), Mode::kEval);
    const auto v = JointLoss(net, out, LabelsOf(set, idx), loss, loss.margin_blend_max);
    total += (v.sd + v.asv) * idx.size();
  }
  return total / set.size() + 0.5 * loss.lambda_reg * PenalizedSquaredNorm(net);
}

double EvaluateSdEer(const MtlNetwork<float> &net, const LabeledSet &set, int batch_size) {
  std::vector<double> bona, spoof;
  for (std::size_t start = 0; start < set.size(); start += batch_size) {
    std::vector<std::size_t> idx;
    for (std::size_t i = start; i < std::min(set.size(), start + batch_size); ++i) idx.push_back(i);
    const auto out = net.Forward(MakeBatch(set, idx), Mode::kEval);
    for (std::size_t b = 0; b < idx.size(); ++b) {
      const double s = static_cast<double>(out.sd_logits(b, 0)) - out.sd_logits(b, 1);
      (set.sd[idx[b]] == 0 ? bona : spoof).push_back(s);
    }
  }
  return Eer(bona, spoof).eer;
}

std::vector<std::size_t> ShuffledOrder(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

TrainResult Train(MtlNetwork<float> *net, const LabeledSet &train, const LabeledSet *dev,
                  const TrainConfig &cfg, LossConfig loss,
                  const std::function<void(const EpochRecord &)> &on_epoch) {
  cfg.Validate();
  if (train.size() == 0) throw Error(Errc::kEmptyDataset, "training set is empty");
  if (dev && dev->size() == 0) dev = nullptr;
  CheckSet(train, *net, "training");
  if (dev) CheckSet(*dev, *net, "dev");
  if (!cfg.trunk_checkpoint.empty()) net->LoadTrunkFrom(LoadCheckpoint(cfg.trunk_checkpoint));
  if (cfg.sd_class_weighting && loss.sd_class_weights.empty())
    loss.sd_class_weights = WeightsFromLabels(train.sd, 2);
  if (cfg.asv_class_weighting && loss.asv_class_weights.empty() && net->config().asv_enabled)
    loss.asv_class_weights = WeightsFromLabels(train.speaker, net->config().n_speakers);
  if (!cfg.checkpoint_dir.empty()) std::filesystem::create_directories(cfg.checkpoint_dir);

  TrainResult result;
  result.best_params = net->params();
  result.best_dev_loss = std::numeric_limits<double>::infinity();
  const bool by_eer = cfg.select == "sd_eer" && dev;
  result.best_dev_sd_eer = by_eer ? std::numeric_limits<double>::infinity()
                                  : std::numeric_limits<double>::quiet_NaN();
  AdamState adam;
  int since_best = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const double blend = loss.MarginBlend(epoch);
    const std::vector<std::size_t> order = ShuffledOrder(train.size(), Mix(cfg.seed, epoch));
    double loss_sum = 0.0;
    std::size_t step = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++step) {
      const std::vector<std::size_t> idx(
          order.begin() + start, order.begin() + std::min(order.size(), start + cfg.batch_size));
      const std::uint64_t dropout_seed = Mix(Mix(cfg.seed, epoch), step);
      const ForwardOutput<float> out = net->Forward(MakeBatch(train, idx), Mode::kTrain, dropout_seed);
      const JointLossValue<float> v = JointLoss(*net, out, LabelsOf(train, idx), loss, blend);
      if (!std::isfinite(v.total))
        throw Error(Errc::kNonFiniteScore, "training loss diverged at epoch " + std::to_string(epoch + 1));
      Gradients<float> grads = net->ComputeGradients(out, v.upstream);
      const double k = static_cast<double>(adam.t);
      net->UpdateRunningStats(*out.trace, cfg.bn_warmup
                                              ? std::min<double>(net->config().bn_momentum, k / (k + 1.0))
                                              : net->config().bn_momentum);
      AddRegularizationGradient(*net, loss.lambda_reg, &grads);
      ClipGradientNorm(&grads, cfg.clip_norm);
      AdamStep(&net->params(), grads, &adam, cfg.adam);
      loss_sum += v.total * idx.size();
    }
    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.train_loss = loss_sum / train.size();
    rec.dev_loss = dev ? EvaluateLoss(*net, *dev, loss, cfg.batch_size)
                       : std::numeric_limits<double>::quiet_NaN();
    rec.dev_sd_eer = by_eer ? EvaluateSdEer(*net, *dev, cfg.batch_size)
                            : std::numeric_limits<double>::quiet_NaN();
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.log.push_back(rec);
    SRASV_LOG("epoch " << rec.epoch << " train " << rec.train_loss << " dev " << rec.dev_loss
                       << (by_eer ? " sd_eer " + std::to_string(rec.dev_sd_eer) : std::string())
                       << " (" << rec.seconds << " s)");
    bool improved = !dev || rec.dev_loss < result.best_dev_loss;
    if (by_eer)
      improved = rec.dev_sd_eer < result.best_dev_sd_eer ||
                 (rec.dev_sd_eer == result.best_dev_sd_eer && improved);
    if (improved) {
      result.best_dev_sd_eer = rec.dev_sd_eer;
      result.best_epoch = rec.epoch;
      result.best_dev_loss = dev ? rec.dev_loss : rec.train_loss;
      result.best_params = net->params();
      since_best = 0;
      if (!cfg.checkpoint_dir.empty())
        SaveCheckpoint((std::filesystem::path(cfg.checkpoint_dir) / "best.ckpt").string(), *net);
    } else {
      ++since_best;
    }
    if (on_epoch) on_epoch(rec);
    if (!cfg.log_path.empty()) WriteTrainLog(cfg.log_path, result.log);
    if (cfg.patience > 0 && since_best >= cfg.patience) break;
  }
  if (!cfg.checkpoint_dir.empty()) {
    SaveCheckpoint((std::filesystem::path(cfg.checkpoint_dir) / "final.ckpt").string(), *net);
    if (result.best_epoch == 0)
      SaveCheckpoint((std::filesystem::path(cfg.checkpoint_dir) / "best.ckpt").string(), *net);
  }
  return result;
}

void WriteTrainLog(const std::string &path, const std::vector<EpochRecord> &log) {
  std::string out = "epoch,train_loss,dev_loss,dev_sd_eer\n";
  char line[160];
  for (const EpochRecord &r : log) {
    std::snprintf(line, sizeof(line), "%d,%.9g,%.9g,%.9g\n", r.epoch, r.train_loss, r.dev_loss,
                  r.dev_sd_eer);
    out += line;
  }
  WriteFileAtomic(path, out);
}

}  // namespace srasv
