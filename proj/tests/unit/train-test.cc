// tests/unit/train-test.cc

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

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "doctest.h"
#include "srasv/base/error.h"
#include "srasv/base/io.h"
#include "srasv/feat/feature-extractor.h"
#include "srasv/net/checkpoint.h"
#include "srasv/train/adam.h"
#include "srasv/train/trainer.h"

using namespace srasv;

namespace {

// Two harmonic "speakers"; spoofs are moving-average lowpassed copies.
LabeledSet ToySet(std::uint64_t seed) {
  FeatureOptions opts;
  opts.kind = FeatureKind::kLlfb;
  opts.llfb.num_filters = 16;
  opts.target_frames = 16;
  opts.mean_variance_norm = true;
  FeatureExtractor fx(opts);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.05);
  LabeledSet set;
  for (int spk = 0; spk < 2; ++spk) {
    const double f0 = spk == 0 ? 120.0 : 210.0;
    for (int u = 0; u < 5; ++u) {
      Waveform w;
      w.samples.resize(3200);
      for (std::size_t i = 0; i < w.samples.size(); ++i) {
        double v = 0.0;
        for (int h = 1; h <= 30; ++h)
          v += std::sin(2 * std::numbers::pi * f0 * h * i / kSampleRate + 0.3 * h * u) / h;
        w.samples[i] = static_cast<float>(0.3 * v + noise(rng));
      }
      Waveform spoof = w;
      for (std::size_t i = 0; i < w.samples.size(); ++i) {
        float acc = 0.0f;
        for (int k = 0; k < 8 && k <= static_cast<int>(i); ++k) acc += w.samples[i - k];
        spoof.samples[i] = acc / 8.0f;
      }
      const std::string id = "s" + std::to_string(spk) + "_" + std::to_string(u);
      set.Add(id, fx.Extract(w).matrix, 0, spk);
      set.Add(id + "_spoof", fx.Extract(spoof).matrix, 1, spk);
    }
  }
  return set;
}

NetConfig ToyNet() {
  NetConfig c;
  c.input_rows = 16;
  c.input_cols = 16;
  c.block_filters = {8};
  c.sd_hidden = {16};
  c.asv_hidden = {16};
  c.n_speakers = 2;
  c.dropout = 0.1f;
  return c;
}

TrainConfig ToyTrain(int epochs) {
  TrainConfig t;
  t.epochs = epochs;
  t.batch_size = 4;
  t.adam.alpha = 1e-2;
  t.seed = 5;
  return t;
}

std::filesystem::path TempDir(const std::string &name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("adam step arithmetic") {
  std::vector<Param<double>> p(1);
  p[0].name = "w";
  p[0].shape = {1};
  p[0].value = {0.0};
  AdamConfig cfg;
  cfg.alpha = 1e-3;
  AdamState st;
  AdamStep(&p, Gradients<double>{{0.0}}, &st, cfg);
  CHECK(p[0].value[0] == 0.0);
  CHECK(st.t == 1);

  AdamState st2;
  AdamStep(&p, Gradients<double>{{1.0}}, &st2, cfg);
  CHECK(p[0].value[0] == doctest::Approx(-1e-3).epsilon(1e-6));

  // f(w) = w^2 / 2 decreases over two steps.
  p[0].value = {1.0};
  AdamState st3;
  double prev = 0.5;
  for (int i = 0; i < 2; ++i) {
    AdamStep(&p, Gradients<double>{{p[0].value[0]}}, &st3, cfg);
    const double f = 0.5 * p[0].value[0] * p[0].value[0];
    CHECK(f < prev);
    prev = f;
  }
  CHECK_THROWS_AS(AdamStep(&p, Gradients<double>{{1.0, 2.0}}, &st3, cfg), Error);
  CHECK_THROWS_AS(AdamStep(&p, Gradients<double>{}, &st3, cfg), Error);
  AdamConfig bad;
  bad.beta1 = 1.0;
  CHECK_THROWS_AS(bad.Validate(), Error);
}

TEST_CASE("gradient clipping bounds the global norm") {
  Gradients<double> g = {{3.0}, {4.0}};
  CHECK(ClipGradientNorm(&g, 1.0) == doctest::Approx(5.0));
  CHECK(g[0][0] == doctest::Approx(0.6));
  CHECK(g[1][0] == doctest::Approx(0.8));
  Gradients<double> h = {{0.3}};
  ClipGradientNorm(&h, 1.0);
  CHECK(h[0][0] == 0.3);
}

TEST_CASE("shuffled order is a seeded permutation") {
  const auto a = ShuffledOrder(50, 3), b = ShuffledOrder(50, 3), c = ShuffledOrder(50, 4);
  CHECK(a == b);
  CHECK(a != c);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
}

TEST_CASE("zero epochs leave the network untouched") {
  const LabeledSet set = ToySet(1);
  MtlNetwork<float> net(ToyNet());
  net.InitParams(3);
  const auto before = net.params();
  const TrainResult r = Train(&net, set, nullptr, ToyTrain(0), LossConfig{});
  CHECK(r.log.empty());
  for (std::size_t i = 0; i < before.size(); ++i) CHECK(net.params()[i].value == before[i].value);
}

TEST_CASE("training is deterministic and converges on a separable toy set") {
  const LabeledSet set = ToySet(1);
  MtlNetwork<float> a(ToyNet()), b(ToyNet());
  a.InitParams(3);
  b.InitParams(3);
  LossConfig lc;
  lc.margin_m = 1;
  const TrainResult ra = Train(&a, set, &set, ToyTrain(30), lc);
  const TrainResult rb = Train(&b, set, &set, ToyTrain(30), lc);
  for (std::size_t i = 0; i < a.params().size(); ++i) CHECK(a.params()[i].value == b.params()[i].value);
  REQUIRE(ra.log.size() == 30);
  INFO("epoch 1 loss " << ra.log.front().train_loss << ", final " << ra.log.back().train_loss);
  CHECK(ra.log.back().train_loss < 0.1 * ra.log.front().train_loss);
  CHECK(ra.best_dev_loss <= ra.log.back().dev_loss);
  for (const EpochRecord &e : ra.log) CHECK(std::isfinite(e.train_loss));
}

TEST_CASE("checkpoints, log and dev-best selection") {
  const auto dir = TempDir("srasv-train-test");
  const LabeledSet set = ToySet(2);
  MtlNetwork<float> net(ToyNet());
  net.InitParams(9);
  TrainConfig cfg = ToyTrain(4);
  cfg.checkpoint_dir = (dir / "ckpt").string();
  cfg.log_path = (dir / "log.csv").string();
  const TrainResult r = Train(&net, set, &set, cfg, LossConfig{});
  REQUIRE(std::filesystem::exists(dir / "ckpt" / "best.ckpt"));
  REQUIRE(std::filesystem::exists(dir / "ckpt" / "final.ckpt"));
  const std::string log = ReadFileBytes(dir / "log.csv");
  CHECK(log.rfind("epoch,train_loss,dev_loss,dev_sd_eer\n", 0) == 0);
  CHECK(std::count(log.begin(), log.end(), '\n') == 5);

  MtlNetwork<float> best = LoadCheckpoint((dir / "ckpt" / "best.ckpt").string());
  for (std::size_t i = 0; i < best.params().size(); ++i)
    CHECK(best.params()[i].value == r.best_params[i].value);
  MtlNetwork<float> final_net = LoadCheckpoint((dir / "ckpt" / "final.ckpt").string());
  const Tensor<float> x = MakeBatch(set, {0, 1, 2});
  const auto o1 = net.Forward(x, Mode::kEval), o2 = final_net.Forward(x, Mode::kEval);
  CHECK(o1.sd_logits == o2.sd_logits);
  CHECK(o1.asv_logits == o2.asv_logits);
  CHECK(o1.embedding == o2.embedding);
  std::filesystem::remove_all(dir);
}

TEST_CASE("trunk warm start loads shared layers") {
  const auto dir = TempDir("srasv-trunk-test");
  MtlNetwork<float> donor(ToyNet());
  donor.InitParams(100);
  SaveCheckpoint((dir / "donor.ckpt").string(), donor);
  MtlNetwork<float> net(ToyNet());
  net.InitParams(1);
  TrainConfig cfg = ToyTrain(0);
  cfg.trunk_checkpoint = (dir / "donor.ckpt").string();
  Train(&net, ToySet(1), nullptr, cfg, LossConfig{});
  CHECK(net.params()[net.FindParam("block1.conv.weight")].value ==
        donor.params()[donor.FindParam("block1.conv.weight")].value);
  std::filesystem::remove_all(dir);
}

TEST_CASE("training input validation") {
  MtlNetwork<float> net(ToyNet());
  net.InitParams(1);
  CHECK_THROWS_WITH_AS(Train(&net, LabeledSet{}, nullptr, ToyTrain(1), LossConfig{}),
                       doctest::Contains("EmptyDataset"), Error);
  LabeledSet set = ToySet(1);
  set.speaker[3] = 7;
  CHECK_THROWS_WITH_AS(Train(&net, set, nullptr, ToyTrain(1), LossConfig{}),
                       doctest::Contains("LabelOutOfRange"), Error);
  KvConfig kv = KvConfig::Parse("train.batch_size = 0\n");
  CHECK_THROWS_AS(TrainConfig::FromConfig(kv), Error);
  kv = KvConfig::Parse("train.epochs = 7\ntrain.alpha = 0.01\ntrain.seed = 99\n");
  const TrainConfig tc = TrainConfig::FromConfig(kv);
  CHECK(tc.epochs == 7);
  CHECK(tc.adam.alpha == 0.01);
  CHECK(tc.seed == 99);
}

TEST_CASE("sd_eer checkpoint selection") {
  const LabeledSet set = ToySet(2);
  MtlNetwork<float> net(ToyNet());
  net.InitParams(9);
  TrainConfig cfg = ToyTrain(5);
  cfg.select = "sd_eer";
  const TrainResult r = Train(&net, set, &set, cfg, LossConfig{});
  REQUIRE(r.log.size() == 5);
  REQUIRE(r.best_epoch >= 1);
  double best = 1.0;
  for (const EpochRecord &e : r.log) {
    CHECK(e.dev_sd_eer >= 0.0);
    CHECK(e.dev_sd_eer <= 0.5);
    best = std::min(best, e.dev_sd_eer);
  }
  CHECK(r.best_dev_sd_eer == best);
  CHECK(r.log[r.best_epoch - 1].dev_sd_eer == best);
  net.params() = r.best_params;
  CHECK(EvaluateSdEer(net, set, 4) == best);
  // EER ties fall back to the dev loss.
  for (const EpochRecord &e : r.log)
    if (e.dev_sd_eer == best) CHECK(e.dev_loss >= r.best_dev_loss);

  KvConfig kv = KvConfig::Parse("train.select = accuracy\n");
  CHECK_THROWS_WITH_AS(TrainConfig::FromConfig(kv), doctest::Contains("BadConfig"), Error);
}
