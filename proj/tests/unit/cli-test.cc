// tests/unit/cli-test.cc

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

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "srasv/base/io.h"
#include "srasv/base/log.h"
#include "srasv/cli/cli.h"
#include "srasv/proto/protocol.h"

using namespace srasv;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = SRASV_FIXTURE_DIR;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "srasv");
  std::ostringstream out, err;
  Run r;
  r.code = CliRun(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::map<std::string, std::string> Tree(const fs::path &root) {
  std::map<std::string, std::string> files;
  for (const auto &e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = ReadFileBytes(e.path());
  return files;
}

fs::path Scratch(const std::string &name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const char *kTinyConfig =
    "synth.speakers = 3\nsynth.utts = 3\nsynth.dev_speakers = 2\nsynth.eval_speakers = 2\n"
    "synth.test_utts = 2\nsynth.enroll = 1\nsynth.duration = 1\n"
    "feat.kind = llfb\nfeat.llfb_filters = 16\nfeat.frames = 16\n"
    "net.filters = 8\nnet.sd_hidden = 16\nnet.asv_hidden = 16\nnet.dropout = 0.1\n"
    "train.epochs = 2\ntrain.batch_size = 4\ntrain.alpha = 0.01\nloss.margin = 1\n";

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(Cli({}).code == kExitUsage);
  CHECK(Cli({"bogus"}).code == kExitUsage);
  CHECK(Cli({"synth"}).code == kExitUsage);
  CHECK(Cli({"eval", "--scores", "/nonexistent/scores.txt"}).code == kExitUsage);
  CHECK(Cli({"extract", "--corpus", ".", "--out", "x", "--features", "mfcc"}).code == kExitUsage);
  const Run help = Cli({"--help"});
  CHECK(help.code == kExitOk);
  CHECK(help.out.find("score-asv") != std::string::npos);
}

TEST_CASE("eval on perfect fixtures") {
  const Run r = Cli({"eval", "--scores", kFixtures + "/perfect-sd.txt", "--scores", kFixtures + "/perfect-asv.txt"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("SD EER            0.00%") != std::string::npos);
  CHECK(r.out.find("ASV EER           0.00%") != std::string::npos);
  CHECK(r.out.find("min t-DCF_norm  0.0000") != std::string::npos);
  CHECK(r.out.find("C0 0.000000  C1 0.940500  C2 0.500000") != std::string::npos);
  CHECK(r.out.find("A01") != std::string::npos);
  CHECK(r.out.find("A02") != std::string::npos);

  // File order does not matter; roles follow the keys.
  const Run swapped = Cli({"eval", "--scores", kFixtures + "/perfect-asv.txt", "--scores", kFixtures + "/perfect-sd.txt"});
  CHECK(swapped.out == r.out);

  const Run sd_only = Cli({"eval", "--scores", kFixtures + "/perfect-sd.txt"});
  CHECK(sd_only.code == kExitOk);
  CHECK(sd_only.out == "SD EER 0.00%\n");

  const fs::path dir = Scratch("srasv-cli-eval");
  const std::string csv = (dir / "report.csv").string();
  CHECK(Cli({"eval", "--scores", kFixtures + "/perfect-sd.txt", "--scores", kFixtures + "/perfect-asv.txt",
             "--report", csv}).code == kExitOk);
  CHECK(ReadFileBytes(csv).rfind("attack,sd_eer,min_tdcf_norm\npooled,0", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("data errors exit with 1") {
  const fs::path dir = Scratch("srasv-cli-bad");
  WriteFileAtomic(dir / "bad.txt", "a 1 bonafide\nb nan spoof A01\n");
  const Run r = Cli({"eval", "--scores", (dir / "bad.txt").string()});
  CHECK(r.code == kExitDataError);
  CHECK(r.err.find("NonFiniteScore") != std::string::npos);
  WriteFileAtomic(dir / "one.txt", "a 1 bonafide\nb 2 bonafide\n");
  CHECK(Cli({"eval", "--scores", (dir / "one.txt").string()}).code == kExitDataError);
  fs::remove_all(dir);
}

TEST_CASE("synth is reproducible from the seed") {
  SetLogLevel(LogLevel::kSilent);
  const fs::path dir = Scratch("srasv-cli-synth");
  WriteFileAtomic(dir / "tiny.cfg", kTinyConfig);
  const std::string cfg = (dir / "tiny.cfg").string();
  REQUIRE(Cli({"synth", "--config", cfg, "--seed", "7", "--out", (dir / "a").string()}).code == kExitOk);
  REQUIRE(Cli({"synth", "--config", cfg, "--seed", "7", "--out", (dir / "b").string()}).code == kExitOk);
  REQUIRE(Cli({"synth", "--config", cfg, "--seed", "8", "--out", (dir / "c").string()}).code == kExitOk);
  const auto a = Tree(dir / "a");
  CHECK(a == Tree(dir / "b"));
  CHECK(a != Tree(dir / "c"));
  fs::remove_all(dir);
  SetLogLevel(LogLevel::kInfo);
}

TEST_CASE("fuse fits, saves and re-applies a model") {
  const fs::path dir = Scratch("srasv-cli-fuse");
  const std::string sd = kFixtures + "/perfect-sd.txt";
  WriteFileAtomic(dir / "other.txt", "B01 1 bonafide\nB02 0.5 bonafide\nB03 2 bonafide\nB04 -0.5 bonafide\n"
                                     "S01 0 spoof A01\nS02 -1 spoof A01\nS03 -2 spoof A02\nS04 0.25 spoof A02\n");
  const std::string other = (dir / "other.txt").string();
  const Run fit = Cli({"fuse", "--scores", sd, "--scores", other, "--out", (dir / "fused.txt").string(),
                       "--model", (dir / "fusion.model").string()});
  REQUIRE(fit.code == kExitOk);
  REQUIRE(fs::exists(dir / "fusion.model"));
  const Run apply = Cli({"fuse", "--scores", sd, "--scores", other, "--out", (dir / "applied.txt").string(),
                         "--apply", (dir / "fusion.model").string()});
  REQUIRE(apply.code == kExitOk);
  CHECK(ReadFileBytes(dir / "fused.txt") == ReadFileBytes(dir / "applied.txt"));
  const ScoreSet fused = ReadScoreFile(dir / "fused.txt");
  CHECK(fused.records.size() == 8);
  CHECK(fused.records[4].attack == "A01");
  const Run eval = Cli({"eval", "--scores", (dir / "fused.txt").string()});
  CHECK(eval.out == "SD EER 0.00%\n");

  WriteFileAtomic(dir / "short.txt", "B01 1 bonafide\n");
  CHECK(Cli({"fuse", "--scores", sd, "--scores", (dir / "short.txt").string(), "--out",
             (dir / "x.txt").string()}).code == kExitDataError);
  fs::remove_all(dir);
}

TEST_CASE("pipeline smoke run emits every artifact") {
  SetLogLevel(LogLevel::kSilent);
  const fs::path dir = Scratch("srasv-cli-smoke");
  WriteFileAtomic(dir / "tiny.cfg", kTinyConfig);
  const std::string cfg = (dir / "tiny.cfg").string();
  const std::string corpus = (dir / "corpus").string(), feats = (dir / "feats").string();
  const std::string model_dir = (dir / "model").string();
  const std::string model = (dir / "model" / "model.ckpt").string();
  const std::string emb = (dir / "emb.bin").string(), backend = (dir / "backend.bin").string();
  const std::string asv = (dir / "asv.txt").string(), sd = (dir / "sd.txt").string();

  REQUIRE(Cli({"synth", "--config", cfg, "--out", corpus}).code == kExitOk);
  REQUIRE(Cli({"extract", "--config", cfg, "--corpus", corpus, "--out", feats, "--threads", "2"}).code == kExitOk);
  REQUIRE(Cli({"train", "--config", cfg, "--corpus", corpus, "--feats", feats, "--out", model_dir}).code == kExitOk);
  REQUIRE(Cli({"embed", "--config", cfg, "--model", model, "--corpus", corpus, "--feats", feats, "--out", emb}).code ==
          kExitOk);
  REQUIRE(Cli({"plda", "--config", cfg, "--corpus", corpus, "--embeddings", emb, "--out", backend}).code == kExitOk);
  REQUIRE(Cli({"score-asv", "--config", cfg, "--backend", backend, "--embeddings", emb, "--corpus", corpus,
               "--split", "eval", "--out", asv}).code == kExitOk);
  REQUIRE(Cli({"score-sd", "--config", cfg, "--model", model, "--feats", feats, "--protocol",
               (fs::path(corpus) / "protocols" / "cm.eval.txt").string(), "--out", sd}).code == kExitOk);
  CHECK(Cli({"eval", "--scores", sd}).out.rfind("SD EER ", 0) == 0);
  CHECK(Cli({"eval", "--scores", asv}).out.rfind("ASV EER ", 0) == 0);
  // Two epochs on a toy corpus may leave an ASV that rejects every spoof,
  // for which the t-DCF is undefined.
  const Run eval = Cli({"eval", "--config", cfg, "--scores", sd, "--scores", asv});
  INFO(eval.err);
  if (eval.code == kExitOk) {
    CHECK(eval.out.find("min t-DCF_norm") != std::string::npos);
    CHECK(eval.out.find("lowpass") != std::string::npos);
  } else {
    CHECK(eval.code == kExitDataError);
    CHECK(eval.err.find("NonpositiveC2") != std::string::npos);
  }
  for (const std::string &p : {model, (dir / "model" / "train-log.csv").string(), emb, backend, asv, sd})
    CHECK(fs::exists(p));

  // Re-running a subcommand on identical inputs reproduces its artifacts.
  const std::string model_bytes = ReadFileBytes(model);
  const auto feat_tree = Tree(feats);
  REQUIRE(Cli({"extract", "--config", cfg, "--corpus", corpus, "--out", feats, "--threads", "1"}).code == kExitOk);
  CHECK(Tree(feats) == feat_tree);
  REQUIRE(Cli({"train", "--config", cfg, "--corpus", corpus, "--feats", feats, "--out", model_dir}).code == kExitOk);
  CHECK(ReadFileBytes(model) == model_bytes);
  const std::string asv_bytes = ReadFileBytes(asv);
  REQUIRE(Cli({"score-asv", "--config", cfg, "--backend", backend, "--embeddings", emb, "--corpus", corpus,
               "--split", "eval", "--out", asv}).code == kExitOk);
  CHECK(ReadFileBytes(asv) == asv_bytes);
  fs::remove_all(dir);
  SetLogLevel(LogLevel::kInfo);
}
