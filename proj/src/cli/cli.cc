// src/cli/cli.cc

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

#include "srasv/cli/cli.h"

#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "srasv/base/error.h"
#include "srasv/base/io.h"
#include "srasv/base/log.h"
#include "srasv/fusion/fusion.h"
#include "srasv/metrics/detection.h"
#include "srasv/net/checkpoint.h"
#include "srasv/proto/pipeline.h"
#include "srasv/proto/protocol.h"
#include "srasv/proto/synth-corpus.h"

namespace srasv {

namespace fs = std::filesystem;

namespace {

// Options shared by the subcommands; each subcommand binds what it needs.
struct CliOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string features;
  std::string out;
  std::string protocol;
  std::vector<std::string> scores;
  std::string corpus;
  std::string feats;
  std::string model;
  std::string embeddings;
  std::string backend;
  std::string split = "eval";
  std::string apply;
  std::string report;
  int threads = 0;
  bool quiet = false;
};

KvConfig LoadConfig(const CliOptions &o) {
  KvConfig cfg = o.config.empty() ? KvConfig() : KvConfig::Load(o.config);
  if (!o.features.empty()) cfg.Set("feat.kind", o.features);
  if (o.seed) {
    cfg.Set("synth.seed", std::to_string(*o.seed));
    cfg.Set("train.seed", std::to_string(*o.seed));
  }
  return cfg;
}

FeatureManifest LoadManifest(const std::string &dir) {
  return FeatureManifest::Load(fs::path(dir) / "manifest.txt");
}

std::string Percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", 100.0 * v);
  return buf;
}

bool HasKey(const ScoreSet &s, TrialKey key) {
  for (const ScoreRecord &r : s.records)
    if (r.key == key) return true;
  return false;
}

int RunSynth(const CliOptions &o, std::ostream &out) {
  const SynthCorpusSpec spec = SynthCorpusSpec::FromConfig(LoadConfig(o));
  const SynthCorpusSummary s = GenerateSynthCorpus(spec, o.out);
  out << "bonafide_files " << s.bonafide_files << "\nspoof_files " << s.spoof_files << "\n";
  return kExitOk;
}

int RunExtract(const CliOptions &o, std::ostream &out) {
  const SystemConfig sc = SystemConfig::FromConfig(LoadConfig(o));
  const FeatureManifest m = ExtractCorpusFeatures(CorpusLayout(o.corpus), sc.features, o.out, o.threads);
  out << "features " << m.entries().size() << " (" << FeatureKindName(sc.features.kind) << ", "
      << sc.features.Rows() << "x" << sc.features.target_frames << ")\n";
  return kExitOk;
}

int RunTrain(const CliOptions &o, std::ostream &out) {
  SystemConfig sc = SystemConfig::FromConfig(LoadConfig(o));
  fs::create_directories(o.out);
  sc.train.log_path = (fs::path(o.out) / "train-log.csv").string();
  TrainResult r;
  const MtlNetwork<float> net = TrainSystem(CorpusLayout(o.corpus), LoadManifest(o.feats), sc, &r);
  SaveCheckpoint((fs::path(o.out) / "model.ckpt").string(), net);
  out << "best epoch " << r.best_epoch << " dev loss " << r.best_dev_loss << "\n";
  return kExitOk;
}

int RunEmbed(const CliOptions &o, std::ostream &out) {
  const SystemConfig sc = SystemConfig::FromConfig(LoadConfig(o));
  const MtlNetwork<float> net = LoadCheckpoint(o.model);
  const CorpusLayout corpus(o.corpus);
  const EmbeddingTable t =
      ExtractCorpusEmbeddings(net, LoadManifest(o.feats), CorpusUtterances(corpus), sc.batch_size);
  SaveEmbeddings(o.out, t);
  out << "embeddings " << t.ids.size() << " x " << t.rows.cols() << "\n";
  return kExitOk;
}

int RunPlda(const CliOptions &o, std::ostream &out) {
  const SystemConfig sc = SystemConfig::FromConfig(LoadConfig(o));
  const SpeakerBackend b =
      TrainBackend(CorpusLayout(o.corpus), LoadEmbeddings(o.embeddings), sc.Backend());
  SaveBackend(o.out, b);
  out << "plda dim " << b.plda.dim() << " cohort " << b.cohort.rows() << "\n";
  return kExitOk;
}

int RunScoreAsv(const CliOptions &o, std::ostream &out) {
  const SystemConfig sc = SystemConfig::FromConfig(LoadConfig(o));
  const ScoreSet s = ScoreAsvTrials(LoadBackend(o.backend), LoadEmbeddings(o.embeddings),
                                    CorpusLayout(o.corpus), o.split, sc.snorm, sc.snorm_top_k);
  WriteScoreFile(o.out, s);
  out << "asv trials " << s.records.size() << "\n";
  return kExitOk;
}

int RunScoreSd(const CliOptions &o, std::ostream &out) {
  const SystemConfig sc = SystemConfig::FromConfig(LoadConfig(o));
  const ScoreSet s =
      ScoreCmProtocol(LoadCheckpoint(o.model), LoadManifest(o.feats), ReadCmProtocol(o.protocol), sc.batch_size);
  WriteScoreFile(o.out, s);
  out << "sd trials " << s.records.size() << "\n";
  return kExitOk;
}

int RunEval(const CliOptions &o, std::ostream &out) {
  const SystemConfig sc = SystemConfig::FromConfig(LoadConfig(o));
  const ScoreSet *sd = nullptr, *asv = nullptr;
  std::vector<ScoreSet> sets;
  for (const std::string &p : o.scores) sets.push_back(ReadScoreFile(p));
  for (const ScoreSet &s : sets) {
    const bool is_sd = HasKey(s, TrialKey::kBonafide);
    const bool is_asv = HasKey(s, TrialKey::kTarget) || HasKey(s, TrialKey::kNontarget);
    if (is_sd == is_asv)
      throw Error(Errc::kMalformedLine, "score file keys are neither SD (bonafide/spoof) nor ASV "
                                        "(target/nontarget/spoof)");
    const ScoreSet *&slot = is_sd ? sd : asv;
    if (slot) throw Error(Errc::kTrialMismatch, std::string("two ") + (is_sd ? "SD" : "ASV") + " score files");
    slot = &s;
  }
  if (sd && asv) {
    const TandemReport r = EvaluateTandem(*sd, *asv, sc.tdcf);
    out << TandemReportText(r);
    if (!o.report.empty()) WriteFileAtomic(o.report, TandemReportCsv(r));
    return kExitOk;
  }
  if (!o.report.empty()) throw Error(Errc::kTrialMismatch, "--report needs both SD and ASV scores");
  if (sd) {
    out << "SD EER " << Percent(Eer(sd->WithKey(TrialKey::kBonafide), sd->WithKey(TrialKey::kSpoof)).eer) << "\n";
  } else {
    out << "ASV EER "
        << Percent(Eer(asv->WithKey(TrialKey::kTarget), asv->WithKey(TrialKey::kNontarget)).eer) << "\n";
  }
  return kExitOk;
}

int RunFuse(const CliOptions &o, std::ostream &out) {
  std::vector<ScoreSet> sets;
  for (const std::string &p : o.scores) sets.push_back(ReadScoreFile(p));
  FusionModel model;
  if (!o.apply.empty()) {
    model = LoadFusionModel(o.apply);
  } else {
    const FusionFit fit = FitFusion(sets);
    model = fit.model;
    if (!o.model.empty()) SaveFusionModel(o.model, model);
    out << "fusion objective " << (fit.objective.empty() ? 0.0 : fit.objective.back()) << "\n";
  }
  const ScoreSet fused = ApplyFusion(model, sets);
  WriteScoreFile(o.out, fused);
  out << "weights";
  for (double w : model.weights) out << " " << w;
  out << " offset " << model.offset << "\n";
  return kExitOk;
}

}  // namespace

int CliRun(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CliOptions o;
  CLI::App app{"Spoofing-robust speaker verification toolkit", args.empty() ? "srasv" : args[0]};
  app.require_subcommand(1);
  app.add_flag("-q,--quiet", o.quiet, "Suppress log messages");
  std::function<int(const CliOptions &, std::ostream &)> run;

  auto sub = [&](const char *name, const char *help, int (*fn)(const CliOptions &, std::ostream &)) {
    CLI::App *s = app.add_subcommand(name, help);
    s->callback([&run, fn] { run = fn; });
    return s;
  };
  auto config = [&](CLI::App *s) { s->add_option("--config", o.config, "key = value config file")->check(CLI::ExistingFile); };
  auto seed = [&](CLI::App *s) { s->add_option("--seed", o.seed, "Overrides synth.seed and train.seed"); };
  auto features = [&](CLI::App *s) {
    s->add_option("--features", o.features, "Front-end")->check(CLI::IsMember({"cqt", "llfb"}));
  };
  auto output = [&](CLI::App *s, const char *what) { s->add_option("--out", o.out, what)->required(); };
  auto corpus = [&](CLI::App *s) {
    s->add_option("--corpus", o.corpus, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  };
  auto feats = [&](CLI::App *s) {
    s->add_option("--feats", o.feats, "Feature directory")->required()->check(CLI::ExistingDirectory);
  };

  CLI::App *synth = sub("synth", "Generate the synthetic corpus", RunSynth);
  config(synth), seed(synth), output(synth, "Corpus directory");

  CLI::App *extract = sub("extract", "Extract unified features for every corpus utterance", RunExtract);
  config(extract), features(extract), corpus(extract), output(extract, "Feature directory");
  extract->add_option("--threads", o.threads, "Worker threads (0 = all cores)");

  CLI::App *train = sub("train", "Jointly train the multi-task network", RunTrain);
  config(train), seed(train), features(train), corpus(train), feats(train);
  output(train, "Model directory (model.ckpt, train-log.csv)");

  CLI::App *embed = sub("embed", "Extract speaker embeddings", RunEmbed);
  config(embed), corpus(embed), feats(embed), output(embed, "Embedding file");
  embed->add_option("--model", o.model, "Network checkpoint")->required()->check(CLI::ExistingFile);

  CLI::App *plda = sub("plda", "Train the PLDA back-end", RunPlda);
  config(plda), corpus(plda), output(plda, "Back-end file");
  plda->add_option("--embeddings", o.embeddings, "Embedding file")->required()->check(CLI::ExistingFile);

  CLI::App *score_asv = sub("score-asv", "Score the ASV trials of a split", RunScoreAsv);
  config(score_asv), corpus(score_asv), output(score_asv, "Score file");
  score_asv->add_option("--backend", o.backend, "Back-end file")->required()->check(CLI::ExistingFile);
  score_asv->add_option("--embeddings", o.embeddings, "Embedding file")->required()->check(CLI::ExistingFile);
  score_asv->add_option("--split", o.split, "Trial split")->check(CLI::IsMember({"dev", "eval"}));

  CLI::App *score_sd = sub("score-sd", "Score a countermeasure protocol", RunScoreSd);
  config(score_sd), feats(score_sd), output(score_sd, "Score file");
  score_sd->add_option("--model", o.model, "Network checkpoint")->required()->check(CLI::ExistingFile);
  score_sd->add_option("--protocol", o.protocol, "CM protocol")->required()->check(CLI::ExistingFile);

  CLI::App *eval = sub("eval", "EER, min t-DCF and per-attack report", RunEval);
  config(eval);
  eval->add_option("--scores", o.scores, "SD and/or ASV score files")
      ->required()->expected(1, 2)->check(CLI::ExistingFile);
  eval->add_option("--report", o.report, "Metric report CSV");

  CLI::App *fuse = sub("fuse", "Logistic-regression score fusion", RunFuse);
  output(fuse, "Fused score file");
  fuse->add_option("--scores", o.scores, "Score files of the systems")
      ->required()->expected(1, -1)->check(CLI::ExistingFile);
  fuse->add_option("--model", o.model, "Write the fitted fusion model here");
  fuse->add_option("--apply", o.apply, "Apply this fusion model instead of fitting")->check(CLI::ExistingFile);

  std::vector<std::string> rev;  // CLI11 consumes arguments from the back
  for (std::size_t i = args.size(); i > 1; --i) rev.push_back(args[i - 1]);
  const LogLevel saved = GetLogLevel();
  try {
    app.parse(rev);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (o.quiet) SetLogLevel(LogLevel::kSilent);
  int code = kExitOk;
  try {
    code = run(o, out);
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    code = kExitDataError;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    code = kExitDataError;
  }
  SetLogLevel(saved);
  return code;
}

int CliRun(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  return CliRun(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace srasv
