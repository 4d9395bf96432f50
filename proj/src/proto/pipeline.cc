// src/proto/pipeline.cc

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

#include "srasv/proto/pipeline.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "srasv/backend/embedding.h"
#include "srasv/backend/snorm.h"
#include "srasv/base/error.h"
#include "srasv/base/io.h"
#include "srasv/base/log.h"
#include "srasv/net/checkpoint.h"

namespace srasv {

namespace {


Blob VectorBlob(const std::string &name, const double *data, std::vector<std::uint32_t> dims) {
  std::size_t n = 1;
  for (std::uint32_t d : dims) n *= d;
  Blob b;
  b.name = name;
  b.dims = std::move(dims);
  b.data.assign(data, data + n);
  return b;
}

}  // namespace

SystemConfig SystemConfig::FromConfig(const KvConfig &cfg) {
  SystemConfig c;
  c.features = FeatureOptions::FromConfig(cfg);
  KvConfig net_cfg = cfg;
  if (!cfg.Has("net.input_rows")) net_cfg.Set("net.input_rows", std::to_string(c.features.Rows()));
  if (!cfg.Has("net.input_cols")) net_cfg.Set("net.input_cols", std::to_string(c.features.target_frames));
  if (!cfg.Has("net.input_kind")) net_cfg.Set("net.input_kind", FeatureKindName(c.features.kind));
  c.net = NetConfig::FromConfig(net_cfg);
  c.loss = LossConfig::FromConfig(cfg);
  c.train = TrainConfig::FromConfig(cfg);
  c.plda.iterations = static_cast<int>(cfg.GetInt("plda.iterations", c.plda.iterations));
  c.plda.floor_scale = cfg.GetDouble("plda.floor_scale", c.plda.floor_scale);
  c.snorm = cfg.GetBool("backend.snorm", c.snorm);
  c.snorm_top_k = static_cast<int>(cfg.GetInt("backend.snorm_top_k", c.snorm_top_k));
  if (c.snorm_top_k < 0) throw Error(Errc::kBadConfig, "backend.snorm_top_k must be >= 0");
  c.backend_spoof = cfg.GetBool("backend.plda_spoof", c.backend_spoof);
  const std::string cohort = cfg.GetString("backend.cohort", "means");
  if (cohort != "means" && cohort != "utterances")
    throw Error(Errc::kBadConfig, "backend.cohort must be means or utterances, got '" + cohort + "'");
  c.cohort_utterances = cohort == "utterances";
  c.batch_size = static_cast<int>(cfg.GetInt("backend.batch_size", c.batch_size));
  TdcfParams &t = c.tdcf;
  t.pi_tar = cfg.GetDouble("tdcf.pi_tar", t.pi_tar);
  t.pi_non = cfg.GetDouble("tdcf.pi_non", t.pi_non);
  t.pi_spoof = cfg.GetDouble("tdcf.pi_spoof", t.pi_spoof);
  t.c_miss_sd = cfg.GetDouble("tdcf.c_miss_sd", t.c_miss_sd);
  t.c_fa_sd = cfg.GetDouble("tdcf.c_fa_sd", t.c_fa_sd);
  t.c_miss_asv = cfg.GetDouble("tdcf.c_miss_asv", t.c_miss_asv);
  t.c_fa_asv = cfg.GetDouble("tdcf.c_fa_asv", t.c_fa_asv);
  t.Validate();
  return c;
}

FeatureManifest ExtractCorpusFeatures(const CorpusLayout &corpus, const FeatureOptions &opts,
                                      const std::filesystem::path &out_dir, int threads) {
  const std::vector<std::string> utts = CorpusUtterances(corpus);
  std::filesystem::create_directories(out_dir);
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = static_cast<int>(std::min<std::size_t>(threads, std::max<std::size_t>(1, utts.size())));
  std::vector<std::unique_ptr<FeatureExtractor>> extractors;
  for (int t = 0; t < threads; ++t) extractors.push_back(std::make_unique<FeatureExtractor>(opts));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&](const FeatureExtractor &fx) {
    for (std::size_t i; (i = next.fetch_add(1)) < utts.size();) {
      try {
        WriteFeatureCache(out_dir / (utts[i] + ".feat"), fx.Extract(ReadWav(corpus.Wav(utts[i]))));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = utts.size();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work, std::cref(*extractors[t]));
  work(*extractors[0]);
  for (std::thread &th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  FeatureManifest manifest;
  for (const std::string &utt : utts) manifest.Add(utt, utt + ".feat");
  manifest.Save(out_dir / "manifest.txt");
  manifest.set_base_dir(out_dir);
  return manifest;
}

std::vector<std::string> ReadTrainSpeakers(const CorpusLayout &corpus) {
  std::vector<std::string> out;
  std::istringstream in(ReadFileBytes(corpus.Speakers()));
  std::string s;
  while (in >> s) out.push_back(s);
  return out;
}

LabeledSet LoadLabeledSplit(const CorpusLayout &corpus, const FeatureManifest &features,
                            const std::string &split) {
  const std::vector<std::string> speakers = ReadTrainSpeakers(corpus);
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < speakers.size(); ++i) index[speakers[i]] = static_cast<int>(i);
  LabeledSet set;
  for (const CmProtocolEntry &e : ReadCmProtocol(corpus.CmProtocol(split))) {
    const auto it = index.find(e.speaker_id);
    if (it == index.end())
      throw Error(Errc::kLabelOutOfRange, "speaker " + e.speaker_id + " is not a training speaker");
    set.Add(e.utterance_id, features.Read(e.utterance_id).matrix, e.key == TrialKey::kSpoof ? 1 : 0,
            it->second);
  }
  return set;
}

MtlNetwork<float> TrainSystem(const CorpusLayout &corpus, const FeatureManifest &features,
                              SystemConfig cfg, TrainResult *result) {
  const LabeledSet train = LoadLabeledSplit(corpus, features, "train");
  const LabeledSet dev = LoadLabeledSplit(corpus, features, "heldout");
  if (train.size() == 0) throw Error(Errc::kEmptyDataset, "empty training split");
  cfg.net.n_speakers = static_cast<int>(ReadTrainSpeakers(corpus).size());
  cfg.net.input_rows = static_cast<int>(train.features[0].rows());
  cfg.net.input_cols = static_cast<int>(train.features[0].cols());
  MtlNetwork<float> net(cfg.net);
  net.InitParams(cfg.train.seed);
  TrainResult r = Train(&net, train, dev.size() ? &dev : nullptr, cfg.train, cfg.loss);
  net.params() = r.best_params;
  if (result) *result = std::move(r);
  return net;
}

Eigen::VectorXd EmbeddingTable::Get(const std::string &id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw Error(Errc::kTrialMismatch, "no embedding for " + id);
  return rows.row(it->second).transpose();
}

EmbeddingMatrix EmbeddingTable::Gather(const std::vector<std::string> &want) const {
  EmbeddingMatrix out(want.size(), rows.cols());
  for (std::size_t i = 0; i < want.size(); ++i) out.row(i) = Get(want[i]).transpose();
  return out;
}

EmbeddingTable MakeEmbeddingTable(std::vector<std::string> ids, EmbeddingMatrix rows) {
  if (static_cast<Eigen::Index>(ids.size()) != rows.rows())
    throw Error(Errc::kDimensionMismatch, "embedding id count differs from row count");
  EmbeddingTable t;
  t.ids = std::move(ids);
  t.rows = std::move(rows);
  for (std::size_t i = 0; i < t.ids.size(); ++i)
    if (!t.index_.emplace(t.ids[i], static_cast<Eigen::Index>(i)).second)
      throw Error(Errc::kDuplicateUtterance, "duplicate embedding id " + t.ids[i]);
  return t;
}

EmbeddingTable ExtractCorpusEmbeddings(const MtlNetwork<float> &net, const FeatureManifest &features,
                                       const std::vector<std::string> &utterances, int batch_size) {
  EmbeddingMatrix rows(utterances.size(), net.config().EmbeddingDim());
  for (std::size_t start = 0; start < utterances.size(); start += batch_size) {
    const std::size_t n = std::min<std::size_t>(batch_size, utterances.size() - start);
    std::vector<FeatureMatrix> batch;
    for (std::size_t i = 0; i < n; ++i) batch.push_back(features.Read(utterances[start + i]).matrix);
    rows.middleRows(start, n) = ExtractEmbeddings(net, batch, batch_size);
  }
  return MakeEmbeddingTable(utterances, std::move(rows));
}

void SaveEmbeddings(const std::filesystem::path &path, const EmbeddingTable &table) {
  BlobFile f;
  const auto dim = static_cast<std::uint32_t>(table.rows.cols());
  for (std::size_t i = 0; i < table.ids.size(); ++i)
    f.blobs.push_back(VectorBlob(table.ids[i], table.rows.row(i).data(), {dim}));
  WriteBlobFile(path.string(), f);
}

EmbeddingTable LoadEmbeddings(const std::filesystem::path &path) {
  const BlobFile f = ReadBlobFile(path.string());
  if (f.blobs.empty()) return MakeEmbeddingTable({}, EmbeddingMatrix(0, 0));
  const std::size_t dim = f.blobs[0].data.size();
  std::vector<std::string> ids;
  EmbeddingMatrix rows(f.blobs.size(), dim);
  for (std::size_t i = 0; i < f.blobs.size(); ++i) {
    if (f.blobs[i].data.size() != dim)
      throw Error(Errc::kCorruptCheckpoint, "embedding " + f.blobs[i].name + " has the wrong size");
    ids.push_back(f.blobs[i].name);
    for (std::size_t j = 0; j < dim; ++j) rows(i, j) = f.blobs[i].data[j];
  }
  return MakeEmbeddingTable(std::move(ids), std::move(rows));
}

SpeakerBackend TrainBackend(const CorpusLayout &corpus, const EmbeddingTable &table,
                            const BackendOptions &opts) {
  std::vector<std::string> utts;
  std::map<std::string, int> speaker_index;
  std::vector<int> labels;
  for (const char *split : {"train", "heldout"}) {
    for (const CmProtocolEntry &e : ReadCmProtocol(corpus.CmProtocol(split))) {
      if (e.key != TrialKey::kBonafide && !opts.include_spoof) continue;
      const auto [it, added] = speaker_index.emplace(e.speaker_id, static_cast<int>(speaker_index.size()));
      utts.push_back(e.utterance_id);
      labels.push_back(it->second);
    }
  }
  const EmbeddingMatrix raw = table.Gather(utts);
  SpeakerBackend b;
  // Float rounding keeps the saved state identical to the in-memory one.
  b.center = MeanEmbedding(raw).cast<float>().cast<double>();
  const EmbeddingMatrix x = CenterLengthNorm(raw, b.center);
  b.plda = TrainPlda(x, labels, opts.plda).model;
  if (opts.cohort_utterances) {
    b.cohort = x.cast<float>().cast<double>();
    return b;
  }
  b.cohort.resize(speaker_index.size(), x.cols());
  for (std::size_t c = 0; c < speaker_index.size(); ++c) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(x.cols());
    int n = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == static_cast<int>(c)) {
        sum += x.row(i).transpose();
        ++n;
      }
    b.cohort.row(c) = LengthNormalize(sum / n).cast<float>().cast<double>().transpose();
  }
  return b;
}

void SaveBackend(const std::filesystem::path &path, const SpeakerBackend &backend) {
  const std::string tmp = path.string() + ".plda";
  SavePlda(tmp, backend.plda);
  BlobFile f = ReadBlobFile(tmp);
  std::filesystem::remove(tmp);
  const auto d = static_cast<std::uint32_t>(backend.center.size());
  f.blobs.push_back(VectorBlob("center", backend.center.data(), {d}));
  f.blobs.push_back(VectorBlob("cohort", backend.cohort.data(),
                               {static_cast<std::uint32_t>(backend.cohort.rows()), d}));
  WriteBlobFile(path.string(), f);
}

SpeakerBackend LoadBackend(const std::filesystem::path &path) {
  SpeakerBackend b;
  b.plda = LoadPlda(path.string());
  const BlobFile f = ReadBlobFile(path.string());
  const Blob &center = f.Get("center");
  const Blob &cohort = f.Get("cohort");
  const auto d = static_cast<Eigen::Index>(b.plda.dim());
  if (center.data.size() != static_cast<std::size_t>(d) || cohort.dims.size() != 2 || cohort.dims[1] != d)
    throw Error(Errc::kCorruptCheckpoint, "backend blobs disagree with the PLDA dimension");
  b.center = Eigen::Map<const Eigen::VectorXf>(center.data.data(), d).cast<double>();
  b.cohort = Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                 cohort.data.data(), cohort.dims[0], d)
                 .cast<double>();
  return b;
}

ScoreSet ScoreAsvTrials(const SpeakerBackend &backend, const EmbeddingTable &table,
                        const CorpusLayout &corpus, const std::string &split, bool snorm,
                        int top_k) {
  const std::vector<EnrollmentEntry> enroll = ReadEnrollment(corpus.Enrollment(split));
  std::vector<std::string> enroll_utts;
  for (const EnrollmentEntry &e : enroll)
    enroll_utts.insert(enroll_utts.end(), e.utterance_ids.begin(), e.utterance_ids.end());
  const EmbeddingMatrix enroll_norm = CenterLengthNorm(table.Gather(enroll_utts), backend.center);
  const PldaScorer scorer(AdaptPlda(backend.plda, enroll_norm));

  std::map<std::string, Eigen::VectorXd> models;
  std::map<std::string, CohortStats> model_stats;
  if (top_k == 0) top_k = DefaultTopK(backend.cohort.rows());
  auto cohort_scores = [&](const Eigen::VectorXd &v) {
    std::vector<double> s;
    for (Eigen::Index c = 0; c < backend.cohort.rows(); ++c)
      s.push_back(scorer.Score(v, backend.cohort.row(c).transpose()));
    return s;
  };
  for (const EnrollmentEntry &e : enroll) {
    const Eigen::VectorXd m =
        PoolEnrollment(CenterLengthNorm(table.Gather(e.utterance_ids), backend.center));
    models[e.speaker_id] = m;
    if (snorm) model_stats[e.speaker_id] = TopKStats(cohort_scores(m), top_k);
  }

  std::map<std::string, CohortStats> test_stats;
  ScoreSet out;
  for (const AsvTrialEntry &t : ReadAsvTrials(corpus.AsvTrials(split))) {
    const auto it = models.find(t.enroll_speaker_id);
    if (it == models.end())
      throw Error(Errc::kTrialMismatch, "trial for unenrolled speaker " + t.enroll_speaker_id);
    const Eigen::VectorXd test = LengthNormalize(table.Get(t.test_utterance_id) - backend.center);
    double s = scorer.Score(it->second, test);
    if (snorm) {
      auto ts = test_stats.find(t.test_utterance_id);
      if (ts == test_stats.end())
        ts = test_stats.emplace(t.test_utterance_id, TopKStats(cohort_scores(test), top_k)).first;
      s = AdaptiveSNorm(s, model_stats.at(t.enroll_speaker_id), ts->second);
    }
    out.records.push_back({t.TrialId(), s, t.key, t.key == TrialKey::kSpoof ? t.attack_id : ""});
  }
  return out;
}

ScoreSet ScoreCmProtocol(const MtlNetwork<float> &net, const FeatureManifest &features,
                         const std::vector<CmProtocolEntry> &protocol, int batch_size) {
  if (!net.config().sd_enabled) throw Error(Errc::kShapeMismatch, "network has no SD head");
  ScoreSet out;
  const int rows = net.config().input_rows, cols = net.config().input_cols;
  const std::size_t plane = static_cast<std::size_t>(rows) * cols;
  for (std::size_t start = 0; start < protocol.size(); start += batch_size) {
    const std::size_t n = std::min<std::size_t>(batch_size, protocol.size() - start);
    Tensor<float> x({static_cast<int>(n), 1, rows, cols});
    for (std::size_t i = 0; i < n; ++i) {
      const FeatureMatrix m = features.Read(protocol[start + i].utterance_id).matrix;
      if (m.rows() != rows || m.cols() != cols)
        throw Error(Errc::kShapeMismatch, "feature geometry does not match the network");
      std::copy(m.data(), m.data() + plane, x.ptr() + i * plane);
    }
    const ForwardOutput<float> fwd = net.Forward(x, Mode::kEval);
    for (std::size_t i = 0; i < n; ++i) {
      const CmProtocolEntry &e = protocol[start + i];
      const double s = static_cast<double>(fwd.sd_logits(i, 0)) - fwd.sd_logits(i, 1);
      out.records.push_back({e.utterance_id, s, e.key, e.key == TrialKey::kSpoof ? e.attack_id : ""});
    }
  }
  return out;
}

}  // namespace srasv
