// include/srasv/proto/pipeline.h

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

#ifndef SRASV_PROTO_PIPELINE_H_
#define SRASV_PROTO_PIPELINE_H_

// Corpus-level steps shared by the command-line tool and the end-to-end
// tests: features -> joint training -> embeddings/PLDA -> scores.

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "srasv/backend/plda.h"
#include "srasv/base/kv-config.h"
#include "srasv/feat/feature-cache.h"
#include "srasv/feat/feature-extractor.h"
#include "srasv/loss/joint-loss.h"
#include "srasv/metrics/tdcf.h"
#include "srasv/net/network.h"
#include "srasv/proto/synth-corpus.h"
#include "srasv/train/trainer.h"

namespace srasv {

struct BackendOptions {
  PldaTrainOptions plda;
  bool include_spoof = false;
  bool cohort_utterances = false;
};

struct SystemConfig {
  FeatureOptions features;
  NetConfig net;
  LossConfig loss;
  TrainConfig train;
  PldaTrainOptions plda;
  TdcfParams tdcf;
  bool snorm = true;
  int snorm_top_k = 0;  // 0 = DefaultTopK(cohort size)
  bool backend_spoof = false;  // PLDA also sees spoofed train utterances
  bool cohort_utterances = false;  // s-norm cohort of utterances, not class means
  int batch_size = 16;  // embedding and SD scoring

  /// Reads feat.*, net.*, loss.*, train.*, plda.*, backend.snorm,
  /// backend.plda_spoof, backend.cohort (means|utterances),
  /// backend.snorm_top_k, tdcf.*.
  /// net.input_rows/net.input_cols default to the feature geometry.
  static SystemConfig FromConfig(const KvConfig &cfg);
  BackendOptions Backend() const { return {plda, backend_spoof, cohort_utterances}; }
};

/// Extracts one cache file per corpus utterance into `out_dir` and writes
/// out_dir/manifest.txt. Utterances are spread over `threads` workers
/// (0 = hardware concurrency); the output does not depend on the count.
FeatureManifest ExtractCorpusFeatures(const CorpusLayout &corpus, const FeatureOptions &opts,
                                      const std::filesystem::path &out_dir, int threads = 0);

std::vector<std::string> ReadTrainSpeakers(const CorpusLayout &corpus);

/// Split "train" or "heldout" with speaker indices into the training
/// speaker list.
LabeledSet LoadLabeledSplit(const CorpusLayout &corpus, const FeatureManifest &features,
                            const std::string &split);

/// Trains on the train split with the heldout split as dev set and returns
/// the network holding the dev-best parameters. n_speakers and the input
/// geometry are taken from the corpus.
MtlNetwork<float> TrainSystem(const CorpusLayout &corpus, const FeatureManifest &features,
                              SystemConfig cfg, TrainResult *result = nullptr);

/// Utterance id -> embedding.
struct EmbeddingTable {
  std::vector<std::string> ids;
  EmbeddingMatrix rows;

  Eigen::VectorXd Get(const std::string &id) const;  // throws kTrialMismatch
  EmbeddingMatrix Gather(const std::vector<std::string> &ids) const;

 private:
  friend EmbeddingTable MakeEmbeddingTable(std::vector<std::string>, EmbeddingMatrix);
  std::unordered_map<std::string, Eigen::Index> index_;
};

EmbeddingTable MakeEmbeddingTable(std::vector<std::string> ids, EmbeddingMatrix rows);
EmbeddingTable ExtractCorpusEmbeddings(const MtlNetwork<float> &net, const FeatureManifest &features,
                                       const std::vector<std::string> &utterances, int batch_size = 16);
void SaveEmbeddings(const std::filesystem::path &path, const EmbeddingTable &table);
EmbeddingTable LoadEmbeddings(const std::filesystem::path &path);

/// PLDA plus the normalization state it was trained with.
struct SpeakerBackend {
  Eigen::VectorXd center;  // training mean for centering
  PldaModel plda;
  EmbeddingMatrix cohort;  // normalized training embeddings or class means
};

/// PLDA on the normalized train+heldout embeddings. Spoofed utterances keep
/// their speaker label and are used only with `include_spoof`. The s-norm
/// cohort holds the normalized class means, or every training utterance
/// with `cohort_utterances`.
SpeakerBackend TrainBackend(const CorpusLayout &corpus, const EmbeddingTable &table,
                            const BackendOptions &opts = {});
/// Blobs mu, Sb, Sw (the PLDA model) plus center and cohort.
void SaveBackend(const std::filesystem::path &path, const SpeakerBackend &backend);
SpeakerBackend LoadBackend(const std::filesystem::path &path);

/// ASV trials of split "dev" or "eval": PLDA adapted to the split's
/// enrollment data, pooled enrollment, optional adaptive s-norm over the
/// `top_k` best cohort scores (0 = DefaultTopK).
ScoreSet ScoreAsvTrials(const SpeakerBackend &backend, const EmbeddingTable &table,
                        const CorpusLayout &corpus, const std::string &split, bool snorm = true,
                        int top_k = 0);

/// SD score = bona fide logit - spoof logit for every CM protocol entry.
ScoreSet ScoreCmProtocol(const MtlNetwork<float> &net, const FeatureManifest &features,
                         const std::vector<CmProtocolEntry> &protocol, int batch_size = 16);

}  // namespace srasv

#endif  // SRASV_PROTO_PIPELINE_H_
