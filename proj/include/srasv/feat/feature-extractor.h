// include/srasv/feat/feature-extractor.h

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

#ifndef SRASV_FEAT_FEATURE_EXTRACTOR_H_
#define SRASV_FEAT_FEATURE_EXTRACTOR_H_

#include <memory>

#include "srasv/base/kv-config.h"
#include "srasv/feat/feature-cqt.h"
#include "srasv/feat/feature-llfb.h"
#include "srasv/feat/unify.h"

namespace srasv {

struct FeatureOptions {
  FeatureKind kind = FeatureKind::kCqt;
  CqtOptions cqt;
  LlfbOptions llfb;
  int target_frames = kUnifiedFrames;
  bool mean_variance_norm = false;

  /// Reads feat.* keys (feat.kind, feat.cqt_octaves, feat.cqt_bins_per_octave,
  /// feat.llfb_filters, feat.mvn, ...).
  static FeatureOptions FromConfig(const KvConfig &cfg);
  int Rows() const;
};

/// Waveform -> raw TFR -> UnifiedFeature.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(const FeatureOptions &opts);
  const FeatureOptions &options() const { return opts_; }
  FeatureMatrix ComputeRaw(const Waveform &wave) const;
  UnifiedFeature Extract(const Waveform &wave) const;

 private:
  FeatureOptions opts_;
  std::unique_ptr<CqtComputer> cqt_;
  std::unique_ptr<LlfbComputer> llfb_;
};

}  // namespace srasv

#endif  // SRASV_FEAT_FEATURE_EXTRACTOR_H_
