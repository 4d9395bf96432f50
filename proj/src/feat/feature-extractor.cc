// src/feat/feature-extractor.cc

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

#include "srasv/feat/feature-extractor.h"

namespace srasv {

FeatureOptions FeatureOptions::FromConfig(const KvConfig &cfg) {
  FeatureOptions o;
  o.kind = ParseFeatureKind(cfg.GetString("feat.kind", FeatureKindName(o.kind)));
  o.cqt.octaves = static_cast<int>(cfg.GetInt("feat.cqt_octaves", o.cqt.octaves));
  o.cqt.bins_per_octave =
      static_cast<int>(cfg.GetInt("feat.cqt_bins_per_octave", o.cqt.bins_per_octave));
  o.cqt.sparsity = cfg.GetDouble("feat.cqt_sparsity", o.cqt.sparsity);
  o.llfb.num_filters = static_cast<int>(cfg.GetInt("feat.llfb_filters", o.llfb.num_filters));
  o.llfb.frame_length_ms = cfg.GetDouble("feat.llfb_frame_ms", o.llfb.frame_length_ms);
  o.llfb.frame_shift_ms = cfg.GetDouble("feat.llfb_shift_ms", o.llfb.frame_shift_ms);
  o.llfb.fft_size = static_cast<int>(cfg.GetInt("feat.llfb_fft", o.llfb.fft_size));
  o.target_frames = static_cast<int>(cfg.GetInt("feat.frames", o.target_frames));
  o.mean_variance_norm = cfg.GetBool("feat.mvn", o.mean_variance_norm);
  return o;
}

int FeatureOptions::Rows() const {
  return kind == FeatureKind::kCqt ? cqt.NumBins() : llfb.num_filters;
}

FeatureExtractor::FeatureExtractor(const FeatureOptions &opts) : opts_(opts) {
  if (opts_.kind == FeatureKind::kCqt)
    cqt_ = std::make_unique<CqtComputer>(opts_.cqt);
  else
    llfb_ = std::make_unique<LlfbComputer>(opts_.llfb);
}

FeatureMatrix FeatureExtractor::ComputeRaw(const Waveform &wave) const {
  return cqt_ ? cqt_->Compute(wave) : llfb_->Compute(wave);
}

UnifiedFeature FeatureExtractor::Extract(const Waveform &wave) const {
  UnifiedFeature f = Unify(ComputeRaw(wave), opts_.kind, opts_.target_frames);
  if (opts_.mean_variance_norm) NormalizeMeanVariance(&f.matrix);
  return f;
}

}  // namespace srasv
