// include/srasv/feat/feature-types.h

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

#ifndef SRASV_FEAT_FEATURE_TYPES_H_
#define SRASV_FEAT_FEATURE_TYPES_H_

#include <cstdint>
#include <string>

#include <Eigen/Core>

namespace srasv {

/// Time-frequency representation: one row per frequency bin, one column per
/// frame.
using FeatureMatrix =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class FeatureKind : std::uint8_t { kCqt = 0, kLlfb = 1 };

const char *FeatureKindName(FeatureKind kind);
FeatureKind ParseFeatureKind(const std::string &name);

constexpr int kUnifiedFrames = 400;

struct UnifiedFeature {
  FeatureMatrix matrix;  // rows x kUnifiedFrames
  FeatureKind kind = FeatureKind::kCqt;
};

}  // namespace srasv

#endif  // SRASV_FEAT_FEATURE_TYPES_H_
