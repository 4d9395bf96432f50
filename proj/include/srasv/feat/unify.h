// include/srasv/feat/unify.h

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

#ifndef SRASV_FEAT_UNIFY_H_
#define SRASV_FEAT_UNIFY_H_

#include "srasv/feat/feature-types.h"

namespace srasv {

/// Fixes the time axis at `target_frames` columns: longer inputs keep their
/// first `target_frames` columns, shorter ones are tiled cyclically from
/// column 0. Throws kEmptyInput on a matrix without columns.
UnifiedFeature Unify(const FeatureMatrix &tfr, FeatureKind kind,
                     int target_frames = kUnifiedFrames);

/// Utterance-level mean/variance normalization over the whole matrix.
/// A constant matrix becomes all zeros.
void NormalizeMeanVariance(FeatureMatrix *matrix);

}  // namespace srasv

#endif  // SRASV_FEAT_UNIFY_H_
