// include/srasv/base/error.h

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

#ifndef SRASV_BASE_ERROR_H_
#define SRASV_BASE_ERROR_H_

#include <stdexcept>
#include <string>

namespace srasv {

/// Failure categories raised by the library. Every throwing operation reports
/// one of these through srasv::Error.
enum class Errc {
  kNotWav,
  kUnsupportedFormat,
  kTruncated,
  kTooShort,
  kEmptyInput,
  kOddChannels,
  kShapeMismatch,
  kMissingTrace,
  kZeroFeature,
  kBadMargin,
  kEmptyClass,
  kEmptyDataset,
  kLabelOutOfRange,
  kIo,
  kCorruptCheckpoint,
  kZeroVector,
  kDegenerateData,
  kDimensionMismatch,
  kCohortTooSmall,
  kZeroVariance,
  kOneClassOnly,
  kNonpositiveC2,
  kUnknownAttackLabel,
  kTrialMismatch,
  kMalformedLine,
  kDuplicateUtterance,
  kNonFiniteScore,
  kBadSpec,
  kBadConfig,
};

const char *ErrcName(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string &message);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace srasv

#endif  // SRASV_BASE_ERROR_H_
