// src/base/error.cc

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

#include "srasv/base/error.h"

namespace srasv {

const char *ErrcName(Errc code) {
  switch (code) {
    case Errc::kNotWav: return "NotWav";
    case Errc::kUnsupportedFormat: return "UnsupportedFormat";
    case Errc::kTruncated: return "Truncated";
    case Errc::kTooShort: return "TooShort";
    case Errc::kEmptyInput: return "EmptyInput";
    case Errc::kOddChannels: return "OddChannels";
    case Errc::kShapeMismatch: return "ShapeMismatch";
    case Errc::kMissingTrace: return "MissingTrace";
    case Errc::kZeroFeature: return "ZeroFeature";
    case Errc::kBadMargin: return "BadMargin";
    case Errc::kEmptyClass: return "EmptyClass";
    case Errc::kEmptyDataset: return "EmptyDataset";
    case Errc::kLabelOutOfRange: return "LabelOutOfRange";
    case Errc::kIo: return "Io";
    case Errc::kCorruptCheckpoint: return "CorruptCheckpoint";
    case Errc::kZeroVector: return "ZeroVector";
    case Errc::kDegenerateData: return "DegenerateData";
    case Errc::kDimensionMismatch: return "DimensionMismatch";
    case Errc::kCohortTooSmall: return "CohortTooSmall";
    case Errc::kZeroVariance: return "ZeroVariance";
    case Errc::kOneClassOnly: return "OneClassOnly";
    case Errc::kNonpositiveC2: return "NonpositiveC2";
    case Errc::kUnknownAttackLabel: return "UnknownAttackLabel";
    case Errc::kTrialMismatch: return "TrialMismatch";
    case Errc::kMalformedLine: return "MalformedLine";
    case Errc::kDuplicateUtterance: return "DuplicateUtterance";
    case Errc::kNonFiniteScore: return "NonFiniteScore";
    case Errc::kBadSpec: return "BadSpec";
    case Errc::kBadConfig: return "BadConfig";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string &message)
    : std::runtime_error(std::string(ErrcName(code)) + ": " + message),
      code_(code) {}

}  // namespace srasv
