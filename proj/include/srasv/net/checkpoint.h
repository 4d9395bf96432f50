// include/srasv/net/checkpoint.h

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

#ifndef SRASV_NET_CHECKPOINT_H_
#define SRASV_NET_CHECKPOINT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "srasv/feat/feature-types.h"
#include "srasv/net/network.h"

namespace srasv {

struct Blob {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> data;
};

/// Named f32 blob container shared by network and PLDA model files:
/// "SRNN", version, n_speakers, input kind, blob count, then per blob the
/// name, shape, data and a CRC-32 of everything before it in the blob.
struct BlobFile {
  static constexpr std::uint32_t kVersion = 1;
  std::uint32_t version = kVersion;
  std::uint32_t n_speakers = 0;
  FeatureKind kind = FeatureKind::kCqt;
  std::vector<Blob> blobs;

  const Blob *Find(const std::string &name) const;
  const Blob &Get(const std::string &name) const;  // throws kCorruptCheckpoint
};

std::string EncodeBlobFile(const BlobFile &file);
BlobFile DecodeBlobFile(std::string_view bytes);
void WriteBlobFile(const std::string &path, const BlobFile &file);
BlobFile ReadBlobFile(const std::string &path);

/// Architecture is stored in a "meta.arch" blob so that loading needs no
/// side configuration.
BlobFile NetworkToBlobs(const MtlNetwork<float> &net);
MtlNetwork<float> NetworkFromBlobs(const BlobFile &file);

void SaveCheckpoint(const std::string &path, const MtlNetwork<float> &net);
MtlNetwork<float> LoadCheckpoint(const std::string &path);

}  // namespace srasv

#endif  // SRASV_NET_CHECKPOINT_H_
