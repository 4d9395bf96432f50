// include/srasv/feat/feature-cache.h

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

#ifndef SRASV_FEAT_FEATURE_CACHE_H_
#define SRASV_FEAT_FEATURE_CACHE_H_

#include <filesystem>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "srasv/feat/feature-types.h"

namespace srasv {

// Cache file: "SRAV", kind u8, rows u32, cols u32, then rows*cols
// little-endian f32 values in row-major order.
std::string EncodeFeatureCache(const UnifiedFeature &feature);
UnifiedFeature DecodeFeatureCache(std::string_view bytes);
void WriteFeatureCache(const std::filesystem::path &path, const UnifiedFeature &feature);
UnifiedFeature ReadFeatureCache(const std::filesystem::path &path);

/// utterance_id -> cache path, one "id path" pair per line. Relative paths
/// resolve against the manifest's directory.
class FeatureManifest {
 public:
  static FeatureManifest Load(const std::filesystem::path &path);
  void Save(const std::filesystem::path &path) const;

  void Add(const std::string &utt_id, const std::filesystem::path &cache_path);
  bool Contains(const std::string &utt_id) const;
  std::filesystem::path PathFor(const std::string &utt_id) const;
  UnifiedFeature Read(const std::string &utt_id) const;
  const std::vector<std::pair<std::string, std::filesystem::path>> &entries() const {
    return entries_;
  }
  void set_base_dir(const std::filesystem::path &dir) { base_dir_ = dir; }

 private:
  std::vector<std::pair<std::string, std::filesystem::path>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::filesystem::path base_dir_;
};

}  // namespace srasv

#endif  // SRASV_FEAT_FEATURE_CACHE_H_
