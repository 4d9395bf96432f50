// src/feat/feature-cache.cc

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

#include "srasv/feat/feature-cache.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "srasv/base/error.h"
#include "srasv/base/io.h"

namespace srasv {

std::string EncodeFeatureCache(const UnifiedFeature &feature) {
  ByteWriter w;
  w.PutBytes("SRAV");
  w.Put<std::uint8_t>(static_cast<std::uint8_t>(feature.kind));
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(feature.matrix.rows()));
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(feature.matrix.cols()));
  w.PutBytes(std::string_view(reinterpret_cast<const char *>(feature.matrix.data()),
                              sizeof(float) * feature.matrix.size()));
  return w.bytes();
}

UnifiedFeature DecodeFeatureCache(std::string_view bytes) {
  ByteReader r(bytes, Errc::kTruncated);
  if (r.GetBytes(4) != "SRAV") throw Error(Errc::kCorruptCheckpoint, "bad feature cache magic");
  const std::uint8_t kind = r.Get<std::uint8_t>();
  if (kind > 1) throw Error(Errc::kCorruptCheckpoint, "bad feature kind");
  const std::uint32_t rows = r.Get<std::uint32_t>();
  const std::uint32_t cols = r.Get<std::uint32_t>();
  const std::size_t count = static_cast<std::size_t>(rows) * cols;
  std::string_view raw = r.GetBytes(count * sizeof(float));
  UnifiedFeature f;
  f.kind = static_cast<FeatureKind>(kind);
  f.matrix.resize(rows, cols);
  std::memcpy(f.matrix.data(), raw.data(), raw.size());
  return f;
}

void WriteFeatureCache(const std::filesystem::path &path, const UnifiedFeature &feature) {
  WriteFileAtomic(path, EncodeFeatureCache(feature));
}

UnifiedFeature ReadFeatureCache(const std::filesystem::path &path) {
  return DecodeFeatureCache(ReadFileBytes(path));
}

FeatureManifest FeatureManifest::Load(const std::filesystem::path &path) {
  std::istringstream is(ReadFileBytes(path));
  FeatureManifest m;
  m.base_dir_ = path.parent_path();
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string id, p;
    if (!(ls >> id)) continue;
    if (!(ls >> p))
      throw Error(Errc::kMalformedLine, path.string() + ":" + std::to_string(line_no));
    m.Add(id, p);
  }
  return m;
}

void FeatureManifest::Save(const std::filesystem::path &path) const {
  std::ostringstream os;
  for (const auto &[id, p] : entries_) os << id << ' ' << p.generic_string() << '\n';
  WriteFileAtomic(path, os.str());
}

void FeatureManifest::Add(const std::string &utt_id, const std::filesystem::path &cache_path) {
  if (Contains(utt_id)) throw Error(Errc::kDuplicateUtterance, utt_id);
  index_.emplace(utt_id, entries_.size());
  entries_.emplace_back(utt_id, cache_path);
}

bool FeatureManifest::Contains(const std::string &utt_id) const {
  return index_.count(utt_id) != 0;
}

std::filesystem::path FeatureManifest::PathFor(const std::string &utt_id) const {
  auto it = index_.find(utt_id);
  if (it == index_.end()) throw Error(Errc::kIo, "no cached feature for utterance " + utt_id);
  const std::filesystem::path &p = entries_[it->second].second;
  return p.is_absolute() ? p : base_dir_ / p;
}

UnifiedFeature FeatureManifest::Read(const std::string &utt_id) const {
  return ReadFeatureCache(PathFor(utt_id));
}

}  // namespace srasv
