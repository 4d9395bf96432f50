// src/net/checkpoint.cc

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

#include "srasv/net/checkpoint.h"

#include <cmath>
#include <cstring>

#include "srasv/base/io.h"

namespace srasv {

namespace {

constexpr char kMagic[4] = {'S', 'R', 'N', 'N'};
constexpr std::size_t kMaxRank = 8;

void AppendList(std::vector<float> *out, const std::vector<int> &v) {
  out->push_back(static_cast<float>(v.size()));
  for (int x : v) out->push_back(static_cast<float>(x));
}

class ArchReader {
 public:
  explicit ArchReader(const std::vector<float> &v) : v_(v) {}
  float Next() {
    if (pos_ >= v_.size()) throw Error(Errc::kCorruptCheckpoint, "truncated meta.arch");
    return v_[pos_++];
  }
  int NextInt() {
    const float f = Next();
    if (!std::isfinite(f) || f < 0.0f || f != std::floor(f) || f > 1e7f)
      throw Error(Errc::kCorruptCheckpoint, "bad integer in meta.arch");
    return static_cast<int>(f);
  }
  std::vector<int> NextList() {
    const int n = NextInt();
    if (n > 64) throw Error(Errc::kCorruptCheckpoint, "bad list in meta.arch");
    std::vector<int> out(n);
    for (int &x : out) x = NextInt();
    return out;
  }
  bool Done() const { return pos_ == v_.size(); }

 private:
  const std::vector<float> &v_;
  std::size_t pos_ = 0;
};

}  // namespace

const Blob *BlobFile::Find(const std::string &name) const {
  for (const Blob &b : blobs)
    if (b.name == name) return &b;
  return nullptr;
}

const Blob &BlobFile::Get(const std::string &name) const {
  const Blob *b = Find(name);
  if (!b) throw Error(Errc::kCorruptCheckpoint, "missing blob " + name);
  return *b;
}

std::string EncodeBlobFile(const BlobFile &file) {
  ByteWriter w;
  w.PutBytes(std::string_view(kMagic, 4));
  w.Put<std::uint32_t>(file.version);
  w.Put<std::uint32_t>(file.n_speakers);
  w.Put<std::uint8_t>(static_cast<std::uint8_t>(file.kind));
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(file.blobs.size()));
  for (const Blob &b : file.blobs) {
    std::size_t count = 1;
    for (std::uint32_t d : b.dims) count *= d;
    if (count != b.data.size() || b.dims.size() > kMaxRank || b.name.size() > 0xFFFF)
      throw Error(Errc::kShapeMismatch, "blob " + b.name + " has inconsistent shape");
    const std::size_t start = w.size();
    w.Put<std::uint16_t>(static_cast<std::uint16_t>(b.name.size()));
    w.PutBytes(b.name);
    w.Put<std::uint8_t>(static_cast<std::uint8_t>(b.dims.size()));
    for (std::uint32_t d : b.dims) w.Put<std::uint32_t>(d);
    w.PutBytes(std::string_view(reinterpret_cast<const char *>(b.data.data()),
                                b.data.size() * sizeof(float)));
    w.Put<std::uint32_t>(Crc32(std::string_view(w.bytes()).substr(start)));
  }
  return w.bytes();
}

BlobFile DecodeBlobFile(std::string_view bytes) {
  ByteReader r(bytes, Errc::kCorruptCheckpoint);
  if (r.remaining() < 4 || std::memcmp(r.GetBytes(4).data(), kMagic, 4) != 0)
    throw Error(Errc::kCorruptCheckpoint, "bad magic");
  BlobFile file;
  file.version = r.Get<std::uint32_t>();
  if (file.version != BlobFile::kVersion)
    throw Error(Errc::kCorruptCheckpoint, "unsupported version " + std::to_string(file.version));
  file.n_speakers = r.Get<std::uint32_t>();
  const std::uint8_t kind = r.Get<std::uint8_t>();
  if (kind > 1) throw Error(Errc::kCorruptCheckpoint, "bad input kind");
  file.kind = static_cast<FeatureKind>(kind);
  const std::uint32_t n_blobs = r.Get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_blobs; ++i) {
    const std::size_t start = r.position();
    Blob b;
    b.name = std::string(r.GetBytes(r.Get<std::uint16_t>()));
    const std::uint8_t rank = r.Get<std::uint8_t>();
    if (rank > kMaxRank) throw Error(Errc::kCorruptCheckpoint, "bad rank in " + b.name);
    std::size_t count = 1;
    for (std::uint8_t d = 0; d < rank; ++d) {
      b.dims.push_back(r.Get<std::uint32_t>());
      count *= b.dims.back();
    }
    if (count > r.remaining() / sizeof(float))
      throw Error(Errc::kCorruptCheckpoint, "blob " + b.name + " exceeds file");
    const std::string_view raw = r.GetBytes(count * sizeof(float));
    b.data.resize(count);
    std::memcpy(b.data.data(), raw.data(), raw.size());
    const std::uint32_t expected = Crc32(bytes.substr(start, r.position() - start));
    if (r.Get<std::uint32_t>() != expected)
      throw Error(Errc::kCorruptCheckpoint, "checksum mismatch in blob " + b.name);
    file.blobs.push_back(std::move(b));
  }
  if (r.remaining() != 0) throw Error(Errc::kCorruptCheckpoint, "trailing bytes");
  return file;
}

void WriteBlobFile(const std::string &path, const BlobFile &file) {
  WriteFileAtomic(path, EncodeBlobFile(file));
}

BlobFile ReadBlobFile(const std::string &path) { return DecodeBlobFile(ReadFileBytes(path)); }

BlobFile NetworkToBlobs(const MtlNetwork<float> &net) {
  const NetConfig &c = net.config();
  BlobFile file;
  file.n_speakers = static_cast<std::uint32_t>(c.n_speakers);
  file.kind = c.input_kind;
  Blob arch;
  arch.name = "meta.arch";
  arch.data = {static_cast<float>(c.input_rows), static_cast<float>(c.input_cols)};
  AppendList(&arch.data, c.block_filters);
  AppendList(&arch.data, c.sd_hidden);
  AppendList(&arch.data, c.asv_hidden);
  for (bool flag : {c.sd_enabled, c.asv_enabled, c.sd_normalized_output, c.asv_normalized_output})
    arch.data.push_back(flag ? 1.0f : 0.0f);
  for (float v : {c.dropout, c.lrelu_slope, c.bn_momentum, c.bn_eps}) arch.data.push_back(v);
  arch.dims = {static_cast<std::uint32_t>(arch.data.size())};
  file.blobs.push_back(std::move(arch));
  for (const Param<float> &p : net.params()) {
    Blob b;
    b.name = p.name;
    b.dims.assign(p.shape.begin(), p.shape.end());
    b.data.assign(p.value.begin(), p.value.end());
    file.blobs.push_back(std::move(b));
  }
  return file;
}

MtlNetwork<float> NetworkFromBlobs(const BlobFile &file) {
  NetConfig c;
  ArchReader a(file.Get("meta.arch").data);
  c.input_rows = a.NextInt();
  c.input_cols = a.NextInt();
  c.block_filters = a.NextList();
  c.sd_hidden = a.NextList();
  c.asv_hidden = a.NextList();
  c.sd_enabled = a.NextInt() != 0;
  c.asv_enabled = a.NextInt() != 0;
  c.sd_normalized_output = a.NextInt() != 0;
  c.asv_normalized_output = a.NextInt() != 0;
  c.dropout = a.Next();
  c.lrelu_slope = a.Next();
  c.bn_momentum = a.Next();
  c.bn_eps = a.Next();
  if (!a.Done()) throw Error(Errc::kCorruptCheckpoint, "unexpected meta.arch length");
  c.n_speakers = static_cast<int>(file.n_speakers);
  c.input_kind = file.kind;

  std::optional<MtlNetwork<float>> net;
  try {
    net.emplace(c);
  } catch (const Error &e) {
    throw Error(Errc::kCorruptCheckpoint, std::string("invalid architecture: ") + e.what());
  }
  if (file.blobs.size() != net->params().size() + 1)
    throw Error(Errc::kCorruptCheckpoint, "parameter count mismatch");
  for (Param<float> &p : net->params()) {
    const Blob &b = file.Get(p.name);
    if (!std::equal(b.dims.begin(), b.dims.end(), p.shape.begin(), p.shape.end(),
                    [](std::uint32_t x, int y) { return x == static_cast<std::uint32_t>(y); }))
      throw Error(Errc::kCorruptCheckpoint, "shape mismatch for " + p.name);
    p.value.assign(b.data.begin(), b.data.end());
  }
  return std::move(*net);
}

void SaveCheckpoint(const std::string &path, const MtlNetwork<float> &net) {
  WriteBlobFile(path, NetworkToBlobs(net));
}

MtlNetwork<float> LoadCheckpoint(const std::string &path) {
  return NetworkFromBlobs(ReadBlobFile(path));
}

}  // namespace srasv
