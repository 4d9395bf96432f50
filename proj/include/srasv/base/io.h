// include/srasv/base/io.h

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

#ifndef SRASV_BASE_IO_H_
#define SRASV_BASE_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <type_traits>

#include "srasv/base/error.h"

namespace srasv {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

/// Append-only little-endian byte buffer.
class ByteWriter {
 public:
  template <typename T>
  void Put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    char raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    bytes_.append(raw, sizeof(T));
  }
  void PutBytes(std::string_view data) { bytes_.append(data); }
  const std::string &bytes() const { return bytes_; }
  std::size_t size() const { return bytes_.size(); }

 private:
  std::string bytes_;
};

/// Bounds-checked little-endian reader; throws `on_error` when the buffer
/// runs out.
class ByteReader {
 public:
  ByteReader(std::string_view data, Errc on_error)
      : data_(data), on_error_(on_error) {}

  template <typename T>
  T Get() {
    static_assert(std::is_trivially_copyable_v<T>);
    Require(sizeof(T));
    T value;
    std::memcpy(&value, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::string_view GetBytes(std::size_t n) {
    Require(n);
    std::string_view out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::size_t remaining() const { return data_.size() - pos_; }
  std::size_t position() const { return pos_; }

 private:
  void Require(std::size_t n) const {
    if (data_.size() - pos_ < n)
      throw Error(on_error_, "unexpected end of data");
  }
  std::string_view data_;
  std::size_t pos_ = 0;
  Errc on_error_;
};

std::string ReadFileBytes(const std::filesystem::path &path);

/// Writes through a temporary sibling file and renames it into place.
void WriteFileAtomic(const std::filesystem::path &path, std::string_view bytes);

std::uint32_t Crc32(std::string_view bytes);

}  // namespace srasv

#endif  // SRASV_BASE_IO_H_
