// include/srasv/base/kv-config.h

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

#ifndef SRASV_BASE_KV_CONFIG_H_
#define SRASV_BASE_KV_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace srasv {

/// Plain-text `key = value` configuration. Blank lines and text after `#`
/// are ignored. Later assignments override earlier ones.
class KvConfig {
 public:
  KvConfig() = default;
  static KvConfig Parse(const std::string &text);
  static KvConfig Load(const std::filesystem::path &path);

  void Set(const std::string &key, const std::string &value) { values_[key] = value; }
  bool Has(const std::string &key) const { return values_.count(key) != 0; }
  std::optional<std::string> Get(const std::string &key) const;

  // The typed getters fall back to `fallback` when the key is absent and
  // throw Errc::kBadConfig when the value does not parse.
  std::string GetString(const std::string &key, const std::string &fallback) const;
  double GetDouble(const std::string &key, double fallback) const;
  std::int64_t GetInt(const std::string &key, std::int64_t fallback) const;
  bool GetBool(const std::string &key, bool fallback) const;
  std::vector<int> GetIntList(const std::string &key,
                              const std::vector<int> &fallback) const;

  const std::map<std::string, std::string> &values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace srasv

#endif  // SRASV_BASE_KV_CONFIG_H_
