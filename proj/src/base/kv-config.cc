// src/base/kv-config.cc

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

#include "srasv/base/kv-config.h"

#include <charconv>
#include <sstream>

#include "srasv/base/error.h"
#include "srasv/base/io.h"

namespace srasv {

namespace {

std::string Trim(const std::string &s) {
  const char *ws = " \t\r\n";
  std::size_t b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace

KvConfig KvConfig::Parse(const std::string &text) {
  KvConfig cfg;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::kBadConfig,
                  "line " + std::to_string(line_no) + ": expected key = value");
    std::string key = Trim(line.substr(0, eq));
    if (key.empty())
      throw Error(Errc::kBadConfig, "line " + std::to_string(line_no) + ": empty key");
    cfg.values_[key] = Trim(line.substr(eq + 1));
  }
  return cfg;
}

KvConfig KvConfig::Load(const std::filesystem::path &path) {
  return Parse(ReadFileBytes(path));
}

std::optional<std::string> KvConfig::Get(const std::string &key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KvConfig::GetString(const std::string &key,
                                const std::string &fallback) const {
  return Get(key).value_or(fallback);
}

double KvConfig::GetDouble(const std::string &key, double fallback) const {
  auto v = Get(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    double d = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception &) {
    throw Error(Errc::kBadConfig, key + ": not a number: " + *v);
  }
}

std::int64_t KvConfig::GetInt(const std::string &key, std::int64_t fallback) const {
  auto v = Get(key);
  if (!v) return fallback;
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size())
    throw Error(Errc::kBadConfig, key + ": not an integer: " + *v);
  return out;
}

bool KvConfig::GetBool(const std::string &key, bool fallback) const {
  auto v = Get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw Error(Errc::kBadConfig, key + ": not a boolean: " + *v);
}

std::vector<int> KvConfig::GetIntList(const std::string &key,
                                      const std::vector<int> &fallback) const {
  auto v = Get(key);
  if (!v) return fallback;
  std::vector<int> out;
  std::string item;
  std::istringstream is(*v);
  while (std::getline(is, item, ',')) {
    item = Trim(item);
    if (item.empty()) continue;
    int x = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
    if (ec != std::errc() || ptr != item.data() + item.size())
      throw Error(Errc::kBadConfig, key + ": bad integer list: " + *v);
    out.push_back(x);
  }
  return out;
}

}  // namespace srasv
