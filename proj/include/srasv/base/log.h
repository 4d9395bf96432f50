// include/srasv/base/log.h

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

#ifndef SRASV_BASE_LOG_H_
#define SRASV_BASE_LOG_H_

#include <sstream>
#include <string>

namespace srasv {

enum class LogLevel { kDebug = 0, kInfo = 1, kWarning = 2, kSilent = 3 };

/// Messages below this level are dropped. Defaults to kInfo.
void SetLogLevel(LogLevel level);
LogLevel GetLogLevel();
void LogMessage(LogLevel level, const std::string &text);

}  // namespace srasv

#define SRASV_LOG_AT(level, expr)                                  \
  do {                                                             \
    if (static_cast<int>(level) >= static_cast<int>(::srasv::GetLogLevel())) { \
      std::ostringstream srasv_log_os_;                            \
      srasv_log_os_ << expr;                                       \
      ::srasv::LogMessage(level, srasv_log_os_.str());             \
    }                                                              \
  } while (0)

#define SRASV_LOG(expr) SRASV_LOG_AT(::srasv::LogLevel::kInfo, expr)
#define SRASV_WARN(expr) SRASV_LOG_AT(::srasv::LogLevel::kWarning, expr)

#endif  // SRASV_BASE_LOG_H_
