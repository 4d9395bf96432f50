// include/srasv/cli/cli.h

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

#ifndef SRASV_CLI_CLI_H_
#define SRASV_CLI_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace srasv {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitDataError = 1, kExitUsage = 2 };

/// Runs one `srasv` subcommand: synth, extract, train, embed, plda,
/// score-asv, score-sd, eval or fuse. args[0] is the program name.
int CliRun(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);
int CliRun(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace srasv

#endif  // SRASV_CLI_CLI_H_
