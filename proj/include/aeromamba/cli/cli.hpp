// Copyright 2026 The aeromamba Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef AEROMAMBA_CLI_CLI_HPP_
#define AEROMAMBA_CLI_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace aeromamba::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumeric = 4;

// Runs one command. args excludes the program name. Returns the exit code;
// errors are reported on err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aeromamba::cli

#endif  // AEROMAMBA_CLI_CLI_HPP_
