/* Copyright 2026 The osvlm Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef OSV_TOOLS_CLI_APP_HPP_
#define OSV_TOOLS_CLI_APP_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace osv::cli {

// Exit codes of the osvlm tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitCoverage = 3;
inline constexpr int kExitInternal = 4;

// Runs the tool on `args` (args[0] is the program name). Errors are printed
// to `err` as "error[<id>]: <message>".
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace osv::cli

#endif  // OSV_TOOLS_CLI_APP_HPP_
