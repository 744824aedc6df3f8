/* Copyright 2026 The PerceptCane Authors. All Rights Reserved.

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
#ifndef PERCEPT_TOOLS_CLI_HPP_
#define PERCEPT_TOOLS_CLI_HPP_

#include <ostream>
#include <span>
#include <string>

namespace percept::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

// Runs one invocation. `args` excludes the program name. Data goes to `out`
// (or files named by --out); diagnostics and usage go to `err`.
int Dispatch(std::span<const std::string> args, std::ostream& out,
             std::ostream& err);

}  // namespace percept::cli

#endif  // PERCEPT_TOOLS_CLI_HPP_
