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
#ifndef PERCEPT_DATA_PATHS_HPP_
#define PERCEPT_DATA_PATHS_HPP_

#include <filesystem>
#include <string_view>

namespace percept {

inline constexpr const char* kDataDirEnv = "PERCEPT_CANE_DATA";

// Bundled data directory: $PERCEPT_CANE_DATA if set, else the source
// checkout's data/, else the installed share/percept_cane.
std::filesystem::path DataDir();

// DataDir() / name.
std::filesystem::path DataPath(std::string_view name);

}  // namespace percept

#endif  // PERCEPT_DATA_PATHS_HPP_
