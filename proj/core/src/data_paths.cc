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
#include "percept/data_paths.hpp"

#include <cstdlib>
#include <system_error>

namespace percept {

std::filesystem::path DataDir() {
  if (const char* env = std::getenv(kDataDirEnv); env != nullptr && *env) {
    return env;
  }
  std::error_code ec;
  const std::filesystem::path source = PERCEPT_CANE_SOURCE_DATA_DIR;
  if (std::filesystem::is_directory(source, ec)) return source;
  return PERCEPT_CANE_INSTALL_DATA_DIR;
}

std::filesystem::path DataPath(std::string_view name) {
  return DataDir() / std::filesystem::path(name);
}

}  // namespace percept
