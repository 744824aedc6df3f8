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
#ifndef PERCEPT_CSV_HPP_
#define PERCEPT_CSV_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace percept {

// Minimal reader for the comma separated reference tables shipped in data/.
// Fields are split on `delimiter` with no quoting; surrounding whitespace is
// trimmed. Blank lines and lines starting with '#' are skipped.
struct CsvRow {
  int line_number = 0;
  std::vector<std::string> fields;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;

  // Index of `name` in the header, or -1.
  int Column(std::string_view name) const;
};

std::vector<std::string> SplitFields(std::string_view line, char delimiter);
std::string_view Trim(std::string_view text);

// Reads the whole file. Throws ValidationError if it cannot be opened.
std::string ReadFile(const std::filesystem::path& path);

CsvTable ParseCsv(std::string_view content, bool has_header = true,
                  char delimiter = ',');
CsvTable ReadCsv(const std::filesystem::path& path, bool has_header = true,
                 char delimiter = ',');

// Strict numeric parse; throws ValidationError naming `what` on failure.
double ParseDouble(std::string_view text, std::string_view what);
long long ParseInt(std::string_view text, std::string_view what);

// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double value);

// printf-style fixed decimals.
std::string FormatFixed(double value, int decimals);

}  // namespace percept

#endif  // PERCEPT_CSV_HPP_
