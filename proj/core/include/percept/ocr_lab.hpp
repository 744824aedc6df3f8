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
#ifndef PERCEPT_OCR_LAB_HPP_
#define PERCEPT_OCR_LAB_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "percept/perception.hpp"

namespace percept {

enum class SampleKind { kAlphabets, kNumbers };
enum class Compute { kCpu, kGpu };
enum class RoutePolicy { kAccuracy, kSpeed };

std::string_view ToString(SampleKind kind);
std::string_view ToString(Compute compute);
std::string_view ToString(RoutePolicy policy);
// Throw ValidationError on unknown names.
SampleKind ParseSampleKind(std::string_view text);
Compute ParseCompute(std::string_view text);
RoutePolicy ParseRoutePolicy(std::string_view text);

struct OcrSample {
  std::string sample_id;
  SampleKind kind = SampleKind::kAlphabets;
  std::string truth;

  friend bool operator==(const OcrSample&, const OcrSample&) = default;
};

// "word word" from lowercase a-z, or "DDDDD.DD" with a nonzero lead digit.
bool MatchesFormat(SampleKind kind, std::string_view truth);

// Lowercase word list, one per line.
std::vector<std::string> LoadWordList(const std::filesystem::path& path);

// n samples of `kind`, deterministic in (kind, n, seed, words). Alphabet
// samples join two uniformly drawn words with one space. Throws
// ValidationError when n == 0 or alphabets are requested with no words.
std::vector<OcrSample> GenerateSamples(SampleKind kind, size_t n,
                                       std::uint64_t seed,
                                       std::span<const std::string> words);

enum class EditKind { kMatch, kSubstitute, kDelete, kInsert };

struct EditOp {
  EditKind kind = EditKind::kMatch;
  char truth_char = 0;   // unset for kInsert
  char output_char = 0;  // unset for kDelete
};

// Minimum edit-distance alignment with unit costs. Among optimal
// alignments, traceback from the end prefers match/substitution, then
// deletion, then insertion, which leaves gaps leftmost.
std::vector<EditOp> Align(std::string_view truth, std::string_view output);
size_t EditDistance(std::string_view truth, std::string_view output);

enum class ScoreMode {
  kSample,     // mismatches = samples not exactly equal, total = samples
  kCharacter,  // mismatches = summed edit distance, total = truth chars
};

using ConfusionCounts = std::map<std::pair<char, char>, size_t>;

struct OcrReport {
  SampleKind kind = SampleKind::kAlphabets;
  ScoreMode mode = ScoreMode::kSample;
  size_t total = 0;
  size_t mismatches = 0;
  double error_rate = 0.0;  // percent, 100 * mismatches / total
  ConfusionCounts confusions;
  double mean_speed_s = 0.0;

  friend bool operator==(const OcrReport&, const OcrReport&) = default;
};

struct OcrPair {
  std::string truth;
  std::string output;
};

// Confusions are tallied from the substitutions of each mismatching pair's
// alignment. Throws ValidationError on an empty input.
OcrReport Score(std::span<const OcrPair> pairs, SampleKind kind,
                ScoreMode mode = ScoreMode::kSample);

// Tab separated `truth<TAB>output` lines.
std::vector<OcrPair> ParsePairs(std::string_view content,
                                std::string_view source = "<memory>");

struct EngineProfile {
  std::string engine_id;
  double error_rate_numbers = 0.0;    // percent
  double error_rate_alphabets = 0.0;  // percent
  double speed_cpu_s = 0.0;           // seconds per image
  double speed_gpu_s = 0.0;
  std::vector<ConfusionRule> confusion_rules;

  double ErrorRate(SampleKind kind) const;
  double Speed(Compute compute) const;
  void Validate() const;
};

// `engine,err_numbers,err_alphabets,speed_cpu_s,speed_gpu_s` plus an
// optional `engine,from,to` rules file.
std::vector<EngineProfile> LoadEngineProfiles(
    const std::filesystem::path& profiles,
    const std::filesystem::path& confusions = {});

const EngineProfile& FindProfile(std::span<const EngineProfile> profiles,
                                 std::string_view engine_id);

// Accuracy: lowest error rate for `kind`. Speed: lowest seconds per image
// on `compute`. Ties go to the lexicographically smaller engine id.
std::string Route(SampleKind kind, Compute compute, RoutePolicy policy,
                  std::span<const EngineProfile> profiles);

// Per-character substitution rate for which the expected fraction of
// corrupted samples equals target_error_pct. Throws ValidationError if the
// target is unreachable with the given rules.
double CalibrateSubstitutionRate(double target_error_pct,
                                 std::span<const OcrSample> samples,
                                 const ConfusionTable& table);

// Mock recognizer carrying a profile's confusion rules and speed.
MockOcr MakeProfileOcr(const EngineProfile& profile, Compute compute,
                       double substitution_rate, std::uint64_t seed);

enum class BenchClock {
  kVirtual,  // backend's modeled latency per sample
  kWall,     // measured host time per sample
};

// Generates samples, runs each through `backend` as a one-text frame, and
// scores the outputs. BackendError is rethrown with the sample id.
OcrReport RunBenchmark(SampleKind kind, size_t n, const OcrBackend& backend,
                       std::uint64_t seed, std::span<const std::string> words,
                       BenchClock clock = BenchClock::kVirtual,
                       ScoreMode mode = ScoreMode::kSample);

std::string ReportToJson(const OcrReport& report);
// Summary row, a blank line, then a `from,to,count` table.
std::string ReportToCsv(const OcrReport& report);

}  // namespace percept

#endif  // PERCEPT_OCR_LAB_HPP_
