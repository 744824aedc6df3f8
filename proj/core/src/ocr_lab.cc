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
#include "percept/ocr_lab.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>

#include "percept/csv.hpp"
#include "percept/error.hpp"
#include "percept/rng.hpp"

namespace percept {

std::string_view ToString(SampleKind kind) {
  return kind == SampleKind::kAlphabets ? "alphabets" : "numbers";
}

std::string_view ToString(Compute compute) {
  return compute == Compute::kCpu ? "cpu" : "gpu";
}

std::string_view ToString(RoutePolicy policy) {
  return policy == RoutePolicy::kAccuracy ? "accuracy" : "speed";
}

SampleKind ParseSampleKind(std::string_view text) {
  if (text == "alphabets") return SampleKind::kAlphabets;
  if (text == "numbers") return SampleKind::kNumbers;
  throw ValidationError("unknown sample kind '" + std::string(text) +
                        "' (expected alphabets|numbers)");
}

Compute ParseCompute(std::string_view text) {
  if (text == "cpu" || text == "CPU") return Compute::kCpu;
  if (text == "gpu" || text == "GPU") return Compute::kGpu;
  throw ValidationError("unknown compute '" + std::string(text) +
                        "' (expected cpu|gpu)");
}

RoutePolicy ParseRoutePolicy(std::string_view text) {
  if (text == "accuracy") return RoutePolicy::kAccuracy;
  if (text == "speed") return RoutePolicy::kSpeed;
  throw ValidationError("unknown policy '" + std::string(text) +
                        "' (expected accuracy|speed)");
}

namespace {

bool IsLowerWord(std::string_view w) {
  return !w.empty() && std::all_of(w.begin(), w.end(),
                                   [](char c) { return c >= 'a' && c <= 'z'; });
}

bool IsDigits(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

bool MatchesFormat(SampleKind kind, std::string_view truth) {
  if (kind == SampleKind::kAlphabets) {
    const size_t space = truth.find(' ');
    if (space == std::string_view::npos) return false;
    return IsLowerWord(truth.substr(0, space)) &&
           IsLowerWord(truth.substr(space + 1));
  }
  return truth.size() == 8 && truth[5] == '.' && truth[0] != '0' &&
         IsDigits(truth.substr(0, 5)) && IsDigits(truth.substr(6));
}

std::vector<std::string> LoadWordList(const std::filesystem::path& path) {
  const std::string content = ReadFile(path);
  std::vector<std::string> words;
  int line_number = 0;
  size_t start = 0;
  while (start < content.size()) {
    size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    const auto word = Trim(std::string_view(content).substr(start, end - start));
    ++line_number;
    start = end + 1;
    if (word.empty()) continue;
    if (!IsLowerWord(word)) {
      throw ValidationError(path.string() + ":" + std::to_string(line_number) +
                            ": word must be lowercase a-z");
    }
    words.emplace_back(word);
  }
  if (words.empty()) throw ValidationError(path.string() + ": empty word list");
  return words;
}

std::vector<OcrSample> GenerateSamples(SampleKind kind, size_t n,
                                       std::uint64_t seed,
                                       std::span<const std::string> words) {
  if (n == 0) throw ValidationError("sample count must be >= 1");
  if (kind == SampleKind::kAlphabets && words.empty()) {
    throw ValidationError("alphabet samples need a non-empty word list");
  }
  Rng rng(HashCombine(seed, static_cast<std::uint64_t>(kind) + 1));
  std::vector<OcrSample> out;
  out.reserve(n);
  char id[32];
  for (size_t i = 0; i < n; ++i) {
    std::snprintf(id, sizeof(id), "%s-%06zu",
                  kind == SampleKind::kAlphabets ? "alpha" : "num", i);
    std::string truth;
    if (kind == SampleKind::kAlphabets) {
      truth = words[rng.Below(words.size())];
      truth += ' ';
      truth += words[rng.Below(words.size())];
    } else {
      truth.push_back(static_cast<char>('1' + rng.Below(9)));
      for (int d = 0; d < 4; ++d) truth.push_back(static_cast<char>('0' + rng.Below(10)));
      truth.push_back('.');
      for (int d = 0; d < 2; ++d) truth.push_back(static_cast<char>('0' + rng.Below(10)));
    }
    out.push_back({id, kind, std::move(truth)});
  }
  return out;
}

namespace {

std::vector<size_t> DistanceTable(std::string_view a, std::string_view b) {
  const size_t cols = b.size() + 1;
  std::vector<size_t> d((a.size() + 1) * cols);
  for (size_t i = 0; i <= a.size(); ++i) d[i * cols] = i;
  for (size_t j = 0; j <= b.size(); ++j) d[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      const size_t sub = d[(i - 1) * cols + j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      d[i * cols + j] =
          std::min({sub, d[(i - 1) * cols + j] + 1, d[i * cols + j - 1] + 1});
    }
  }
  return d;
}

}  // namespace

size_t EditDistance(std::string_view truth, std::string_view output) {
  return DistanceTable(truth, output).back();
}

std::vector<EditOp> Align(std::string_view truth, std::string_view output) {
  const auto d = DistanceTable(truth, output);
  const size_t cols = output.size() + 1;
  auto at = [&](size_t i, size_t j) { return d[i * cols + j]; };

  std::vector<EditOp> ops;
  size_t i = truth.size();
  size_t j = output.size();
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = truth[i - 1] == output[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
        ops.push_back({same ? EditKind::kMatch : EditKind::kSubstitute,
                       truth[i - 1], output[j - 1]});
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ops.push_back({EditKind::kDelete, truth[i - 1], 0});
      --i;
    } else {
      ops.push_back({EditKind::kInsert, 0, output[j - 1]});
      --j;
    }
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

OcrReport Score(std::span<const OcrPair> pairs, SampleKind kind,
                ScoreMode mode) {
  if (pairs.empty()) throw ValidationError("score: no result pairs");
  OcrReport r;
  r.kind = kind;
  r.mode = mode;
  for (const auto& p : pairs) {
    if (mode == ScoreMode::kCharacter) r.total += p.truth.size();
    if (p.output == p.truth) continue;
    size_t edits = 0;
    for (const auto& op : Align(p.truth, p.output)) {
      if (op.kind == EditKind::kMatch) continue;
      ++edits;
      if (op.kind == EditKind::kSubstitute) {
        ++r.confusions[{op.truth_char, op.output_char}];
      }
    }
    r.mismatches += mode == ScoreMode::kSample ? 1 : edits;
  }
  if (mode == ScoreMode::kSample) r.total = pairs.size();
  if (r.total == 0) throw ValidationError("score: empty ground truth");
  r.error_rate = 100.0 * static_cast<double>(r.mismatches) /
                 static_cast<double>(r.total);
  return r;
}

std::vector<OcrPair> ParsePairs(std::string_view content,
                                std::string_view source) {
  std::vector<OcrPair> out;
  int line_number = 0;
  size_t start = 0;
  while (start < content.size()) {
    size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    ++line_number;
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos) {
      throw ValidationError(std::string(source) + ":" +
                            std::to_string(line_number) +
                            ": expected truth<TAB>output");
    }
    out.push_back({std::string(line.substr(0, tab)),
                   std::string(line.substr(tab + 1))});
  }
  return out;
}

double EngineProfile::ErrorRate(SampleKind kind) const {
  return kind == SampleKind::kAlphabets ? error_rate_alphabets
                                        : error_rate_numbers;
}

double EngineProfile::Speed(Compute compute) const {
  return compute == Compute::kCpu ? speed_cpu_s : speed_gpu_s;
}

void EngineProfile::Validate() const {
  auto pct = [](double v) { return v >= 0.0 && v <= 100.0; };
  if (!pct(error_rate_numbers) || !pct(error_rate_alphabets)) {
    throw ValidationError("engine '" + engine_id + "': rates must be in [0,100]");
  }
  if (!(speed_cpu_s > 0.0) || !(speed_gpu_s > 0.0)) {
    throw ValidationError("engine '" + engine_id + "': speeds must be > 0");
  }
  ConfusionTable check(confusion_rules);
  (void)check;
}

std::vector<EngineProfile> LoadEngineProfiles(
    const std::filesystem::path& profiles,
    const std::filesystem::path& confusions) {
  const CsvTable table = ReadCsv(profiles);
  const std::array<std::string_view, 5> columns = {
      "engine", "err_numbers", "err_alphabets", "speed_cpu_s", "speed_gpu_s"};
  for (const auto c : columns) {
    if (table.Column(c) < 0) {
      throw ValidationError(profiles.string() + ": missing column '" +
                            std::string(c) + "'");
    }
  }
  std::vector<EngineProfile> out;
  for (const auto& row : table.rows) {
    if (row.fields.size() != table.header.size()) {
      throw ValidationError(profiles.string() + ":" +
                            std::to_string(row.line_number) +
                            ": wrong field count");
    }
    auto field = [&](std::string_view c) {
      return row.fields[static_cast<size_t>(table.Column(c))];
    };
    EngineProfile p;
    p.engine_id = field("engine");
    p.error_rate_numbers = ParseDouble(field("err_numbers"), "err_numbers");
    p.error_rate_alphabets = ParseDouble(field("err_alphabets"), "err_alphabets");
    p.speed_cpu_s = ParseDouble(field("speed_cpu_s"), "speed_cpu_s");
    p.speed_gpu_s = ParseDouble(field("speed_gpu_s"), "speed_gpu_s");
    out.push_back(std::move(p));
  }
  if (!confusions.empty()) {
    const CsvTable rules = ReadCsv(confusions);
    const int e = rules.Column("engine");
    const int f = rules.Column("from");
    const int t = rules.Column("to");
    if (e < 0 || f < 0 || t < 0) {
      throw ValidationError(confusions.string() + ": expected engine,from,to");
    }
    for (const auto& row : rules.rows) {
      const auto where =
          confusions.string() + ":" + std::to_string(row.line_number);
      if (row.fields.size() != rules.header.size() ||
          row.fields[f].size() != 1 || row.fields[t].size() != 1) {
        throw ValidationError(where + ": expected single-character from/to");
      }
      auto it = std::find_if(out.begin(), out.end(), [&](const EngineProfile& p) {
        return p.engine_id == row.fields[e];
      });
      if (it == out.end()) {
        throw ValidationError(where + ": unknown engine '" + row.fields[e] + "'");
      }
      it->confusion_rules.push_back({row.fields[f][0], row.fields[t][0]});
    }
  }
  for (const auto& p : out) p.Validate();
  return out;
}

const EngineProfile& FindProfile(std::span<const EngineProfile> profiles,
                                 std::string_view engine_id) {
  for (const auto& p : profiles) {
    if (p.engine_id == engine_id) return p;
  }
  throw ValidationError("unknown OCR engine '" + std::string(engine_id) + "'");
}

std::string Route(SampleKind kind, Compute compute, RoutePolicy policy,
                  std::span<const EngineProfile> profiles) {
  if (profiles.empty()) throw ValidationError("route: no engine profiles");
  auto cost = [&](const EngineProfile& p) {
    return policy == RoutePolicy::kAccuracy ? p.ErrorRate(kind)
                                            : p.Speed(compute);
  };
  const EngineProfile* best = &profiles.front();
  for (const auto& p : profiles.subspan(1)) {
    const double c = cost(p);
    const double b = cost(*best);
    if (c < b || (c == b && p.engine_id < best->engine_id)) best = &p;
  }
  return best->engine_id;
}

double CalibrateSubstitutionRate(double target_error_pct,
                                 std::span<const OcrSample> samples,
                                 const ConfusionTable& table) {
  if (samples.empty()) throw ValidationError("calibration needs samples");
  const double target = target_error_pct / 100.0;
  std::vector<size_t> eligible;
  eligible.reserve(samples.size());
  for (const auto& s : samples) eligible.push_back(table.EligibleCount(s.truth));
  auto expected = [&](double rate) {
    double sum = 0.0;
    for (const size_t k : eligible) {
      sum += 1.0 - std::pow(1.0 - rate, static_cast<double>(k));
    }
    return sum / static_cast<double>(eligible.size());
  };
  if (!(target >= 0.0) || target > expected(1.0)) {
    throw ValidationError("target error rate " + FormatDouble(target_error_pct) +
                          "% is unreachable with these confusion rules");
  }
  if (target == 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (expected(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

MockOcr MakeProfileOcr(const EngineProfile& profile, Compute compute,
                       double substitution_rate, std::uint64_t seed) {
  return MockOcr({.id = "mock-" + profile.engine_id,
                  .substitution_rate = substitution_rate,
                  .seed = seed,
                  .rules = profile.confusion_rules,
                  .latency_s = profile.Speed(compute)});
}

OcrReport RunBenchmark(SampleKind kind, size_t n, const OcrBackend& backend,
                       std::uint64_t seed, std::span<const std::string> words,
                       BenchClock clock, ScoreMode mode) {
  const auto samples = GenerateSamples(kind, n, seed, words);
  std::vector<OcrPair> pairs;
  pairs.reserve(samples.size());
  double time_sum = 0.0;
  for (const auto& s : samples) {
    Frame frame{s.sample_id, {}, {{s.truth, {0.0, 0.0, 1.0, 1.0}}}, 0.0};
    const auto start = std::chrono::steady_clock::now();
    std::vector<OcrExtraction> got;
    try {
      got = ExtractText(frame, backend);
    } catch (const BackendError& e) {
      throw BackendError(e.backend_id(),
                         "sample " + s.sample_id + ": " + e.cause());
    }
    const auto stop = std::chrono::steady_clock::now();
    time_sum += clock == BenchClock::kWall
                    ? std::chrono::duration<double>(stop - start).count()
                    : backend.modeled_latency_s();
    pairs.push_back({s.truth, got.empty() ? std::string() : got.front().text});
  }
  OcrReport report = Score(pairs, kind, mode);
  report.mean_speed_s = time_sum / static_cast<double>(samples.size());
  return report;
}

namespace {

std::string_view ToString(ScoreMode mode) {
  return mode == ScoreMode::kSample ? "sample" : "character";
}

std::string CsvQuote(std::string_view field) {
  if (field.find_first_of(",\"\n\r ") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string ReportToJson(const OcrReport& report) {
  nlohmann::ordered_json j;
  j["kind"] = ToString(report.kind);
  j["mode"] = ToString(report.mode);
  j["total"] = report.total;
  j["mismatches"] = report.mismatches;
  j["error_rate"] = report.error_rate;
  j["mean_speed_s"] = report.mean_speed_s;
  auto confusions = nlohmann::ordered_json::array();
  for (const auto& [key, count] : report.confusions) {
    confusions.push_back({{"from", std::string(1, key.first)},
                          {"to", std::string(1, key.second)},
                          {"count", count}});
  }
  j["confusions"] = std::move(confusions);
  return j.dump(2) + "\n";
}

std::string ReportToCsv(const OcrReport& report) {
  std::string out = "kind,mode,total,mismatches,error_rate,mean_speed_s\n";
  out += std::string(ToString(report.kind)) + "," +
         std::string(ToString(report.mode)) + "," +
         std::to_string(report.total) + "," +
         std::to_string(report.mismatches) + "," +
         FormatFixed(report.error_rate, 2) + "," +
         FormatDouble(report.mean_speed_s) + "\n";
  out += "\nfrom,to,count\n";
  for (const auto& [key, count] : report.confusions) {
    out += CsvQuote(std::string(1, key.first)) + "," +
           CsvQuote(std::string(1, key.second)) + "," + std::to_string(count) +
           "\n";
  }
  return out;
}

}  // namespace percept
