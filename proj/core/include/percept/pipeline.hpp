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
#ifndef PERCEPT_PIPELINE_HPP_
#define PERCEPT_PIPELINE_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "percept/alert_engine.hpp"
#include "percept/perception.hpp"
#include "percept/sensor_model.hpp"
#include "percept/speech_queue.hpp"

namespace percept {

struct ScenarioEvent {
  double t_s = 0.0;
  double distance_cm = 0.0;
  std::optional<Frame> frame;
};

// A replayable world timeline. The true distance is piecewise constant:
// at time t it is that of the latest event with t_s <= t.
struct Scenario {
  std::string name;
  double tick_s = 0.1;
  double duration_s = 0.0;
  std::vector<ScenarioEvent> events;

  // Strictly increasing event times, positive tick, valid frames.
  void Validate(const ClassVocabulary* vocabulary = nullptr) const;

  const ScenarioEvent* EventAt(double t_s) const;
  // Latest event at or before t_s that carries a frame.
  const Frame* FrameAt(double t_s) const;

  static Scenario FromJson(std::string_view json_text,
                           std::string_view source = "<memory>");
  static Scenario Load(const std::filesystem::path& path);
};

struct PerceptionConfig {
  std::string detector = "mock";
  std::string ocr = "mock-tesseract";
  double miss_prob = 0.0;
  double substitution_rate = 0.0;
  double capture_latency_s = 0.10;
  double ocr_latency_s = 0.30;
  double detect_latency_s = 0.097;
  // Vocabulary file; relative paths resolve against the data directory.
  // Empty disables label checks.
  std::string labels = "coco_labels.txt";
};

struct SpeechConfig {
  size_t capacity = kDefaultQueueCapacity;
  DropPolicy drop_policy = DropPolicy::kDropLowestNewest;
  double base_per_char_s = 0.06;
  double rate = 1.0;
  std::string ocr_template = "Text reads {text}";
  std::string detect_template = "I see {labels}";
};

struct BudgetConfig {
  double lower_s = 3.0;
  double upper_s = 5.0;
  // Host time allowed per alert cycle with mock backends.
  double mock_overhead_s = 0.050;
};

struct PipelineConfig {
  SensorConfig sensor;
  AlertConfig alert;
  double alert_processing_s = 0.001;
  PerceptionConfig perception;
  SpeechConfig speech;
  BudgetConfig budget;

  void Validate() const;

  // Sections: sensor, alert, perception, speech, budget. Missing keys keep
  // their defaults; unknown keys are rejected.
  static PipelineConfig FromJson(std::string_view json_text,
                                 std::string_view source = "<memory>");
  static PipelineConfig Load(const std::filesystem::path& path);
};

struct Backends {
  std::shared_ptr<const DetectorBackend> detector;
  std::shared_ptr<const OcrBackend> ocr;
};

// Builds backends by id: detector "mock"; ocr "mock-tesseract",
// "mock-easyocr" (confusion rules from the bundled engine profiles) or
// "mock" (no rules). Throws ValidationError on an unknown id.
Backends MakeBackends(const PerceptionConfig& cfg, std::uint64_t seed);

enum class Stage { kSensor, kAlert, kCapture, kOcr, kDetect, kSpeech };
inline constexpr size_t kStageCount = 6;
std::string_view ToString(Stage stage);

struct StageStats {
  size_t count = 0;
  double sum_s = 0.0;
  double max_s = 0.0;

  void Add(double seconds);
  double mean_s() const { return count == 0 ? 0.0 : sum_s / static_cast<double>(count); }

  friend bool operator==(const StageStats&, const StageStats&) = default;
};

struct RunReport {
  std::string scenario;
  std::uint64_t seed = 0;
  size_t measurements = 0;
  size_t alerts_fired = 0;
  size_t warnings = 0;
  std::array<StageStats, kStageCount> stages{};
  std::vector<double> end_to_end_s;  // one per alert cycle
  double budget_lower_s = 0.0;
  double budget_upper_s = 0.0;
  bool budget_pass = false;

  const StageStats& stage(Stage s) const { return stages[static_cast<size_t>(s)]; }
  StageStats& stage(Stage s) { return stages[static_cast<size_t>(s)]; }
  double mean_end_to_end_s() const;

  std::string ToJson() const;
  // `stage,count,mean_s,max_s` rows plus an `end_to_end` row.
  std::string ToCsv() const;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

struct RunOptions {
  // Run OCR and detection of a cycle on separate threads. Results are
  // joined and spoken in the fixed order, so outputs do not change.
  bool parallel_perception = false;
  // Record host time per alert cycle into RunResult::wall_cycle_s.
  bool measure_wall = false;
};

struct RunResult {
  RunReport report;
  Transcript transcript;
  std::vector<std::string> log;
  std::vector<DistanceMeasurement> measurements;  // every ranging result
  std::vector<double> wall_cycle_s;
};

// Replays the scenario on a virtual clock. Each tick ranges the current
// distance; an alert speaks the warning, captures the latest frame, runs
// OCR then detection, and speaks each result. Per-cycle end-to-end time is
// the sum of the cycle's stage latencies. Deterministic in
// (scenario, cfg, backends, seed).
RunResult Run(const Scenario& scenario, const PipelineConfig& cfg,
              const Backends& backends, std::uint64_t seed,
              const RunOptions& options = {});

struct BudgetRange {
  double lower_s = 3.0;
  double upper_s = 5.0;
};

// True iff the mean end-to-end cycle time is at most the upper bound.
// The lower bound is informational.
bool CheckBudget(const RunReport& report, BudgetRange budget);

// `distance_cm,exec_time_s` rows followed by `mean,<mean>`.
std::string FormatSensorBench(std::span<const TimingSample> samples);

struct SensorBench {
  std::vector<TimingSample> samples;
  double mean_s = 0.0;
};
SensorBench ParseSensorBench(std::string_view csv);

}  // namespace percept

#endif  // PERCEPT_PIPELINE_HPP_
