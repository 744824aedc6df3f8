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
#include "percept/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <nlohmann/json.hpp>
#include <set>

#include "percept/csv.hpp"
#include "percept/data_paths.hpp"
#include "percept/error.hpp"
#include "percept/ocr_lab.hpp"
#include "percept/rng.hpp"

namespace percept {

using nlohmann::json;

namespace {

json ParseJson(std::string_view text, std::string_view source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string(source) + ": " + e.what());
  }
}

// Reads keys of one JSON object, rejecting unknown ones.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_ + ": expected an object");
  }

  template <typename T>
  void Get(const char* key, T& out) {
    known_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw ValidationError(path_ + "." + key + ": wrong type");
    }
  }

  bool Has(const char* key) const { return j_.contains(key); }
  const json& At(const char* key) {
    known_.insert(key);
    return j_.at(key);
  }

  void RejectUnknown() const {
    for (const auto& [key, value] : j_.items()) {
      if (!known_.contains(key)) {
        throw ValidationError(path_ + ": unknown key '" + key + "'");
      }
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> known_;
};

BoundingBox BoxFromJson(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) {
    throw ValidationError(where + ": box must be [x_min,y_min,x_max,y_max]");
  }
  try {
    return BoundingBox::Checked(j[0].get<double>(), j[1].get<double>(),
                                j[2].get<double>(), j[3].get<double>());
  } catch (const json::exception&) {
    throw ValidationError(where + ": box coordinates must be numbers");
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

Frame FrameFromJson(const json& j, const std::string& where,
                    const std::string& default_id, double t_s) {
  Section s(j, where);
  Frame f;
  f.frame_id = default_id;
  f.captured_at_s = t_s;
  s.Get("id", f.frame_id);
  if (s.Has("objects")) {
    const json& objects = s.At("objects");
    if (!objects.is_array()) throw ValidationError(where + ".objects: expected array");
    for (size_t i = 0; i < objects.size(); ++i) {
      const auto w = where + ".objects[" + std::to_string(i) + "]";
      Section o(objects[i], w);
      LabeledBox lb;
      o.Get("label", lb.label);
      if (!o.Has("box")) throw ValidationError(w + ": missing box");
      lb.box = BoxFromJson(o.At("box"), w + ".box");
      o.RejectUnknown();
      f.objects.push_back(std::move(lb));
    }
  }
  if (s.Has("texts")) {
    const json& texts = s.At("texts");
    if (!texts.is_array()) throw ValidationError(where + ".texts: expected array");
    for (size_t i = 0; i < texts.size(); ++i) {
      const auto w = where + ".texts[" + std::to_string(i) + "]";
      Section o(texts[i], w);
      TextRegion tr;
      o.Get("text", tr.text);
      if (!o.Has("region")) throw ValidationError(w + ": missing region");
      tr.region = BoxFromJson(o.At("region"), w + ".region");
      o.RejectUnknown();
      f.texts.push_back(std::move(tr));
    }
  }
  s.RejectUnknown();
  return f;
}

std::string Substitute(std::string_view tmpl, std::string_view key,
                       std::string_view value) {
  std::string out;
  size_t pos = 0;
  while (true) {
    const size_t hit = tmpl.find(key, pos);
    if (hit == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      return out;
    }
    out.append(tmpl.substr(pos, hit - pos));
    out.append(value);
    pos = hit + key.size();
  }
}

std::string JoinNonEmpty(const std::vector<std::string>& parts,
                         std::string_view sep) {
  std::string out;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

}  // namespace

void Scenario::Validate(const ClassVocabulary* vocabulary) const {
  if (!(tick_s > 0.0)) throw ValidationError("scenario '" + name + "': tick_s must be > 0");
  if (!(duration_s >= 0.0)) {
    throw ValidationError("scenario '" + name + "': duration_s must be >= 0");
  }
  for (size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (i > 0 && !(e.t_s > events[i - 1].t_s)) {
      throw ValidationError("scenario '" + name +
                            "': event times must be strictly increasing (event " +
                            std::to_string(i) + ")");
    }
    if (!(e.distance_cm >= 0.0)) {
      throw ValidationError("scenario '" + name + "': negative distance at event " +
                            std::to_string(i));
    }
    if (e.frame) e.frame->Validate(vocabulary);
  }
}

const ScenarioEvent* Scenario::EventAt(double t_s) const {
  const auto it = std::upper_bound(
      events.begin(), events.end(), t_s,
      [](double t, const ScenarioEvent& e) { return t < e.t_s; });
  return it == events.begin() ? nullptr : &*std::prev(it);
}

const Frame* Scenario::FrameAt(double t_s) const {
  const Frame* found = nullptr;
  for (const auto& e : events) {
    if (e.t_s > t_s) break;
    if (e.frame) found = &*e.frame;
  }
  return found;
}

Scenario Scenario::FromJson(std::string_view json_text, std::string_view source) {
  const json root = ParseJson(json_text, source);
  const std::string where(source);
  Section s(root, where);
  Scenario sc;
  s.Get("name", sc.name);
  s.Get("tick_s", sc.tick_s);
  s.Get("duration_s", sc.duration_s);
  if (s.Has("events")) {
    const json& events = s.At("events");
    if (!events.is_array()) throw ValidationError(where + ".events: expected array");
    for (size_t i = 0; i < events.size(); ++i) {
      const auto w = where + ".events[" + std::to_string(i) + "]";
      Section e(events[i], w);
      ScenarioEvent ev;
      e.Get("t", ev.t_s);
      e.Get("distance_cm", ev.distance_cm);
      if (e.Has("frame") && !e.At("frame").is_null()) {
        ev.frame = FrameFromJson(e.At("frame"), w + ".frame",
                                 sc.name + "@" + FormatDouble(ev.t_s), ev.t_s);
      }
      e.RejectUnknown();
      sc.events.push_back(std::move(ev));
    }
  }
  s.RejectUnknown();
  sc.Validate();
  return sc;
}

Scenario Scenario::Load(const std::filesystem::path& path) {
  return FromJson(ReadFile(path), path.string());
}

void PipelineConfig::Validate() const {
  sensor.Validate();
  alert.Validate();
  auto non_negative = [](double v, const char* what) {
    if (!(v >= 0.0)) throw ValidationError(std::string(what) + " must be >= 0");
  };
  non_negative(alert_processing_s, "alert.processing_s");
  non_negative(perception.capture_latency_s, "perception.capture_latency_s");
  non_negative(perception.ocr_latency_s, "perception.ocr_latency_s");
  non_negative(perception.detect_latency_s, "perception.detect_latency_s");
  if (!(perception.miss_prob >= 0.0 && perception.miss_prob <= 1.0) ||
      !(perception.substitution_rate >= 0.0 && perception.substitution_rate <= 1.0)) {
    throw ValidationError("perception: probabilities must be in [0,1]");
  }
  if (speech.capacity == 0) throw ValidationError("speech.capacity must be >= 1");
  if (!(speech.rate > 0.0)) throw ValidationError("speech.rate must be > 0");
  non_negative(speech.base_per_char_s, "speech.base_per_char_s");
  if (!(budget.lower_s >= 0.0 && budget.lower_s <= budget.upper_s)) {
    throw ValidationError("budget: require 0 <= lower_s <= upper_s");
  }
  non_negative(budget.mock_overhead_s, "budget.mock_overhead_s");
}

PipelineConfig PipelineConfig::FromJson(std::string_view json_text,
                                        std::string_view source) {
  const json root = ParseJson(json_text, source);
  const std::string where(source);
  Section top(root, where);
  PipelineConfig cfg;
  if (top.Has("sensor")) {
    Section s(top.At("sensor"), where + ".sensor");
    s.Get("speed_of_sound_mps", cfg.sensor.speed_of_sound_mps);
    s.Get("min_range_cm", cfg.sensor.min_range_cm);
    s.Get("max_range_cm", cfg.sensor.max_range_cm);
    s.Get("overhead_base_s", cfg.sensor.overhead_base_s);
    s.Get("overhead_per_cm_s", cfg.sensor.overhead_per_cm_s);
    s.Get("jitter_std_s", cfg.sensor.jitter_std_s);
    s.Get("response_min_s", cfg.sensor.response_min_s);
    s.Get("response_max_s", cfg.sensor.response_max_s);
    s.RejectUnknown();
  }
  if (top.Has("alert")) {
    Section s(top.At("alert"), where + ".alert");
    s.Get("threshold_cm", cfg.alert.threshold_cm);
    s.Get("min_interval_s", cfg.alert.min_interval_s);
    s.Get("rearm_margin_cm", cfg.alert.rearm_margin_cm);
    s.Get("template", cfg.alert.speech_template);
    s.Get("processing_s", cfg.alert_processing_s);
    s.RejectUnknown();
  }
  if (top.Has("perception")) {
    Section s(top.At("perception"), where + ".perception");
    s.Get("detector", cfg.perception.detector);
    s.Get("ocr", cfg.perception.ocr);
    s.Get("miss_prob", cfg.perception.miss_prob);
    s.Get("substitution_rate", cfg.perception.substitution_rate);
    s.Get("capture_latency_s", cfg.perception.capture_latency_s);
    s.Get("ocr_latency_s", cfg.perception.ocr_latency_s);
    s.Get("detect_latency_s", cfg.perception.detect_latency_s);
    s.Get("labels", cfg.perception.labels);
    s.RejectUnknown();
  }
  if (top.Has("speech")) {
    Section s(top.At("speech"), where + ".speech");
    s.Get("capacity", cfg.speech.capacity);
    std::string policy(ToString(cfg.speech.drop_policy));
    s.Get("drop_policy", policy);
    if (policy == ToString(DropPolicy::kDropLowestNewest)) {
      cfg.speech.drop_policy = DropPolicy::kDropLowestNewest;
    } else if (policy == ToString(DropPolicy::kRejectNew)) {
      cfg.speech.drop_policy = DropPolicy::kRejectNew;
    } else {
      throw ValidationError(where + ".speech.drop_policy: unknown policy '" +
                            policy + "'");
    }
    s.Get("base_per_char_s", cfg.speech.base_per_char_s);
    s.Get("rate", cfg.speech.rate);
    s.Get("ocr_template", cfg.speech.ocr_template);
    s.Get("detect_template", cfg.speech.detect_template);
    s.RejectUnknown();
  }
  if (top.Has("budget")) {
    Section s(top.At("budget"), where + ".budget");
    s.Get("lower_s", cfg.budget.lower_s);
    s.Get("upper_s", cfg.budget.upper_s);
    s.Get("mock_overhead_s", cfg.budget.mock_overhead_s);
    s.RejectUnknown();
  }
  top.RejectUnknown();
  cfg.Validate();
  return cfg;
}

PipelineConfig PipelineConfig::Load(const std::filesystem::path& path) {
  return FromJson(ReadFile(path), path.string());
}

Backends MakeBackends(const PerceptionConfig& cfg, std::uint64_t seed) {
  Backends b;
  if (cfg.detector == "mock") {
    b.detector = std::make_shared<MockDetector>(MockDetectorConfig{
        .id = "mock",
        .miss_prob = cfg.miss_prob,
        .seed = seed,
        .latency_s = cfg.detect_latency_s});
  } else {
    throw ValidationError("unknown detector backend '" + cfg.detector + "'");
  }

  MockOcrConfig ocr{.id = cfg.ocr,
                    .substitution_rate = cfg.substitution_rate,
                    .seed = seed,
                    .rules = {},
                    .latency_s = cfg.ocr_latency_s};
  if (cfg.ocr == "mock-tesseract" || cfg.ocr == "mock-easyocr") {
    const auto profiles = LoadEngineProfiles(DataPath("engine_profiles.csv"),
                                             DataPath("engine_confusions.csv"));
    ocr.rules = FindProfile(profiles, cfg.ocr.substr(5)).confusion_rules;
  } else if (cfg.ocr != "mock") {
    throw ValidationError("unknown ocr backend '" + cfg.ocr + "'");
  }
  b.ocr = std::make_shared<MockOcr>(std::move(ocr));
  return b;
}

std::string_view ToString(Stage stage) {
  switch (stage) {
    case Stage::kSensor:
      return "sensor";
    case Stage::kAlert:
      return "alert";
    case Stage::kCapture:
      return "capture";
    case Stage::kOcr:
      return "ocr";
    case Stage::kDetect:
      return "detect";
    case Stage::kSpeech:
      return "speech";
  }
  return "unknown";
}

void StageStats::Add(double seconds) {
  ++count;
  sum_s += seconds;
  max_s = std::max(max_s, seconds);
}

double RunReport::mean_end_to_end_s() const {
  if (end_to_end_s.empty()) return 0.0;
  double sum = 0.0;
  for (const double t : end_to_end_s) sum += t;
  return sum / static_cast<double>(end_to_end_s.size());
}

std::string RunReport::ToJson() const {
  nlohmann::ordered_json j;
  j["scenario"] = scenario;
  j["seed"] = seed;
  j["measurements"] = measurements;
  j["alerts_fired"] = alerts_fired;
  j["warnings"] = warnings;
  auto st = nlohmann::ordered_json::array();
  for (size_t i = 0; i < kStageCount; ++i) {
    const auto& s = stages[i];
    st.push_back({{"stage", ToString(static_cast<Stage>(i))},
                  {"count", s.count},
                  {"mean_s", s.mean_s()},
                  {"max_s", s.max_s}});
  }
  j["stages"] = std::move(st);
  j["end_to_end_s"] = end_to_end_s;
  j["mean_end_to_end_s"] = mean_end_to_end_s();
  j["budget"] = {{"lower_s", budget_lower_s}, {"upper_s", budget_upper_s}};
  j["budget_pass"] = budget_pass;
  return j.dump(2) + "\n";
}

std::string RunReport::ToCsv() const {
  std::string out = "stage,count,mean_s,max_s\n";
  for (size_t i = 0; i < kStageCount; ++i) {
    const auto& s = stages[i];
    out += std::string(ToString(static_cast<Stage>(i))) + "," +
           std::to_string(s.count) + "," + FormatDouble(s.mean_s()) + "," +
           FormatDouble(s.max_s) + "\n";
  }
  double max_e2e = 0.0;
  for (const double t : end_to_end_s) max_e2e = std::max(max_e2e, t);
  out += "end_to_end," + std::to_string(end_to_end_s.size()) + "," +
         FormatDouble(mean_end_to_end_s()) + "," + FormatDouble(max_e2e) + "\n";
  return out;
}

namespace {

// Mutable state of one run.
class Runner {
 public:
  Runner(const Scenario& scenario, const PipelineConfig& cfg,
         const Backends& backends, std::uint64_t seed, const RunOptions& options)
      : scenario_(scenario),
        cfg_(cfg),
        backends_(backends),
        options_(options),
        rng_(seed),
        queue_(cfg.speech.capacity, cfg.speech.drop_policy) {
    result_.report.scenario = scenario.name;
    result_.report.seed = seed;
    result_.report.budget_lower_s = cfg.budget.lower_s;
    result_.report.budget_upper_s = cfg.budget.upper_s;
  }

  RunResult Execute() {
    auto& report = result_.report;
    for (std::uint64_t k = 0;; ++k) {
      const double tick = static_cast<double>(k) * scenario_.tick_s;
      if (!(tick < scenario_.duration_s)) break;
      if (tick < clock_.now()) continue;  // still busy with a cycle
      clock_.AdvanceTo(tick);
      const ScenarioEvent* event = scenario_.EventAt(tick);
      if (event == nullptr) continue;  // nothing in the world yet

      const auto m = SimulateMeasurement(event->distance_cm, cfg_.sensor, rng_, tick);
      ++report.measurements;
      result_.measurements.push_back(m);
      report.stage(Stage::kSensor).Add(m.exec_time_s);
      clock_.Advance(m.exec_time_s);

      if (auto alert = OnMeasurement(alert_state_, m, cfg_.alert)) {
        const auto wall_start = std::chrono::steady_clock::now();
        RunCycle(m, *alert);
        if (options_.measure_wall) {
          result_.wall_cycle_s.push_back(std::chrono::duration<double>(
              std::chrono::steady_clock::now() - wall_start).count());
        }
      }
    }
    report.budget_pass =
        CheckBudget(report, {cfg_.budget.lower_s, cfg_.budget.upper_s});
    return std::move(result_);
  }

 private:
  void Log(std::string line) { result_.log.push_back(std::move(line)); }

  void Warn(const std::string& what) {
    ++result_.report.warnings;
    Log("[t=" + FormatFixed(clock_.now(), 3) + "] warning: " + what);
  }

  // Stage time accrues to both the virtual clock and the cycle total.
  void Spend(Stage stage, double seconds, double& cycle_s) {
    result_.report.stage(stage).Add(seconds);
    clock_.Advance(seconds);
    cycle_s += seconds;
  }

  void Say(std::string text, Priority priority, double& cycle_s) {
    try {
      queue_.Enqueue({std::move(text), priority, clock_.now(), cfg_.speech.rate, 0});
    } catch (const QueueFullError& e) {
      Warn(e.what());
    }
    VirtualClock speaker(clock_.now());
    const auto spoken =
        SpeakAll(queue_, synth_, speaker, cfg_.speech.base_per_char_s);
    for (const auto& entry : spoken.entries) {
      const double d = ModeledDuration(entry.text, cfg_.speech.rate,
                                       cfg_.speech.base_per_char_s);
      Spend(Stage::kSpeech, d, cycle_s);
      result_.transcript.entries.push_back(entry);
    }
  }

  void RunCycle(const DistanceMeasurement& m, const AlertEvent& alert) {
    auto& report = result_.report;
    ++report.alerts_fired;
    double cycle_s = m.exec_time_s;
    Log("[t=" + FormatFixed(m.timestamp_s, 3) + "] alert");
    Log(FormatDistanceLine(m.distance_cm));
    Log("time taken to execute " + FormatDouble(m.exec_time_s));

    Spend(Stage::kAlert, cfg_.alert_processing_s, cycle_s);
    Say(alert.message, Priority::kAlert, cycle_s);

    Spend(Stage::kCapture, cfg_.perception.capture_latency_s, cycle_s);
    const Frame* frame = scenario_.FrameAt(m.timestamp_s);
    if (frame == nullptr) {
      Warn("no frame available at alert time; ranging-only alert");
      report.end_to_end_s.push_back(cycle_s);
      return;
    }

    std::vector<OcrExtraction> texts;
    std::vector<Detection> objects;
    if (options_.parallel_perception) {
      auto ocr = std::async(std::launch::async,
                            [&] { return ExtractText(*frame, *backends_.ocr); });
      auto det = std::async(std::launch::async,
                            [&] { return Detect(*frame, *backends_.detector); });
      texts = ocr.get();
      objects = det.get();
    } else {
      texts = ExtractText(*frame, *backends_.ocr);
    }

    Spend(Stage::kOcr, backends_.ocr->modeled_latency_s(), cycle_s);
    std::vector<std::string> words;
    for (const auto& t : texts) words.push_back(t.text);
    if (const auto joined = JoinNonEmpty(words, ", "); !joined.empty()) {
      Say(Substitute(cfg_.speech.ocr_template, "{text}", joined),
          Priority::kPerception, cycle_s);
    }

    if (!options_.parallel_perception) {
      objects = Detect(*frame, *backends_.detector);
    }
    Spend(Stage::kDetect, backends_.detector->modeled_latency_s(), cycle_s);
    std::vector<std::string> labels;
    for (const auto& d : objects) labels.push_back(d.label);
    if (const auto joined = JoinNonEmpty(labels, ", "); !joined.empty()) {
      Say(Substitute(cfg_.speech.detect_template, "{labels}", joined),
          Priority::kPerception, cycle_s);
    }
    report.end_to_end_s.push_back(cycle_s);
  }

  const Scenario& scenario_;
  const PipelineConfig& cfg_;
  const Backends& backends_;
  const RunOptions& options_;
  Rng rng_;
  VirtualClock clock_;
  AlertState alert_state_;
  SpeechQueue queue_;
  MockSynthesizer synth_;
  RunResult result_;
};

}  // namespace

RunResult Run(const Scenario& scenario, const PipelineConfig& cfg,
              const Backends& backends, std::uint64_t seed,
              const RunOptions& options) {
  cfg.Validate();
  std::optional<ClassVocabulary> vocabulary;
  if (!cfg.perception.labels.empty()) {
    std::filesystem::path labels(cfg.perception.labels);
    if (labels.is_relative()) labels = DataDir() / labels;
    vocabulary = ClassVocabulary::Load(labels);
  }
  scenario.Validate(vocabulary ? &*vocabulary : nullptr);
  if (!backends.detector || !backends.ocr) {
    throw ValidationError("pipeline: detector and ocr backends are required");
  }
  return Runner(scenario, cfg, backends, seed, options).Execute();
}

bool CheckBudget(const RunReport& report, BudgetRange budget) {
  return report.mean_end_to_end_s() <= budget.upper_s;
}

std::string FormatSensorBench(std::span<const TimingSample> samples) {
  std::vector<double> times;
  std::string out = "distance_cm,exec_time_s\n";
  for (const auto& s : samples) {
    out += FormatDouble(s.distance_cm) + "," + FormatDouble(s.exec_time_s) + "\n";
    times.push_back(s.exec_time_s);
  }
  out += "mean," + FormatDouble(MeanResponseTime(std::span<const double>(times))) + "\n";
  return out;
}

SensorBench ParseSensorBench(std::string_view csv) {
  const CsvTable table = ParseCsv(csv);
  if (table.header != std::vector<std::string>{"distance_cm", "exec_time_s"}) {
    throw ValidationError("sensor bench: unexpected header");
  }
  SensorBench bench;
  bool have_mean = false;
  for (const auto& row : table.rows) {
    if (row.fields.size() != 2 || have_mean) {
      throw ValidationError("sensor bench: malformed row at line " +
                            std::to_string(row.line_number));
    }
    if (row.fields[0] == "mean") {
      bench.mean_s = ParseDouble(row.fields[1], "mean");
      have_mean = true;
    } else {
      bench.samples.push_back({ParseDouble(row.fields[0], "distance_cm"),
                               ParseDouble(row.fields[1], "exec_time_s")});
    }
  }
  if (!have_mean) throw ValidationError("sensor bench: missing mean row");
  return bench;
}

}  // namespace percept
