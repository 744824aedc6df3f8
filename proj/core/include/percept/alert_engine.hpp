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
#ifndef PERCEPT_ALERT_ENGINE_HPP_
#define PERCEPT_ALERT_ENGINE_HPP_

#include <optional>
#include <string>
#include <string_view>

#include "percept/sensor_model.hpp"

namespace percept {

inline constexpr std::string_view kDefaultAlertTemplate =
    "Obstacle ahead at {d} centimeters";

struct AlertConfig {
  double threshold_cm = 100.0;
  double min_interval_s = 2.0;
  // Zero disables hysteresis: the engine never disarms.
  double rearm_margin_cm = 0.0;
  std::string speech_template = std::string(kDefaultAlertTemplate);

  void Validate() const;
};

struct AlertEvent {
  double distance_cm = 0.0;
  double timestamp_s = 0.0;
  std::string message;

  friend bool operator==(const AlertEvent&, const AlertEvent&) = default;
};

// Single-owner debounce/hysteresis state.
struct AlertState {
  bool armed = true;
  std::optional<double> last_alert_s;
  std::optional<double> last_measurement_s;
};

// Emits an event iff the reading is in range, at or under the threshold,
// at least min_interval_s after the previous alert, and the engine is
// armed. A reading above threshold + rearm_margin re-arms the engine.
// Throws ValidationError if `m` is older than the previous measurement.
std::optional<AlertEvent> OnMeasurement(AlertState& state,
                                        const DistanceMeasurement& m,
                                        const AlertConfig& cfg);

// "Measure Distance = 53.4 cm"
std::string FormatDistanceLine(double distance_cm);

// Inverse of FormatDistanceLine.
std::optional<double> ParseDistanceLine(std::string_view line);

// Substitutes every "{d}" in `tmpl` with the distance at one decimal.
std::string FormatAlertSpeech(double distance_cm,
                              std::string_view tmpl = kDefaultAlertTemplate);

}  // namespace percept

#endif  // PERCEPT_ALERT_ENGINE_HPP_
