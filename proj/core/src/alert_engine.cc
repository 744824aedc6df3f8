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
#include "percept/alert_engine.hpp"

#include <charconv>
#include <cmath>

#include "percept/csv.hpp"
#include "percept/error.hpp"

namespace percept {
namespace {

constexpr std::string_view kLinePrefix = "Measure Distance = ";
constexpr std::string_view kLineSuffix = " cm";

}  // namespace

void AlertConfig::Validate() const {
  if (!(threshold_cm > 0.0)) {
    throw ValidationError("alert: threshold_cm must be > 0");
  }
  if (!(min_interval_s >= 0.0) || !(rearm_margin_cm >= 0.0)) {
    throw ValidationError("alert: min_interval_s and rearm_margin_cm must be >= 0");
  }
}

std::optional<AlertEvent> OnMeasurement(AlertState& state,
                                        const DistanceMeasurement& m,
                                        const AlertConfig& cfg) {
  if (state.last_measurement_s && m.timestamp_s < *state.last_measurement_s) {
    throw ValidationError("alert: measurement at t=" +
                          FormatDouble(m.timestamp_s) +
                          " arrived after t=" +
                          FormatDouble(*state.last_measurement_s));
  }
  state.last_measurement_s = m.timestamp_s;

  if (m.distance_cm > cfg.threshold_cm + cfg.rearm_margin_cm) {
    state.armed = true;
  }
  if (!m.in_range || m.distance_cm > cfg.threshold_cm || !state.armed) {
    return std::nullopt;
  }
  if (state.last_alert_s &&
      m.timestamp_s - *state.last_alert_s < cfg.min_interval_s) {
    return std::nullopt;
  }

  state.last_alert_s = m.timestamp_s;
  if (cfg.rearm_margin_cm > 0.0) state.armed = false;
  return AlertEvent{m.distance_cm, m.timestamp_s,
                    FormatAlertSpeech(m.distance_cm, cfg.speech_template)};
}

std::string FormatDistanceLine(double distance_cm) {
  std::string out(kLinePrefix);
  out += FormatFixed(distance_cm, 1);
  out += kLineSuffix;
  return out;
}

std::optional<double> ParseDistanceLine(std::string_view line) {
  if (!line.starts_with(kLinePrefix) || !line.ends_with(kLineSuffix)) {
    return std::nullopt;
  }
  line.remove_prefix(kLinePrefix.size());
  line.remove_suffix(kLineSuffix.size());
  const auto dot = line.find('.');
  if (dot == std::string_view::npos || dot + 2 != line.size()) {
    return std::nullopt;
  }
  double value = 0;
  const auto [ptr, ec] =
      std::from_chars(line.data(), line.data() + line.size(), value);
  if (ec != std::errc() || ptr != line.data() + line.size()) {
    return std::nullopt;
  }
  return value;
}

std::string FormatAlertSpeech(double distance_cm, std::string_view tmpl) {
  const std::string d = FormatFixed(distance_cm, 1);
  std::string out;
  size_t pos = 0;
  while (true) {
    const size_t hit = tmpl.find("{d}", pos);
    if (hit == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    out.append(tmpl.substr(pos, hit - pos));
    out += d;
    pos = hit + 3;
  }
  return out;
}

}  // namespace percept
