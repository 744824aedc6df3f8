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
#include "percept/sensor_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "percept/csv.hpp"
#include "percept/error.hpp"

namespace percept {
namespace {

constexpr double kCmPerMeter = 100.0;

}  // namespace

void SensorConfig::Validate() const {
  if (!(speed_of_sound_mps > 0.0)) {
    throw ValidationError("sensor: speed_of_sound must be > 0");
  }
  if (!(min_range_cm > 0.0 && min_range_cm < max_range_cm)) {
    throw ValidationError("sensor: require 0 < min_range_cm < max_range_cm");
  }
  if (!(overhead_base_s >= 0.0) || !(overhead_per_cm_s >= 0.0) ||
      !(jitter_std_s >= 0.0)) {
    throw ValidationError("sensor: overheads and jitter must be >= 0");
  }
}

double DistanceFromEcho(EchoSample echo, const SensorConfig& cfg) {
  if (!(echo.roundtrip_s >= 0.0)) {
    throw ValidationError("echo round trip must be >= 0");
  }
  return cfg.speed_of_sound_mps * echo.roundtrip_s / 2.0 * kCmPerMeter;
}

EchoSample EchoFromDistance(double distance_cm, const SensorConfig& cfg) {
  if (!(distance_cm >= 0.0)) {
    throw ValidationError("distance must be >= 0");
  }
  return {2.0 * (distance_cm / kCmPerMeter) / cfg.speed_of_sound_mps};
}

bool InRange(double distance_cm, const SensorConfig& cfg) {
  return cfg.min_range_cm <= distance_cm && distance_cm <= cfg.max_range_cm;
}

double ModeledExecTime(double distance_cm, const SensorConfig& cfg) {
  return cfg.overhead_base_s + cfg.overhead_per_cm_s * distance_cm +
         EchoFromDistance(distance_cm, cfg).roundtrip_s;
}

DistanceMeasurement SimulateMeasurement(double true_distance_cm,
                                        const SensorConfig& cfg, Rng& rng,
                                        double timestamp_s) {
  double exec = ModeledExecTime(true_distance_cm, cfg);
  if (cfg.jitter_std_s > 0.0) exec += cfg.jitter_std_s * rng.Normal();
  return {
      .distance_cm = true_distance_cm,
      .exec_time_s = std::max(exec, kMinExecTimeS),
      .in_range = InRange(true_distance_cm, cfg),
      .timestamp_s = timestamp_s,
  };
}

double MeanResponseTime(std::span<const double> exec_times_s) {
  if (exec_times_s.empty()) {
    throw ValidationError("mean response time: no samples");
  }
  double sum = 0.0;
  for (const double t : exec_times_s) sum += t;
  return sum / static_cast<double>(exec_times_s.size());
}

double MeanResponseTime(std::span<const DistanceMeasurement> samples) {
  std::vector<double> times;
  times.reserve(samples.size());
  for (const auto& m : samples) times.push_back(m.exec_time_s);
  return MeanResponseTime(std::span<const double>(times));
}

std::vector<TimingSample> LoadSensorTimings(const std::filesystem::path& path) {
  const CsvTable table = ReadCsv(path);
  const int d_col = table.Column("distance_cm");
  const int t_col = table.Column("exec_time_s");
  if (d_col < 0 || t_col < 0) {
    throw ValidationError(path.string() +
                          ": expected columns distance_cm,exec_time_s");
  }
  std::vector<TimingSample> out;
  for (const auto& row : table.rows) {
    if (row.fields.size() != table.header.size()) {
      throw ValidationError(path.string() + ":" +
                            std::to_string(row.line_number) +
                            ": wrong field count");
    }
    TimingSample s{ParseDouble(row.fields[d_col], "distance_cm"),
                   ParseDouble(row.fields[t_col], "exec_time_s")};
    if (s.distance_cm < 0.0 || !(s.exec_time_s > 0.0)) {
      throw ValidationError(path.string() + ":" +
                            std::to_string(row.line_number) +
                            ": distance must be >= 0 and time > 0");
    }
    out.push_back(s);
  }
  return out;
}

LatencyFit FitLatencyModel(std::span<const TimingSample> samples,
                           double speed_of_sound_mps) {
  SensorConfig physics;
  physics.speed_of_sound_mps = speed_of_sound_mps;
  const double n = static_cast<double>(samples.size());
  double sx = 0, sy = 0;
  for (const auto& s : samples) {
    sx += s.distance_cm;
    sy += s.exec_time_s - EchoFromDistance(s.distance_cm, physics).roundtrip_s;
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& s : samples) {
    const double y =
        s.exec_time_s - EchoFromDistance(s.distance_cm, physics).roundtrip_s;
    sxx += (s.distance_cm - mx) * (s.distance_cm - mx);
    sxy += (s.distance_cm - mx) * (y - my);
  }
  if (samples.size() < 2 || sxx == 0.0) {
    throw ValidationError("latency fit needs at least two distinct distances");
  }
  LatencyFit fit;
  fit.overhead_per_cm_s = sxy / sxx;
  fit.overhead_base_s = my - fit.overhead_per_cm_s * mx;
  double ss = 0;
  for (const auto& s : samples) {
    const double y =
        s.exec_time_s - EchoFromDistance(s.distance_cm, physics).roundtrip_s;
    const double r = y - fit.overhead_base_s - fit.overhead_per_cm_s * s.distance_cm;
    ss += r * r;
  }
  fit.residual_std_s = std::sqrt(ss / n);
  return fit;
}

}  // namespace percept
