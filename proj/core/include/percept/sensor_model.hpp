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
#ifndef PERCEPT_SENSOR_MODEL_HPP_
#define PERCEPT_SENSOR_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "percept/rng.hpp"

namespace percept {

// Least-squares fit of (exec_time - round_trip) = base + per_cm * distance
// over the bundled HC-SR04 timing table at 343 m/s. See FitLatencyModel.
inline constexpr double kFittedOverheadBaseS = 1.3457035753e-3;
inline constexpr double kFittedOverheadPerCmS = 1.2005086473e-5;

// Lower bound on a simulated execution time.
inline constexpr double kMinExecTimeS = 1e-6;

struct SensorConfig {
  double speed_of_sound_mps = 343.0;
  double min_range_cm = 40.0;
  double max_range_cm = 300.0;
  double overhead_base_s = kFittedOverheadBaseS;
  double overhead_per_cm_s = kFittedOverheadPerCmS;
  double jitter_std_s = 0.0;
  std::uint64_t seed = 0;
  // Datasheet response window of the ranging module. Reported alongside
  // the measured timings; not used by the latency model.
  double response_min_s = 0.050;
  double response_max_s = 0.200;

  // Throws ValidationError if any invariant is violated.
  void Validate() const;
};

struct EchoSample {
  double roundtrip_s = 0.0;
};

struct DistanceMeasurement {
  double distance_cm = 0.0;
  double exec_time_s = 0.0;
  bool in_range = false;
  double timestamp_s = 0.0;

  friend bool operator==(const DistanceMeasurement&,
                         const DistanceMeasurement&) = default;
};

// d = c * t / 2, in centimeters.
double DistanceFromEcho(EchoSample echo, const SensorConfig& cfg);

// Inverse of DistanceFromEcho.
EchoSample EchoFromDistance(double distance_cm, const SensorConfig& cfg);

bool InRange(double distance_cm, const SensorConfig& cfg);

// Deterministic part of the latency model:
// base + per_cm * d + round_trip(d).
double ModeledExecTime(double distance_cm, const SensorConfig& cfg);

// One ranging cycle. Out-of-range distances still produce a measurement
// with in_range = false. Draws exactly one normal variate from `rng` when
// jitter_std_s > 0 and none otherwise.
DistanceMeasurement SimulateMeasurement(double true_distance_cm,
                                        const SensorConfig& cfg, Rng& rng,
                                        double timestamp_s = 0.0);

// Arithmetic mean of exec times, summed in input order. Throws
// ValidationError on an empty input.
double MeanResponseTime(std::span<const DistanceMeasurement> samples);
double MeanResponseTime(std::span<const double> exec_times_s);

// One row of a distance vs. execution time table.
struct TimingSample {
  double distance_cm = 0.0;
  double exec_time_s = 0.0;
};

// Reads `distance_cm,exec_time_s` CSV.
std::vector<TimingSample> LoadSensorTimings(const std::filesystem::path& path);

struct LatencyFit {
  double overhead_base_s = 0.0;
  double overhead_per_cm_s = 0.0;
  double residual_std_s = 0.0;
};

// Ordinary least squares for the affine overhead after removing the
// physical round trip at `speed_of_sound_mps`. Needs two distinct
// distances.
LatencyFit FitLatencyModel(std::span<const TimingSample> samples,
                           double speed_of_sound_mps = 343.0);

}  // namespace percept

#endif  // PERCEPT_SENSOR_MODEL_HPP_
