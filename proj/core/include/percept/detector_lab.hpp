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
#ifndef PERCEPT_DETECTOR_LAB_HPP_
#define PERCEPT_DETECTOR_LAB_HPP_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "percept/perception.hpp"

namespace percept {

// Intersection over union. Zero when the union has zero area.
double Iou(const BoundingBox& a, const BoundingBox& b);

struct GroundTruth {
  std::string image_id;
  std::string label;
  BoundingBox box;
};

struct Prediction {
  std::string image_id;
  std::string label;
  double confidence = 0.0;
  BoundingBox box;
};

// Per-rank matching outcome for one label, in ranking order.
struct RankedMatch {
  size_t prediction_index = 0;  // index into the input predictions
  bool true_positive = false;
  std::optional<size_t> matched_truth;  // index into the input truths
};

// Ranks predictions of `label` by descending confidence (ties: ascending
// image id, then input order) and greedily matches each to the unmatched
// same-image truth of highest IoU (ties: lower index) with
// IoU >= iou_threshold. Duplicates of a matched truth are false positives.
std::vector<RankedMatch> MatchPredictions(std::span<const Prediction> preds,
                                          std::span<const GroundTruth> truths,
                                          const std::string& label,
                                          double iou_threshold);

// All-point interpolated AP from ranked TP flags and the truth count:
// each true positive contributes max precision at its rank or later,
// divided by num_truths.
double InterpolatedAp(const std::vector<bool>& ranked_tp, size_t num_truths);

// Area under the all-point interpolated precision/recall curve for
// `label`, in [0,1]. Throws ValidationError if the label has no truths or
// the threshold is outside (0,1).
double AveragePrecision(std::span<const Prediction> preds,
                        std::span<const GroundTruth> truths,
                        const std::string& label, double iou_threshold);

// Mean AP over the labels present in `truths` (ascending label order), in
// percent. Throws ValidationError on an empty truth set.
double MapAt(std::span<const Prediction> preds,
             std::span<const GroundTruth> truths, double iou_threshold);

inline constexpr size_t kCocoThresholdCount = 10;

// {0.50, 0.55, ..., 0.95}, each computed as k/100.
std::array<double, kCocoThresholdCount> CocoIouThresholds();

// Mean of MapAt over CocoIouThresholds(), ascending, in percent.
double MapRange(std::span<const Prediction> preds,
                std::span<const GroundTruth> truths);

// Line-delimited `image_id,label,confidence,x_min,y_min,x_max,y_max`
// records; truths omit the confidence field.
std::vector<GroundTruth> ParseTruths(std::string_view content,
                                     std::string_view source = "<memory>");
std::vector<Prediction> ParsePredictions(std::string_view content,
                                         std::string_view source = "<memory>");
std::vector<GroundTruth> LoadTruths(const std::filesystem::path& path);
std::vector<Prediction> LoadPredictions(const std::filesystem::path& path);
std::string FormatTruths(std::span<const GroundTruth> truths);
std::string FormatPredictions(std::span<const Prediction> preds);

struct ModelSpec {
  std::string name;
  std::string framework;
  double gflops = 0.0;
  double mparams = 0.0;
  // Headline mAP for single-column tables, mAP@0.5 otherwise. Percent.
  std::optional<double> map_50;
  std::optional<double> map_50_95;
  std::optional<int> input_size;
  std::optional<double> size_mb;

  void Validate() const;
};

enum class MapMetric { kMap50, kMap50To95 };

std::optional<double> MetricOf(const ModelSpec& m, MapMetric metric);

// Reads either reference schema:
//   name,framework,gflops,mparams,map
//   id,name,input_size,gflops,mparams,size_mb,map50,map5095
// "-" marks an absent value and a trailing '%' is ignored. Names that
// repeat within a table are qualified as "name@input_size".
std::vector<ModelSpec> LoadModelTable(const std::filesystem::path& path);
std::vector<ModelSpec> ParseModelTable(std::string_view content,
                                       std::string_view source = "<memory>");

struct PlatformLatency {
  std::string equipment;
  std::string computing_backend;
  std::string system;
  int input_size = 0;
  std::string framework;
  std::map<std::string, double> latency_ms;  // per model name
};

// Header `equipment,computing_backend,system,input_size,framework,<model>...`.
std::vector<PlatformLatency> LoadPlatformLatency(
    const std::filesystem::path& path);

// True if `a` is no worse on both axes and strictly better on one.
bool Dominates(const ModelSpec& a, const ModelSpec& b, MapMetric metric);

struct FrontierResult {
  std::vector<ModelSpec> frontier;  // ascending gflops, then name
  std::vector<std::string> excluded;  // rows lacking the metric
};

// Models not dominated under (min gflops, max mAP). Throws
// ValidationError if no model carries the metric.
FrontierResult ParetoFrontier(std::span<const ModelSpec> models,
                              MapMetric metric = MapMetric::kMap50);

// Highest-mAP model with gflops <= budget; ties by lower gflops, then name.
// Throws ValidationError naming the cheapest model when none fits.
ModelSpec Recommend(std::span<const ModelSpec> models, double gflops_budget,
                    MapMetric metric = MapMetric::kMap50);

}  // namespace percept

#endif  // PERCEPT_DETECTOR_LAB_HPP_
