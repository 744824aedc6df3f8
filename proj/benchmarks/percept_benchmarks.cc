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
#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "percept/detector_lab.hpp"
#include "percept/ocr_lab.hpp"
#include "percept/pipeline.hpp"

namespace percept {
namespace {

BoundingBox RandomBox(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x0 = u(gen), x1 = u(gen), y0 = u(gen), y1 = u(gen);
  if (x0 > x1) std::swap(x0, x1);
  if (y0 > y1) std::swap(y0, y1);
  return {x0, y0, x1, y1};
}

void BM_Iou(benchmark::State& state) {
  std::mt19937_64 gen(1);
  std::vector<BoundingBox> boxes;
  for (int i = 0; i < 1024; ++i) boxes.push_back(RandomBox(gen));
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Iou(boxes[i % 1024], boxes[(i + 1) % 1024]));
    ++i;
  }
}
BENCHMARK(BM_Iou);

void BM_MapRange(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> conf(0.0, 1.0);
  std::vector<GroundTruth> truths;
  std::vector<Prediction> preds;
  const char* labels[] = {"person", "car", "chair"};
  for (int i = 0; i < n; ++i) {
    const std::string image = "img" + std::to_string(i % 16);
    const std::string label = labels[i % 3];
    const BoundingBox box = RandomBox(gen);
    truths.push_back({image, label, box});
    preds.push_back({image, label, conf(gen), box});
    preds.push_back({image, label, conf(gen), RandomBox(gen)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(MapRange(preds, truths));
  state.SetComplexityN(n);
}
BENCHMARK(BM_MapRange)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

void BM_Align(benchmark::State& state) {
  const std::string truth = "abandon ability";
  const std::string output = "abandon abiliry";
  for (auto _ : state) benchmark::DoNotOptimize(Align(truth, output));
}
BENCHMARK(BM_Align);

void BM_PipelineRun(benchmark::State& state) {
  const std::string dir = PERCEPT_BENCH_DATA_DIR;
  const Scenario scenario = Scenario::Load(dir + "/scenario_walkthrough.json");
  const PipelineConfig cfg = PipelineConfig::Load(dir + "/pipeline_config.json");
  const Backends backends = MakeBackends(cfg.perception, 2026);
  RunOptions options;
  options.parallel_perception = state.range(0) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Run(scenario, cfg, backends, 2026, options));
  }
}
BENCHMARK(BM_PipelineRun)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace percept

BENCHMARK_MAIN();
