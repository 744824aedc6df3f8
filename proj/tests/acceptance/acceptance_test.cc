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
// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "percept/alert_engine.hpp"
#include "percept/csv.hpp"
#include "percept/data_paths.hpp"
#include "percept/detector_lab.hpp"
#include "percept/ocr_lab.hpp"
#include "percept/perception.hpp"
#include "percept/pipeline.hpp"
#include "percept/rng.hpp"
#include "percept/sensor_model.hpp"

namespace percept {
namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void Require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

using Clock = std::chrono::steady_clock;

// 1. Sensor mean through the command-line entry point.
Verdict SensorMean() {
  Verdict v;
  const auto start = Clock::now();
  std::ostringstream out;
  std::ostringstream err;
  const std::vector<std::string> args{"sensor-bench", "--data",
                                      DataPath("fig6_sensor_timings.csv").string()};
  const int code = cli::Dispatch(args, out, err);
  const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  v.Require(code == 0, "exit code " + std::to_string(code) + ": " + err.str());
  const std::string text = out.str();
  v.Require(text.find("\nmean,0.007137478\n") != std::string::npos,
            "mean line missing in output");
  const auto bench = ParseSensorBench(text);
  v.Require(bench.mean_s == 0.007137478, "parsed mean " + FormatDouble(bench.mean_s));
  v.Require(elapsed < 1.0, "took " + FormatDouble(elapsed) + " s");
  v.detail = v.pass ? "mean,0.007137478 in " + FormatFixed(elapsed * 1e3, 2) + " ms"
                    : v.detail;
  return v;
}

// 2. Distance formula and round-trip identity.
Verdict DistanceFormula() {
  Verdict v;
  const SensorConfig cfg;
  const double d = DistanceFromEcho({0.00311370}, cfg);
  v.Require(std::abs(d - 53.4) <= 0.05, "distance " + FormatDouble(d));
  std::mt19937_64 gen(20260101);
  std::uniform_real_distribution<double> u(0.0, 500.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double x = u(gen);
    const double back = DistanceFromEcho(EchoFromDistance(x, cfg), cfg);
    const double rel = x == 0.0 ? std::abs(back) : std::abs(back - x) / x;
    worst = std::max(worst, rel);
  }
  v.Require(worst <= 1e-9, "worst relative error " + FormatDouble(worst));
  if (v.pass) v.detail = "53.4 cm; worst round-trip rel. error " + FormatDouble(worst);
  return v;
}

std::vector<std::string> Names(const std::vector<ModelSpec>& models) {
  std::vector<std::string> out;
  for (const auto& m : models) out.push_back(m.name);
  std::sort(out.begin(), out.end());
  return out;
}

// 3. Pareto frontiers against the pairwise oracle.
Verdict Pareto() {
  Verdict v;
  const auto fig8 = LoadModelTable(DataPath("fig8_models.csv"));
  const auto fig10 = LoadModelTable(DataPath("fig10_models.csv"));
  const auto f8 = Names(ParetoFrontier(fig8).frontier);
  const auto f10 = Names(ParetoFrontier(fig10).frontier);
  const std::vector<std::string> want8{"mobilenet-ssd"};
  const std::vector<std::string> want10{"yolo-fastest", "yolo-fastest-xl",
                                        "yolov5-lite@320", "yolov5-lite@640", "yolov5s"};
  v.Require(f8 == want8, "first table frontier differs");
  v.Require(f8 == oracle::PairwiseFrontier(fig8, false), "oracle disagrees on first table");
  v.Require(f10 == want10, "second table frontier differs");
  v.Require(f10 == oracle::PairwiseFrontier(fig10, false),
            "oracle disagrees on second table");
  if (v.pass) v.detail = "{mobilenet-ssd} and 5-model set, oracle agrees";
  return v;
}

// Sides in [0.3, 0.9], so one grid cell stays small next to every box.
BoundingBox RandomBox(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> side(0.3, 0.9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double w = side(gen), h = side(gen);
  const double x0 = u(gen) * (1.0 - w), y0 = u(gen) * (1.0 - h);
  return {x0, y0, x0 + w, y0 + h};
}

// 4. IoU against a 512x512 grid count.
Verdict IouOracle() {
  Verdict v;
  std::mt19937_64 gen(4);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const BoundingBox a = RandomBox(gen);
    // Half the pairs are perturbations of `a` so high overlaps are covered.
    BoundingBox b = RandomBox(gen);
    if (i % 2 == 0) {
      std::uniform_real_distribution<double> j(-0.05, 0.05);
      b = {std::clamp(a.x_min + j(gen), 0.0, 1.0), std::clamp(a.y_min + j(gen), 0.0, 1.0),
           std::clamp(a.x_max + j(gen), 0.0, 1.0), std::clamp(a.y_max + j(gen), 0.0, 1.0)};
    }
    worst = std::max(worst, std::abs(Iou(a, b) - oracle::GridIou(a, b, 512)));
  }
  v.Require(worst <= 0.01, "worst grid deviation " + FormatDouble(worst));
  const double hand = Iou({0, 0, 0.2, 0.2}, {0.1, 0.1, 0.3, 0.3});
  v.Require(std::abs(hand - 1.0 / 7.0) <= 1e-6, "hand case " + FormatDouble(hand));
  if (v.pass) v.detail = "worst deviation " + FormatFixed(worst, 5) + "; hand case 1/7";
  return v;
}

// 5. AP against the exhaustive assignment oracle on every small instance.
Verdict ApOracle() {
  Verdict v;
  // Boxes chosen so IoUs straddle the tested thresholds.
  const std::vector<BoundingBox> truth_boxes{{0.1, 0.1, 0.5, 0.5}, {0.3, 0.3, 0.7, 0.7}};
  const std::vector<BoundingBox> pred_boxes{{0.1, 0.1, 0.5, 0.5}, {0.15, 0.1, 0.55, 0.5},
                                            {0.3, 0.25, 0.7, 0.7}, {0.6, 0.6, 0.95, 0.95}};
  const std::vector<double> confidences{0.9, 0.6};
  const std::vector<std::string> images{"a", "b"};
  const std::vector<double> thresholds{0.3, 0.5, 0.75};

  // Truth options: (image, box); prediction options: (image, box, confidence).
  struct TruthOpt { size_t image, box; };
  struct PredOpt { size_t image, box, conf; };
  std::vector<TruthOpt> topts;
  for (size_t i = 0; i < images.size(); ++i) {
    for (size_t b = 0; b < truth_boxes.size(); ++b) topts.push_back({i, b});
  }
  std::vector<PredOpt> popts;
  for (size_t i = 0; i < images.size(); ++i) {
    for (size_t b = 0; b < pred_boxes.size(); ++b) {
      for (size_t c = 0; c < confidences.size(); ++c) popts.push_back({i, b, c});
    }
  }

  // Multisets of options (each instance also checked with its predictions in
  // reverse input order, which exercises the tie-break on equal confidence).
  size_t instances = 0;
  std::vector<GroundTruth> truths;
  std::vector<Prediction> preds;
  auto check = [&] {
    for (int pass = 0; pass < 2; ++pass) {
      std::vector<Prediction> order = preds;
      if (pass == 1) std::reverse(order.begin(), order.end());
      for (const double t : thresholds) {
        ++instances;
        const double got = AveragePrecision(order, truths, "cat", t);
        const double want = oracle::BruteForceAp(order, truths, "cat", t);
        if (got != want && v.pass) {
          v.Require(false, "instance " + std::to_string(instances) + ": " +
                               FormatDouble(got) + " vs oracle " + FormatDouble(want));
        }
      }
    }
  };
  std::function<void(size_t, size_t)> enum_preds = [&](size_t first, size_t remaining) {
    check();
    if (remaining == 0) return;
    for (size_t i = first; i < popts.size(); ++i) {
      const auto& o = popts[i];
      preds.push_back({images[o.image], "cat", confidences[o.conf], pred_boxes[o.box]});
      enum_preds(i, remaining - 1);
      preds.pop_back();
    }
  };
  std::function<void(size_t, size_t)> enum_truths = [&](size_t first, size_t remaining) {
    if (!truths.empty()) enum_preds(0, 4);
    if (remaining == 0) return;
    for (size_t i = first; i < topts.size(); ++i) {
      truths.push_back({images[topts[i].image], "cat", truth_boxes[topts[i].box]});
      enum_truths(i, remaining - 1);
      truths.pop_back();
    }
  };
  enum_truths(0, 3);

  const auto th = CocoIouThresholds();
  v.Require(th.size() == 10 && th.front() == 0.50 && th.back() == 0.95,
            "threshold list shape");
  for (size_t i = 0; i < th.size(); ++i) {
    v.Require(std::abs(th[i] - (0.50 + 0.05 * static_cast<double>(i))) < 1e-12,
              "threshold " + std::to_string(i));
  }
  const auto ft = LoadTruths(std::string(PERCEPT_TEST_FIXTURE_DIR) + "/two_class_truths.csv");
  const auto fp =
      LoadPredictions(std::string(PERCEPT_TEST_FIXTURE_DIR) + "/two_class_predictions.csv");
  double sum = 0.0;
  for (const double t : th) sum += MapAt(fp, ft, t);
  const double gap = std::abs(MapRange(fp, ft) - sum / 10.0);
  v.Require(gap <= 1e-12, "map_range identity gap " + FormatDouble(gap));
  if (v.pass) {
    v.detail = std::to_string(instances) + " instances exact; 10 thresholds; identity gap " +
               FormatDouble(gap);
  }
  return v;
}

// 6. OCR scoring and confusion recovery.
Verdict OcrScoring() {
  Verdict v;
  std::vector<OcrPair> pairs;
  for (int i = 0; i < 1000; ++i) {
    pairs.push_back({"49403.65", i < 55 ? "49403_65" : "49403.65"});
  }
  const auto r = Score(pairs, SampleKind::kNumbers);
  v.Require(r.mismatches == 55 && r.total == 1000, "counts");
  v.Require(FormatFixed(r.error_rate, 2) == "5.50", "rate " + FormatDouble(r.error_rate));

  const auto words = LoadWordList(DataPath("wordlist.txt"));
  const ConfusionTable table({{'l', 'i'}, {'h', 'n'}, {'f', 't'}, {'d', 'a'}, {'t', 'r'},
                              {'.', '_'}, {'7', '1'}});
  size_t injected_total = 0;
  for (const auto kind : {SampleKind::kAlphabets, SampleKind::kNumbers}) {
    const auto samples = GenerateSamples(kind, 500, 66, words);
    Rng rng(66);
    std::vector<OcrPair> corrupted;
    ConfusionCounts injected;
    for (const auto& s : samples) {
      const std::string out = ApplyConfusions(s.truth, table, 0.35, rng);
      for (size_t k = 0; k < out.size(); ++k) {
        if (out[k] != s.truth[k]) ++injected[{s.truth[k], out[k]}];
      }
      corrupted.push_back({s.truth, out});
    }
    for (const auto& [key, n] : injected) injected_total += n;
    v.Require(Score(corrupted, kind).confusions == injected,
              std::string("recovery mismatch on ") + std::string(ToString(kind)));
  }
  if (v.pass) {
    v.detail = "5.50%; " + std::to_string(injected_total) +
               " injected substitutions recovered over 1000 corruptions";
  }
  return v;
}

// 7. Routing matrix.
Verdict Routing() {
  Verdict v;
  const auto p = LoadEngineProfiles(DataPath("engine_profiles.csv"),
                                    DataPath("engine_confusions.csv"));
  auto check = [&](SampleKind k, Compute c, RoutePolicy pol, const std::string& want) {
    const std::string got = Route(k, c, pol, p);
    v.Require(got == want, std::string(ToString(k)) + "/" + std::string(ToString(c)) + "/" +
                               std::string(ToString(pol)) + " -> " + got);
  };
  check(SampleKind::kAlphabets, Compute::kCpu, RoutePolicy::kAccuracy, "tesseract");
  check(SampleKind::kNumbers, Compute::kCpu, RoutePolicy::kAccuracy, "easyocr");
  check(SampleKind::kAlphabets, Compute::kCpu, RoutePolicy::kSpeed, "tesseract");
  check(SampleKind::kAlphabets, Compute::kGpu, RoutePolicy::kSpeed, "easyocr");
  // The accuracy cells do not depend on compute, nor the speed cells on kind.
  check(SampleKind::kAlphabets, Compute::kGpu, RoutePolicy::kAccuracy, "tesseract");
  check(SampleKind::kNumbers, Compute::kGpu, RoutePolicy::kAccuracy, "easyocr");
  check(SampleKind::kNumbers, Compute::kCpu, RoutePolicy::kSpeed, "tesseract");
  check(SampleKind::kNumbers, Compute::kGpu, RoutePolicy::kSpeed, "easyocr");
  if (v.pass) v.detail = "alphabets->tesseract, numbers->easyocr, cpu->tesseract, gpu->easyocr";
  return v;
}

struct Bundled {
  Scenario scenario;
  PipelineConfig cfg;
};

Bundled LoadBundled() {
  return {Scenario::Load(DataPath("scenario_walkthrough.json")),
          PipelineConfig::Load(DataPath("pipeline_config.json"))};
}

// 8. End-to-end determinism and stage order.
Verdict Determinism() {
  Verdict v;
  const auto b = LoadBundled();
  constexpr std::uint64_t kSeed = 2026;
  const auto run = [&](bool parallel) {
    return Run(b.scenario, b.cfg, MakeBackends(b.cfg.perception, kSeed), kSeed,
               {parallel, false});
  };
  const auto first = run(false);
  const auto second = run(false);
  const auto threaded = run(true);
  v.Require(b.scenario.duration_s == 60.0, "scenario is not 60 s");
  v.Require(first.report.alerts_fired == 1,
            "alert cycles: " + std::to_string(first.report.alerts_fired));
  v.Require(first.report.ToJson() == second.report.ToJson() &&
                first.report.ToCsv() == second.report.ToCsv(),
            "report differs between runs");
  v.Require(first.transcript.Export() == second.transcript.Export(),
            "transcript differs between runs");
  v.Require(threaded.report.ToJson() == first.report.ToJson() &&
                threaded.transcript.Export() == first.transcript.Export(),
            "threaded perception differs from single-threaded");
  const auto& e = first.transcript.entries;
  v.Require(e.size() == 3, "transcript has " + std::to_string(e.size()) + " entries");
  if (e.size() == 3) {
    v.Require(e[0].priority == Priority::kAlert &&
                  e[0].text.find("Obstacle ahead") != std::string::npos,
              "first entry is not the alert");
    v.Require(e[1].text.find("EXIT") != std::string::npos, "second entry is not OCR");
    v.Require(e[2].text.rfind("I see ", 0) == 0, "third entry is not detection");
  }
  if (v.pass) v.detail = "2 runs + threaded run byte-identical; alert->OCR->detection";
  return v;
}

// 9. Latency budget on the virtual clock and host cost per cycle.
Verdict Budget() {
  Verdict v;
  const auto b = LoadBundled();
  const auto result = Run(b.scenario, b.cfg, MakeBackends(b.cfg.perception, 1), 1,
                          {false, true});
  const double mean = result.report.mean_end_to_end_s();
  v.Require(CheckBudget(result.report, {3.0, 5.0}), "mean cycle " + FormatDouble(mean) + " s");
  v.Require(!result.wall_cycle_s.empty(), "no cycle timed");
  double worst = 0.0;
  for (const double w : result.wall_cycle_s) worst = std::max(worst, w);
  v.Require(worst <= b.cfg.budget.mock_overhead_s,
            "host cycle " + FormatFixed(worst * 1e3, 3) + " ms");
  if (v.pass) {
    v.detail = "virtual mean " + FormatFixed(mean, 3) + " s within [3,5]; host cycle " +
               FormatFixed(worst * 1e3, 3) + " ms";
  }
  return v;
}

// 10. Alert invariants over random streams.
Verdict AlertProperties() {
  Verdict v;
  size_t readings = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const auto trial = oracle::RandomAlertTrial(seed * 7919 + 1);
    readings += trial.stream.size();
    const std::string problem = oracle::CheckAlertTrial(trial);
    if (!problem.empty()) {
      v.Require(false, "stream " + std::to_string(seed) + ": " + problem);
      break;
    }
  }
  if (v.pass) v.detail = "10000 streams, " + std::to_string(readings) + " readings";
  return v;
}

}  // namespace
}  // namespace percept

int main() {
  using percept::Verdict;
  struct Criterion {
    const char* name;
    Verdict (*run)();
  };
  const Criterion criteria[] = {
      {"AC1 sensor mean", percept::SensorMean},
      {"AC2 distance formula", percept::DistanceFormula},
      {"AC3 pareto frontier", percept::Pareto},
      {"AC4 iou grid oracle", percept::IouOracle},
      {"AC5 ap/map oracle", percept::ApOracle},
      {"AC6 ocr scoring", percept::OcrScoring},
      {"AC7 routing matrix", percept::Routing},
      {"AC8 end-to-end determinism", percept::Determinism},
      {"AC9 latency budget", percept::Budget},
      {"AC10 alert properties", percept::AlertProperties},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failures += v.pass ? 0 : 1;
    std::printf("[%s] %-28s %s\n", v.pass ? "PASS" : "FAIL", c.name, v.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures,
              std::size(criteria));
  return failures == 0 ? 0 : 1;
}
