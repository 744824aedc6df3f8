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
#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <vector>

#include "percept/csv.hpp"
#include "percept/data_paths.hpp"
#include "percept/detector_lab.hpp"
#include "percept/error.hpp"
#include "percept/ocr_lab.hpp"
#include "percept/pipeline.hpp"
#include "percept/sensor_model.hpp"

namespace percept::cli {
namespace {

// Flags every subcommand accepts.
struct CommonFlags {
  std::uint64_t seed = 0;
  std::string config;
  std::string out = "-";
  bool pretty = false;
  bool verbose = false;
};

void AddCommon(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--seed", f.seed, "Seed for every random stream")
      ->capture_default_str();
  sub->add_option("--config", f.config, "Pipeline config file (JSON)");
  sub->add_option("--out", f.out, "Output file, '-' for standard output")
      ->capture_default_str();
  sub->add_flag("--pretty", f.pretty, "Human-readable tables instead of CSV/JSON");
  sub->add_flag("--verbose", f.verbose, "Progress and host timings on stderr");
}

class Context {
 public:
  Context(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  std::ostream& err() { return err_; }

  // Writes `text` to `dest` ("-" = standard output).
  void Emit(const std::string& dest, const std::string& text) {
    if (dest == "-" || dest.empty()) {
      out_ << text;
      return;
    }
    std::ofstream file(dest, std::ios::binary);
    if (!file) throw ValidationError("cannot write output file: " + dest);
    file << text;
  }

 private:
  std::ostream& out_;
  std::ostream& err_;
};

PipelineConfig LoadConfig(const CommonFlags& f) {
  return f.config.empty() ? PipelineConfig{} : PipelineConfig::Load(f.config);
}

std::string PathOr(const std::string& given, std::string_view bundled) {
  return given.empty() ? DataPath(bundled).string() : given;
}

MapMetric ParseMetric(const std::string& text) {
  if (text == "map50") return MapMetric::kMap50;
  if (text == "map5095") return MapMetric::kMap50To95;
  throw ValidationError("unknown metric '" + text + "' (expected map50|map5095)");
}

std::string PadRight(std::string s, size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string ModelRow(const ModelSpec& m, MapMetric metric) {
  const auto v = MetricOf(m, metric);
  return m.name + "," + FormatDouble(m.gflops) + "," + FormatDouble(m.mparams) +
         "," + (v ? FormatDouble(*v) : "-") + "\n";
}

// ---- run -------------------------------------------------------------------

struct RunArgs {
  CommonFlags common;
  std::string scenario;
  std::string format = "json";
  std::string transcript;
  std::string log;
  bool parallel = false;
};

void DoRun(Context& ctx, const RunArgs& a) {
  const Scenario scenario = Scenario::Load(a.scenario);
  const PipelineConfig cfg = LoadConfig(a.common);
  const Backends backends = MakeBackends(cfg.perception, a.common.seed);
  RunOptions options;
  options.parallel_perception = a.parallel;
  options.measure_wall = a.common.verbose;
  const auto result = Run(scenario, cfg, backends, a.common.seed, options);

  std::string report;
  if (a.common.pretty) {
    std::ostringstream s;
    s << "scenario " << result.report.scenario << ": " << result.report.alerts_fired
      << " alert cycle(s), mean end-to-end "
      << FormatFixed(result.report.mean_end_to_end_s(), 3) << " s, budget "
      << (result.report.budget_pass ? "PASS" : "FAIL") << "\n";
    for (size_t i = 0; i < kStageCount; ++i) {
      const auto& st = result.report.stages[i];
      s << "  " << PadRight(std::string(ToString(static_cast<Stage>(i))), 8)
        << " n=" << PadRight(std::to_string(st.count), 6)
        << " mean=" << FormatFixed(st.mean_s(), 4) << " s"
        << "  max=" << FormatFixed(st.max_s, 4) << " s\n";
    }
    report = s.str();
  } else if (a.format == "csv") {
    report = result.report.ToCsv();
  } else if (a.format == "json") {
    report = result.report.ToJson();
  } else {
    throw ValidationError("unknown --format '" + a.format + "' (json|csv)");
  }
  ctx.Emit(a.common.out, report);
  if (!a.transcript.empty()) ctx.Emit(a.transcript, result.transcript.Export());
  if (!a.log.empty()) {
    std::string text;
    for (const auto& line : result.log) text += line + "\n";
    ctx.Emit(a.log, text);
  }
  if (a.common.verbose) {
    for (size_t i = 0; i < result.wall_cycle_s.size(); ++i) {
      ctx.err() << "cycle " << i << ": host time "
                << FormatFixed(result.wall_cycle_s[i] * 1e3, 3) << " ms\n";
    }
  }
}

// ---- sensor-bench ------------------------------------------------------------

struct SensorBenchArgs {
  CommonFlags common;
  std::string data;
  bool simulate = false;
  bool fit = false;
};

void DoSensorBench(Context& ctx, const SensorBenchArgs& a) {
  auto samples = LoadSensorTimings(PathOr(a.data, "fig6_sensor_timings.csv"));
  if (samples.empty()) throw ValidationError("sensor bench: no samples");
  const PipelineConfig cfg = LoadConfig(a.common);
  if (a.simulate) {
    Rng rng(a.common.seed);
    for (auto& s : samples) {
      s.exec_time_s = SimulateMeasurement(s.distance_cm, cfg.sensor, rng).exec_time_s;
    }
  }
  std::string text;
  if (a.common.pretty) {
    std::ostringstream s;
    s << "distance (cm)   time to execute (s)\n";
    for (const auto& x : samples) {
      s << PadRight(FormatDouble(x.distance_cm), 16) << FormatDouble(x.exec_time_s)
        << "\n";
    }
    std::vector<double> t;
    for (const auto& x : samples) t.push_back(x.exec_time_s);
    s << "average response time: "
      << FormatDouble(MeanResponseTime(std::span<const double>(t))) << " s\n";
    text = s.str();
  } else {
    text = FormatSensorBench(samples);
  }
  if (a.fit) {
    const auto fit = FitLatencyModel(samples, cfg.sensor.speed_of_sound_mps);
    text += "fit_overhead_base_s," + FormatDouble(fit.overhead_base_s) + "\n";
    text += "fit_overhead_per_cm_s," + FormatDouble(fit.overhead_per_cm_s) + "\n";
    text += "fit_residual_std_s," + FormatDouble(fit.residual_std_s) + "\n";
  }
  ctx.Emit(a.common.out, text);
}

// ---- models-* ----------------------------------------------------------------

struct ModelsArgs {
  CommonFlags common;
  std::string table;
  std::string metric = "map50";
  std::string format = "names";
  double budget = 0.0;
};

void DoModelsPareto(Context& ctx, const ModelsArgs& a) {
  const auto models = LoadModelTable(PathOr(a.table, "fig8_models.csv"));
  const MapMetric metric = ParseMetric(a.metric);
  const auto result = ParetoFrontier(models, metric);
  if (!result.excluded.empty()) {
    ctx.err() << "excluded (no " << a.metric << "):";
    for (const auto& name : result.excluded) ctx.err() << " " << name;
    ctx.err() << "\n";
  }
  std::string text;
  if (a.format == "csv") {
    text = "name,gflops,mparams," + a.metric + "\n";
    for (const auto& m : result.frontier) text += ModelRow(m, metric);
  } else if (a.format == "names") {
    for (const auto& m : result.frontier) text += m.name + "\n";
  } else {
    throw ValidationError("unknown --format '" + a.format + "' (names|csv)");
  }
  ctx.Emit(a.common.out, text);
}

void DoModelsRecommend(Context& ctx, const ModelsArgs& a) {
  const auto models = LoadModelTable(PathOr(a.table, "fig8_models.csv"));
  const MapMetric metric = ParseMetric(a.metric);
  const ModelSpec pick = Recommend(models, a.budget, metric);
  ctx.Emit(a.common.out, a.format == "csv"
                             ? "name,gflops,mparams," + a.metric + "\n" +
                                   ModelRow(pick, metric)
                             : pick.name + "\n");
}

struct EvalArgs {
  CommonFlags common;
  std::string truth;
  std::string pred;
  double iou = 0.5;
};

void DoModelsEval(Context& ctx, const EvalArgs& a) {
  const auto truths = LoadTruths(a.truth);
  const auto preds = LoadPredictions(a.pred);
  std::vector<std::string> labels;
  for (const auto& g : truths) labels.push_back(g.label);
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

  std::string text = "{\n  \"iou_threshold\": " + FormatDouble(a.iou) + ",\n";
  text += "  \"map_at\": " + FormatDouble(MapAt(preds, truths, a.iou)) + ",\n";
  text += "  \"map_range\": " + FormatDouble(MapRange(preds, truths)) + ",\n";
  text += "  \"per_label_ap\": {";
  for (size_t i = 0; i < labels.size(); ++i) {
    text += (i ? ", " : "") + std::string("\"") + labels[i] + "\": " +
            FormatDouble(AveragePrecision(preds, truths, labels[i], a.iou));
  }
  text += "}\n}\n";
  ctx.Emit(a.common.out, text);
}

// ---- ocr-* -------------------------------------------------------------------

struct OcrArgs {
  CommonFlags common;
  std::string kind = "alphabets";
  size_t n = 1000;
  std::string words;
  std::string pairs;
  bool cer = false;
  std::string format = "json";
  std::string compute = "cpu";
  std::string policy = "accuracy";
  std::string profiles;
  std::string confusions;
  std::string engine = "tesseract";
  std::optional<double> rate;
  std::optional<double> target_error;
  bool wall_clock = false;
};

std::vector<EngineProfile> Profiles(const OcrArgs& a) {
  return LoadEngineProfiles(PathOr(a.profiles, "engine_profiles.csv"),
                            PathOr(a.confusions, "engine_confusions.csv"));
}

std::string RenderReport(const OcrReport& r, const std::string& format) {
  if (format == "json") return ReportToJson(r);
  if (format == "csv") return ReportToCsv(r);
  throw ValidationError("unknown --format '" + format + "' (json|csv)");
}

void DoOcrGen(Context& ctx, const OcrArgs& a) {
  const auto words = LoadWordList(PathOr(a.words, "wordlist.txt"));
  const auto samples = GenerateSamples(ParseSampleKind(a.kind), a.n, a.common.seed, words);
  std::string text = "sample_id,kind,truth\n";
  for (const auto& s : samples) {
    text += s.sample_id + "," + std::string(ToString(s.kind)) + "," + s.truth + "\n";
  }
  ctx.Emit(a.common.out, text);
}

void DoOcrScore(Context& ctx, const OcrArgs& a) {
  if (a.pairs.empty()) throw ValidationError("ocr-score: --pairs is required");
  const auto pairs = ParsePairs(ReadFile(a.pairs), a.pairs);
  const auto report = Score(pairs, ParseSampleKind(a.kind),
                            a.cer ? ScoreMode::kCharacter : ScoreMode::kSample);
  ctx.Emit(a.common.out, RenderReport(report, a.format));
}

void DoOcrRoute(Context& ctx, const OcrArgs& a) {
  const auto profiles = Profiles(a);
  ctx.Emit(a.common.out,
           Route(ParseSampleKind(a.kind), ParseCompute(a.compute),
                 ParseRoutePolicy(a.policy), profiles) +
               "\n");
}

void DoOcrBench(Context& ctx, const OcrArgs& a) {
  const auto profiles = Profiles(a);
  std::string engine = a.engine;
  if (engine.starts_with("mock-")) engine = engine.substr(5);
  const EngineProfile& profile = FindProfile(profiles, engine);
  const SampleKind kind = ParseSampleKind(a.kind);
  const Compute compute = ParseCompute(a.compute);
  const auto words = LoadWordList(PathOr(a.words, "wordlist.txt"));

  double rate = 0.0;
  if (a.rate) {
    rate = *a.rate;
  } else {
    const auto samples = GenerateSamples(kind, a.n, a.common.seed, words);
    const double target = a.target_error.value_or(profile.ErrorRate(kind));
    rate = CalibrateSubstitutionRate(target, samples,
                                     ConfusionTable(profile.confusion_rules));
  }
  if (a.common.verbose) {
    ctx.err() << "engine mock-" << profile.engine_id << " substitution rate "
              << FormatDouble(rate) << "\n";
  }
  const MockOcr backend = MakeProfileOcr(profile, compute, rate, a.common.seed);
  const auto report =
      RunBenchmark(kind, a.n, backend, a.common.seed, words,
                   a.wall_clock ? BenchClock::kWall : BenchClock::kVirtual);
  ctx.Emit(a.common.out, RenderReport(report, a.format));
}

int Classify(std::ostream& err, const std::exception& e, int code) {
  err << "error: " << e.what() << "\n";
  return code;
}

}  // namespace

int Dispatch(std::span<const std::string> args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Assistive perception pipeline runtime and evaluation lab",
               "percept_cane"};
  app.require_subcommand(1);
  app.fallthrough(false);

  Context ctx(out, err);
  std::function<void()> action;

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Replay a scenario through the pipeline");
  AddCommon(run_cmd, run.common);
  run_cmd->add_option("scenario", run.scenario, "Scenario file (JSON)")->required();
  run_cmd->add_option("--format", run.format, "Report format: json|csv")
      ->capture_default_str();
  run_cmd->add_option("--transcript", run.transcript,
                      "Write the spoken transcript here ('-' for stdout)");
  run_cmd->add_option("--log", run.log, "Write the device log here ('-' for stdout)");
  run_cmd->add_flag("--parallel", run.parallel,
                    "Run OCR and detection on worker threads");
  run_cmd->callback([&] { action = [&] { DoRun(ctx, run); }; });

  SensorBenchArgs sb;
  auto* sb_cmd = app.add_subcommand("sensor-bench",
                                    "Tabulate ranging exec times and their mean");
  AddCommon(sb_cmd, sb.common);
  sb_cmd->add_option("--data", sb.data,
                     "distance_cm,exec_time_s CSV (default: bundled table)");
  sb_cmd->add_flag("--simulate", sb.simulate,
                   "Replace exec times with simulated ones at the same distances");
  sb_cmd->add_flag("--fit", sb.fit, "Append the least-squares latency fit");
  sb_cmd->callback([&] { action = [&] { DoSensorBench(ctx, sb); }; });

  ModelsArgs pareto;
  auto* pareto_cmd = app.add_subcommand(
      "models-pareto", "Models not dominated on (GFLOPs, mAP)");
  AddCommon(pareto_cmd, pareto.common);
  pareto_cmd->add_option("--table", pareto.table, "Model table CSV");
  pareto_cmd->add_option("--metric", pareto.metric, "map50|map5095")
      ->capture_default_str();
  pareto_cmd->add_option("--format", pareto.format, "names|csv")
      ->capture_default_str();
  pareto_cmd->callback([&] { action = [&] { DoModelsPareto(ctx, pareto); }; });

  ModelsArgs rec;
  auto* rec_cmd = app.add_subcommand("models-recommend",
                                     "Best mAP within a GFLOPs budget");
  AddCommon(rec_cmd, rec.common);
  rec_cmd->add_option("--table", rec.table, "Model table CSV");
  rec_cmd->add_option("--budget", rec.budget, "GFLOPs budget")->required();
  rec_cmd->add_option("--metric", rec.metric, "map50|map5095")->capture_default_str();
  rec_cmd->add_option("--format", rec.format, "names|csv")->capture_default_str();
  rec_cmd->callback([&] { action = [&] { DoModelsRecommend(ctx, rec); }; });

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("models-eval",
                                      "AP / mAP of predictions against truths");
  AddCommon(eval_cmd, eval.common);
  eval_cmd->add_option("--truth", eval.truth, "Truth records")->required();
  eval_cmd->add_option("--pred", eval.pred, "Prediction records")->required();
  eval_cmd->add_option("--iou", eval.iou, "IoU threshold for map_at")
      ->capture_default_str();
  eval_cmd->callback([&] { action = [&] { DoModelsEval(ctx, eval); }; });

  OcrArgs gen;
  auto* gen_cmd = app.add_subcommand("ocr-gen", "Generate OCR benchmark strings");
  AddCommon(gen_cmd, gen.common);
  gen_cmd->add_option("--kind", gen.kind, "alphabets|numbers")->capture_default_str();
  gen_cmd->add_option("--n", gen.n, "Sample count")->capture_default_str();
  gen_cmd->add_option("--words", gen.words, "Word list (default: bundled)");
  gen_cmd->callback([&] { action = [&] { DoOcrGen(ctx, gen); }; });

  OcrArgs score;
  auto* score_cmd = app.add_subcommand("ocr-score", "Score OCR outputs against truth");
  AddCommon(score_cmd, score.common);
  score_cmd->add_option("--pairs", score.pairs, "truth<TAB>output lines")->required();
  score_cmd->add_option("--kind", score.kind, "alphabets|numbers")->capture_default_str();
  score_cmd->add_flag("--cer", score.cer, "Character error rate instead of sample rate");
  score_cmd->add_option("--format", score.format, "json|csv")->capture_default_str();
  score_cmd->callback([&] { action = [&] { DoOcrScore(ctx, score); }; });

  OcrArgs route;
  auto* route_cmd = app.add_subcommand("ocr-route", "Pick an OCR engine");
  AddCommon(route_cmd, route.common);
  route_cmd->add_option("--kind", route.kind, "alphabets|numbers")->capture_default_str();
  route_cmd->add_option("--compute", route.compute, "cpu|gpu")->capture_default_str();
  route_cmd->add_option("--policy", route.policy, "accuracy|speed")->capture_default_str();
  route_cmd->add_option("--profiles", route.profiles, "Engine profile CSV");
  route_cmd->add_option("--confusions", route.confusions, "Engine confusion rules CSV");
  route_cmd->callback([&] { action = [&] { DoOcrRoute(ctx, route); }; });

  OcrArgs bench;
  auto* bench_cmd = app.add_subcommand("ocr-bench",
                                       "Benchmark a mock OCR engine on generated samples");
  AddCommon(bench_cmd, bench.common);
  bench_cmd->add_option("--kind", bench.kind, "alphabets|numbers")->capture_default_str();
  bench_cmd->add_option("--n", bench.n, "Sample count")->capture_default_str();
  bench_cmd->add_option("--engine", bench.engine, "tesseract|easyocr")
      ->capture_default_str();
  bench_cmd->add_option("--compute", bench.compute, "cpu|gpu")->capture_default_str();
  bench_cmd->add_option("--rate", bench.rate, "Per-character substitution rate");
  bench_cmd->add_option("--target-error", bench.target_error,
                        "Calibrate the rate to this sample error percent "
                        "(default: the engine profile's rate)");
  bench_cmd->add_option("--words", bench.words, "Word list (default: bundled)");
  bench_cmd->add_option("--profiles", bench.profiles, "Engine profile CSV");
  bench_cmd->add_option("--confusions", bench.confusions, "Engine confusion rules CSV");
  bench_cmd->add_flag("--wall-clock", bench.wall_clock,
                      "Report measured host time instead of modeled speed");
  bench_cmd->add_option("--format", bench.format, "json|csv")->capture_default_str();
  bench_cmd->callback([&] { action = [&] { DoOcrBench(ctx, bench); }; });

  std::vector<const char*> argv;
  argv.push_back("percept_cane");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kExitValidation;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const ValidationError& e) {
    return Classify(err, e, kExitValidation);
  } catch (const std::exception& e) {
    return Classify(err, e, kExitRuntime);
  }
}

}  // namespace percept::cli
