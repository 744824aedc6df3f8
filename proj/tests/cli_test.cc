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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "percept/csv.hpp"
#include "percept/data_paths.hpp"

namespace percept::cli {
namespace {

const std::string kFixtures = PERCEPT_TEST_FIXTURE_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome Call(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = Dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path TempDir() {
  auto dir = std::filesystem::temp_directory_path() /
             ("percept_cli_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

TEST(Cli, ParetoOnFirstTable) {
  const auto r = Call({"models-pareto", "--table", DataPath("fig8_models.csv").string()});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "mobilenet-ssd\n");
}

TEST(Cli, ParetoReportsExcludedRows) {
  const auto r = Call({"models-pareto", "--table", DataPath("fig10_models.csv").string()});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "yolo-fastest\nyolo-fastest-xl\nyolov5-lite@320\nyolov5-lite@640\nyolov5s\n");
  EXPECT_NE(r.err.find("nanodet-m@320"), std::string::npos);
}

TEST(Cli, Recommend) {
  EXPECT_EQ(Call({"models-recommend", "--budget", "3"}).out, "mobilenet-ssd\n");
  const auto r = Call({"models-recommend", "--budget", "0.1"});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("mobilenet-ssd"), std::string::npos);
}

TEST(Cli, RouteAlphabetsOnCpu) {
  const auto r = Call({"ocr-route", "--kind", "alphabets", "--compute", "cpu", "--policy",
                       "accuracy"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "tesseract\n");
  EXPECT_EQ(Call({"ocr-route", "--kind", "numbers", "--compute", "gpu", "--policy",
                  "speed"}).out,
            "easyocr\n");
}

TEST(Cli, MissingScenarioIsValidationError) {
  const auto r = Call({"run", "missing.json"});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("missing.json"), std::string::npos);
}

TEST(Cli, UnknownSubcommandAndFlag) {
  EXPECT_EQ(Call({"fly"}).code, kExitValidation);
  EXPECT_EQ(Call({}).code, kExitValidation);
  const auto r = Call({"sensor-bench", "--bogus"});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(Call({"ocr-route", "--kind", "letters"}).code, kExitValidation);
}

TEST(Cli, SensorBenchPrintsMean) {
  const auto r = Call({"sensor-bench"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("\nmean,0.007137478\n"), std::string::npos) << r.out;
  const auto fit = Call({"sensor-bench", "--fit"});
  EXPECT_NE(fit.out.find("fit_overhead_base_s,"), std::string::npos);
}

TEST(Cli, EverySubcommandHasHelp) {
  for (const char* sub : {"run", "sensor-bench", "models-pareto", "models-recommend",
                          "models-eval", "ocr-gen", "ocr-score", "ocr-route", "ocr-bench"}) {
    const auto r = Call({sub, "--help"});
    EXPECT_EQ(r.code, kExitOk) << sub;
    for (const char* flag : {"--seed", "--config", "--out", "--pretty", "--verbose"}) {
      EXPECT_NE(r.out.find(flag), std::string::npos) << sub << " " << flag;
    }
  }
  EXPECT_EQ(Call({"--help"}).code, kExitOk);
}

TEST(Cli, OutputIsReproducible) {
  const std::vector<std::string> args{"ocr-gen", "--kind", "numbers", "--n", "50",
                                      "--seed", "4"};
  const auto a = Call(args);
  EXPECT_EQ(a.code, kExitOk);
  EXPECT_EQ(a.out, Call(args).out);
  EXPECT_EQ(a.out.rfind("sample_id,kind,truth\nnum-000000,numbers,", 0), 0u);

  const std::string scenario = DataPath("scenario_walkthrough.json").string();
  const auto run1 = Call({"run", scenario, "--transcript", "-"});
  const auto run2 = Call({"run", scenario, "--transcript", "-"});
  EXPECT_EQ(run1.code, kExitOk) << run1.err;
  EXPECT_EQ(run1.out, run2.out);
  EXPECT_NE(run1.out.find("Text reads EXIT"), std::string::npos);
}

TEST(Cli, OutWritesFile) {
  const auto path = TempDir() / "pareto.txt";
  const auto r = Call({"models-pareto", "--out", path.string()});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(ReadFile(path), "mobilenet-ssd\n");
}

TEST(Cli, RunFormats) {
  const std::string scenario = DataPath("scenario_walkthrough.json").string();
  const auto csv = Call({"run", scenario, "--format", "csv"});
  EXPECT_EQ(csv.out.rfind("stage,count,mean_s,max_s\n", 0), 0u);
  const auto json = Call({"run", scenario, "--config",
                          DataPath("pipeline_config.json").string()});
  EXPECT_NE(json.out.find("\"budget_pass\": true"), std::string::npos);
  EXPECT_EQ(Call({"run", scenario, "--format", "xml"}).code, kExitValidation);
  const auto log_path = TempDir() / "run.log";
  EXPECT_EQ(Call({"run", scenario, "--log", log_path.string()}).code, kExitOk);
  EXPECT_NE(ReadFile(log_path).find("Measure Distance = 85.0 cm"), std::string::npos);
}

TEST(Cli, ModelsEvalJson) {
  const auto r = Call({"models-eval", "--truth", kFixtures + "/two_class_truths.csv",
                       "--pred", kFixtures + "/two_class_predictions.csv"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  for (const char* key : {"\"map_at\"", "\"map_range\"", "\"per_label_ap\"", "\"car\""}) {
    EXPECT_NE(r.out.find(key), std::string::npos) << key;
  }
}

TEST(Cli, OcrScoreAndBench) {
  const auto pairs = TempDir() / "pairs.tsv";
  {
    std::ofstream f(pairs);
    f << "text\trexr\nhello\thello\n";
  }
  const auto r = Call({"ocr-score", "--pairs", pairs.string(), "--format", "csv"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("alphabets,sample,2,1,50.00,"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("t,r,2"), std::string::npos);
  const auto cer = Call({"ocr-score", "--pairs", pairs.string(), "--cer", "--format", "csv"});
  EXPECT_NE(cer.out.find("alphabets,character,9,2,22.22,"), std::string::npos) << cer.out;

  const auto bench = Call({"ocr-bench", "--kind", "alphabets", "--n", "1000", "--engine",
                           "tesseract", "--compute", "cpu"});
  EXPECT_EQ(bench.code, kExitOk) << bench.err;
  EXPECT_NE(bench.out.find("\"mean_speed_s\": 0.3"), std::string::npos) << bench.out;
  const auto zero = Call({"ocr-bench", "--n", "100", "--rate", "0", "--format", "csv"});
  EXPECT_NE(zero.out.find(",100,0,0.00,"), std::string::npos) << zero.out;
}

TEST(Cli, DataDirectoryOverride) {
  const auto dir = TempDir() / "data";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "fig6_sensor_timings.csv");
    f << "distance_cm,exec_time_s\n10,0.002\n20,0.004\n";
  }
  const char* old = std::getenv("PERCEPT_CANE_DATA");
  const std::string saved = old ? old : "";
  ::setenv("PERCEPT_CANE_DATA", dir.c_str(), 1);
  const auto r = Call({"sensor-bench"});
  if (old) {
    ::setenv("PERCEPT_CANE_DATA", saved.c_str(), 1);
  } else {
    ::unsetenv("PERCEPT_CANE_DATA");
  }
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("\nmean,0.003\n"), std::string::npos) << r.out;
}

}  // namespace
}  // namespace percept::cli
