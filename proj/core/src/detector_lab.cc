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
#include "percept/detector_lab.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include "percept/csv.hpp"
#include "percept/error.hpp"

namespace percept {

double Iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.Area() + b.Area() - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<RankedMatch> MatchPredictions(std::span<const Prediction> preds,
                                          std::span<const GroundTruth> truths,
                                          const std::string& label,
                                          double iou_threshold) {
  std::vector<size_t> order;
  for (size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].label == label) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (preds[a].confidence != preds[b].confidence) {
      return preds[a].confidence > preds[b].confidence;
    }
    return preds[a].image_id < preds[b].image_id;
  });

  std::vector<bool> taken(truths.size(), false);
  std::vector<RankedMatch> out;
  out.reserve(order.size());
  for (const size_t p : order) {
    RankedMatch m{p, false, std::nullopt};
    double best = -1.0;
    for (size_t t = 0; t < truths.size(); ++t) {
      if (taken[t] || truths[t].label != label ||
          truths[t].image_id != preds[p].image_id) {
        continue;
      }
      const double iou = Iou(preds[p].box, truths[t].box);
      if (iou >= iou_threshold && iou > best) {
        best = iou;
        m.matched_truth = t;
      }
    }
    if (m.matched_truth) {
      taken[*m.matched_truth] = true;
      m.true_positive = true;
    }
    out.push_back(m);
  }
  return out;
}

double InterpolatedAp(const std::vector<bool>& ranked_tp, size_t num_truths) {
  const size_t n = ranked_tp.size();
  std::vector<double> precision(n);
  size_t tp = 0;
  for (size_t k = 0; k < n; ++k) {
    tp += ranked_tp[k] ? 1 : 0;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
  }
  // Precision envelope: running max from the tail.
  for (size_t k = n; k-- > 1;) {
    precision[k - 1] = std::max(precision[k - 1], precision[k]);
  }
  double area = 0.0;
  for (size_t k = 0; k < n; ++k) {
    if (ranked_tp[k]) area += precision[k];
  }
  return area / static_cast<double>(num_truths);
}

double AveragePrecision(std::span<const Prediction> preds,
                        std::span<const GroundTruth> truths,
                        const std::string& label, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw ValidationError("iou threshold must be in (0,1), got " +
                          FormatDouble(iou_threshold));
  }
  const size_t num_truths = static_cast<size_t>(
      std::count_if(truths.begin(), truths.end(),
                    [&](const GroundTruth& g) { return g.label == label; }));
  if (num_truths == 0) {
    throw ValidationError("average precision undefined: no ground truth for '" +
                          label + "'");
  }
  const auto matches = MatchPredictions(preds, truths, label, iou_threshold);
  std::vector<bool> ranked_tp;
  ranked_tp.reserve(matches.size());
  for (const auto& m : matches) ranked_tp.push_back(m.true_positive);
  return InterpolatedAp(ranked_tp, num_truths);
}

double MapAt(std::span<const Prediction> preds,
             std::span<const GroundTruth> truths, double iou_threshold) {
  if (truths.empty()) {
    throw ValidationError("mAP undefined: empty ground-truth set");
  }
  std::set<std::string> labels;
  for (const auto& g : truths) labels.insert(g.label);
  double sum = 0.0;
  for (const auto& label : labels) {
    sum += AveragePrecision(preds, truths, label, iou_threshold);
  }
  return 100.0 * sum / static_cast<double>(labels.size());
}

std::array<double, kCocoThresholdCount> CocoIouThresholds() {
  std::array<double, kCocoThresholdCount> t{};
  for (size_t i = 0; i < t.size(); ++i) {
    t[i] = static_cast<double>(50 + 5 * i) / 100.0;
  }
  return t;
}

double MapRange(std::span<const Prediction> preds,
                std::span<const GroundTruth> truths) {
  double sum = 0.0;
  for (const double t : CocoIouThresholds()) sum += MapAt(preds, truths, t);
  return sum / static_cast<double>(kCocoThresholdCount);
}

namespace {

BoundingBox BoxFromFields(const std::vector<std::string>& f, size_t offset,
                          const std::string& where) {
  try {
    return BoundingBox::Checked(ParseDouble(f[offset], "x_min"),
                                ParseDouble(f[offset + 1], "y_min"),
                                ParseDouble(f[offset + 2], "x_max"),
                                ParseDouble(f[offset + 3], "y_max"));
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

std::string Where(std::string_view source, int line) {
  return std::string(source) + ":" + std::to_string(line);
}

std::string BoxFields(const BoundingBox& b) {
  return FormatDouble(b.x_min) + "," + FormatDouble(b.y_min) + "," +
         FormatDouble(b.x_max) + "," + FormatDouble(b.y_max);
}

}  // namespace

std::vector<GroundTruth> ParseTruths(std::string_view content,
                                     std::string_view source) {
  const CsvTable table = ParseCsv(content, /*has_header=*/false);
  std::vector<GroundTruth> out;
  for (const auto& row : table.rows) {
    const auto where = Where(source, row.line_number);
    if (row.fields.size() != 6) {
      throw ValidationError(where + ": truth records need 6 fields");
    }
    out.push_back({row.fields[0], row.fields[1],
                   BoxFromFields(row.fields, 2, where)});
  }
  return out;
}

std::vector<Prediction> ParsePredictions(std::string_view content,
                                         std::string_view source) {
  const CsvTable table = ParseCsv(content, /*has_header=*/false);
  std::vector<Prediction> out;
  for (const auto& row : table.rows) {
    const auto where = Where(source, row.line_number);
    if (row.fields.size() != 7) {
      throw ValidationError(where + ": prediction records need 7 fields");
    }
    const double c = ParseDouble(row.fields[2], "confidence");
    if (!(c >= 0.0 && c <= 1.0)) {
      throw ValidationError(where + ": confidence must be in [0,1]");
    }
    out.push_back({row.fields[0], row.fields[1], c,
                   BoxFromFields(row.fields, 3, where)});
  }
  return out;
}

std::vector<GroundTruth> LoadTruths(const std::filesystem::path& path) {
  return ParseTruths(ReadFile(path), path.string());
}

std::vector<Prediction> LoadPredictions(const std::filesystem::path& path) {
  return ParsePredictions(ReadFile(path), path.string());
}

std::string FormatTruths(std::span<const GroundTruth> truths) {
  std::string out;
  for (const auto& g : truths) {
    out += g.image_id + "," + g.label + "," + BoxFields(g.box) + "\n";
  }
  return out;
}

std::string FormatPredictions(std::span<const Prediction> preds) {
  std::string out;
  for (const auto& p : preds) {
    out += p.image_id + "," + p.label + "," + FormatDouble(p.confidence) + "," +
           BoxFields(p.box) + "\n";
  }
  return out;
}

void ModelSpec::Validate() const {
  if (!(gflops > 0.0) || !(mparams > 0.0)) {
    throw ValidationError("model '" + name + "': gflops and mparams must be > 0");
  }
  for (const auto& m : {map_50, map_50_95}) {
    if (m && !(*m >= 0.0 && *m <= 100.0)) {
      throw ValidationError("model '" + name + "': mAP must be in [0,100]");
    }
  }
}

std::optional<double> MetricOf(const ModelSpec& m, MapMetric metric) {
  return metric == MapMetric::kMap50 ? m.map_50 : m.map_50_95;
}

namespace {

std::optional<double> OptionalNumber(std::string_view text,
                                     std::string_view what) {
  text = Trim(text);
  if (text == "-" || text.empty()) return std::nullopt;
  if (text.ends_with('%')) text.remove_suffix(1);
  return ParseDouble(text, what);
}

std::string_view Get(const CsvTable& t, const CsvRow& row,
                     std::string_view column) {
  return row.fields[static_cast<size_t>(t.Column(column))];
}

}  // namespace

std::vector<ModelSpec> ParseModelTable(std::string_view content,
                                       std::string_view source) {
  const CsvTable table = ParseCsv(content);
  const bool single_map = table.Column("map") >= 0;
  const bool dual_map = table.Column("map50") >= 0 && table.Column("map5095") >= 0;
  for (const auto* col : {"name", "gflops", "mparams"}) {
    if (table.Column(col) < 0) {
      throw ValidationError(std::string(source) + ": missing column '" + col +
                            "'");
    }
  }
  if (single_map == dual_map) {
    throw ValidationError(std::string(source) +
                          ": expected either a 'map' column or 'map50,map5095'");
  }

  std::vector<ModelSpec> out;
  for (const auto& row : table.rows) {
    const auto where = Where(source, row.line_number);
    if (row.fields.size() != table.header.size()) {
      throw ValidationError(where + ": wrong field count");
    }
    try {
      ModelSpec m;
      m.name = std::string(Get(table, row, "name"));
      if (table.Column("framework") >= 0) {
        m.framework = std::string(Get(table, row, "framework"));
      }
      m.gflops = ParseDouble(Get(table, row, "gflops"), "gflops");
      m.mparams = ParseDouble(Get(table, row, "mparams"), "mparams");
      if (single_map) {
        m.map_50 = OptionalNumber(Get(table, row, "map"), "map");
      } else {
        m.map_50 = OptionalNumber(Get(table, row, "map50"), "map50");
        m.map_50_95 = OptionalNumber(Get(table, row, "map5095"), "map5095");
      }
      if (table.Column("input_size") >= 0) {
        if (auto s = OptionalNumber(Get(table, row, "input_size"), "input_size")) {
          m.input_size = static_cast<int>(*s);
        }
      }
      if (table.Column("size_mb") >= 0) {
        m.size_mb = OptionalNumber(Get(table, row, "size_mb"), "size_mb");
      }
      m.Validate();
      out.push_back(std::move(m));
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }

  std::map<std::string, int> counts;
  for (const auto& m : out) ++counts[m.name];
  for (auto& m : out) {
    if (counts[m.name] > 1 && m.input_size) {
      m.name += "@" + std::to_string(*m.input_size);
    }
  }
  std::set<std::string> seen;
  for (const auto& m : out) {
    if (!seen.insert(m.name).second) {
      throw ValidationError(std::string(source) + ": duplicate model name '" +
                            m.name + "'");
    }
  }
  return out;
}

std::vector<ModelSpec> LoadModelTable(const std::filesystem::path& path) {
  return ParseModelTable(ReadFile(path), path.string());
}

std::vector<PlatformLatency> LoadPlatformLatency(
    const std::filesystem::path& path) {
  const CsvTable table = ReadCsv(path);
  constexpr size_t kFixed = 5;
  const std::array<std::string_view, kFixed> fixed = {
      "equipment", "computing_backend", "system", "input_size", "framework"};
  if (table.header.size() <= kFixed ||
      !std::equal(fixed.begin(), fixed.end(), table.header.begin())) {
    throw ValidationError(path.string() +
                          ": expected equipment,computing_backend,system,"
                          "input_size,framework,<model>...");
  }
  std::vector<PlatformLatency> out;
  for (const auto& row : table.rows) {
    const auto where = Where(path.string(), row.line_number);
    if (row.fields.size() != table.header.size()) {
      throw ValidationError(where + ": wrong field count");
    }
    PlatformLatency p;
    p.equipment = row.fields[0];
    p.computing_backend = row.fields[1];
    p.system = row.fields[2];
    p.input_size = static_cast<int>(ParseInt(row.fields[3], "input_size"));
    p.framework = row.fields[4];
    for (size_t i = kFixed; i < row.fields.size(); ++i) {
      const double ms = ParseDouble(row.fields[i], table.header[i]);
      if (!(ms > 0.0)) throw ValidationError(where + ": latency must be > 0");
      p.latency_ms[table.header[i]] = ms;
    }
    out.push_back(std::move(p));
  }
  return out;
}

bool Dominates(const ModelSpec& a, const ModelSpec& b, MapMetric metric) {
  const auto ma = MetricOf(a, metric);
  const auto mb = MetricOf(b, metric);
  if (!ma || !mb) return false;
  const bool no_worse = a.gflops <= b.gflops && *ma >= *mb;
  const bool strictly = a.gflops < b.gflops || *ma > *mb;
  return no_worse && strictly;
}

namespace {

std::vector<ModelSpec> Eligible(std::span<const ModelSpec> models,
                                MapMetric metric,
                                std::vector<std::string>* excluded) {
  std::vector<ModelSpec> out;
  for (const auto& m : models) {
    if (MetricOf(m, metric)) {
      out.push_back(m);
    } else if (excluded != nullptr) {
      excluded->push_back(m.name);
    }
  }
  return out;
}

}  // namespace

FrontierResult ParetoFrontier(std::span<const ModelSpec> models,
                              MapMetric metric) {
  FrontierResult result;
  const auto eligible = Eligible(models, metric, &result.excluded);
  if (eligible.empty()) {
    throw ValidationError("pareto frontier: no model carries the selected mAP");
  }
  for (const auto& candidate : eligible) {
    const bool dominated = std::any_of(
        eligible.begin(), eligible.end(),
        [&](const ModelSpec& other) { return Dominates(other, candidate, metric); });
    if (!dominated) result.frontier.push_back(candidate);
  }
  std::sort(result.frontier.begin(), result.frontier.end(),
            [](const ModelSpec& a, const ModelSpec& b) {
              if (a.gflops != b.gflops) return a.gflops < b.gflops;
              return a.name < b.name;
            });
  return result;
}

ModelSpec Recommend(std::span<const ModelSpec> models, double gflops_budget,
                    MapMetric metric) {
  const auto eligible = Eligible(models, metric, nullptr);
  if (eligible.empty()) {
    throw ValidationError("recommend: no model carries the selected mAP");
  }
  const ModelSpec* best = nullptr;
  for (const auto& m : eligible) {
    if (m.gflops > gflops_budget) continue;
    if (best == nullptr) {
      best = &m;
      continue;
    }
    const double mm = *MetricOf(m, metric);
    const double bm = *MetricOf(*best, metric);
    if (mm > bm || (mm == bm && (m.gflops < best->gflops ||
                                 (m.gflops == best->gflops && m.name < best->name)))) {
      best = &m;
    }
  }
  if (best == nullptr) {
    const auto cheapest = std::min_element(
        eligible.begin(), eligible.end(), [](const ModelSpec& a, const ModelSpec& b) {
          return a.gflops != b.gflops ? a.gflops < b.gflops : a.name < b.name;
        });
    throw ValidationError("no model within " + FormatDouble(gflops_budget) +
                          " GFLOPs; cheapest is '" + cheapest->name + "' at " +
                          FormatDouble(cheapest->gflops) + " GFLOPs");
  }
  return *best;
}

}  // namespace percept
