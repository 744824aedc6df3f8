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
#include "oracles.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <random>

namespace percept::oracle {

double GridIou(const BoundingBox& a, const BoundingBox& b, int side) {
  // Cell membership is a product of per-axis tests, so each count is a
  // product of per-axis counts.
  auto count = [side](double lo, double hi, double lo2, double hi2) {
    long n = 0;
    for (int i = 0; i < side; ++i) {
      const double c = (i + 0.5) / side;
      n += (c >= lo && c <= hi && c >= lo2 && c <= hi2) ? 1 : 0;
    }
    return n;
  };
  const long area_a = count(a.x_min, a.x_max, 0, 1) * count(a.y_min, a.y_max, 0, 1);
  const long area_b = count(b.x_min, b.x_max, 0, 1) * count(b.y_min, b.y_max, 0, 1);
  const long both = count(a.x_min, a.x_max, b.x_min, b.x_max) *
                    count(a.y_min, a.y_max, b.y_min, b.y_max);
  const long either = area_a + area_b - both;
  return either == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(either);
}

namespace {

// Rank order: descending confidence, then ascending image id, then input
// position. Written as an explicit insertion sort.
std::vector<size_t> RankOf(const std::vector<Prediction>& preds,
                           const std::string& label) {
  std::vector<size_t> ranked;
  for (size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].label != label) continue;
    size_t pos = ranked.size();
    while (pos > 0) {
      const Prediction& prev = preds[ranked[pos - 1]];
      const Prediction& cur = preds[i];
      const bool before = cur.confidence > prev.confidence ||
                          (cur.confidence == prev.confidence &&
                           cur.image_id < prev.image_id);
      if (!before) break;
      --pos;
    }
    ranked.insert(ranked.begin() + static_cast<std::ptrdiff_t>(pos), i);
  }
  return ranked;
}

}  // namespace

std::vector<bool> BruteForceTpFlags(const std::vector<Prediction>& preds,
                                    const std::vector<GroundTruth>& truths,
                                    const std::string& label, double threshold) {
  const std::vector<size_t> ranked = RankOf(preds, label);
  const size_t n = ranked.size();

  // Per-rank key: (matched, iou, -truth_index); compared lexicographically
  // across ranks.
  struct Key {
    bool matched = false;
    double iou = 0.0;
    long neg_index = 0;
    bool operator<(const Key& o) const {
      if (matched != o.matched) return !matched;
      if (iou != o.iou) return iou < o.iou;
      return neg_index < o.neg_index;
    }
    bool operator==(const Key& o) const {
      return matched == o.matched && iou == o.iou && neg_index == o.neg_index;
    }
  };

  std::vector<std::optional<size_t>> current(n);
  std::vector<bool> used(truths.size(), false);
  std::vector<Key> best_keys;
  std::vector<bool> best_flags;
  bool have_best = false;

  std::function<void(size_t)> recurse = [&](size_t r) {
    if (r == n) {
      std::vector<Key> keys(n);
      for (size_t k = 0; k < n; ++k) {
        if (current[k]) {
          const size_t t = *current[k];
          keys[k] = {true, Iou(preds[ranked[k]].box, truths[t].box),
                     -static_cast<long>(t)};
        }
      }
      if (!have_best || std::lexicographical_compare(best_keys.begin(),
                                                     best_keys.end(), keys.begin(),
                                                     keys.end())) {
        have_best = true;
        best_keys = keys;
        best_flags.assign(n, false);
        for (size_t k = 0; k < n; ++k) best_flags[k] = current[k].has_value();
      }
      return;
    }
    current[r].reset();
    recurse(r + 1);
    const Prediction& p = preds[ranked[r]];
    for (size_t t = 0; t < truths.size(); ++t) {
      if (used[t] || truths[t].label != label || truths[t].image_id != p.image_id) {
        continue;
      }
      if (!(Iou(p.box, truths[t].box) >= threshold)) continue;
      used[t] = true;
      current[r] = t;
      recurse(r + 1);
      current[r].reset();
      used[t] = false;
    }
  };
  recurse(0);
  return best_flags;
}

double ApFromFlags(const std::vector<bool>& flags, size_t num_truths) {
  std::vector<size_t> tp_ranks;
  for (size_t k = 0; k < flags.size(); ++k) {
    if (flags[k]) tp_ranks.push_back(k);
  }
  double sum = 0.0;
  for (size_t i = 0; i < tp_ranks.size(); ++i) {
    double best = 0.0;
    for (size_t j = i; j < tp_ranks.size(); ++j) {
      const double p = static_cast<double>(j + 1) / static_cast<double>(tp_ranks[j] + 1);
      best = std::max(best, p);
    }
    sum += best;
  }
  return sum / static_cast<double>(num_truths);
}

double ApByArea(const std::vector<bool>& flags, size_t num_truths) {
  const size_t n = flags.size();
  std::vector<double> recall{0.0};
  std::vector<double> precision{1.0};
  size_t tp = 0;
  for (size_t k = 0; k < n; ++k) {
    tp += flags[k] ? 1 : 0;
    recall.push_back(static_cast<double>(tp) / static_cast<double>(num_truths));
    precision.push_back(static_cast<double>(tp) / static_cast<double>(k + 1));
  }
  double area = 0.0;
  for (size_t i = 1; i < recall.size(); ++i) {
    const double dr = recall[i] - recall[i - 1];
    if (dr <= 0.0) continue;
    double env = 0.0;
    for (size_t j = i; j < precision.size(); ++j) env = std::max(env, precision[j]);
    area += dr * env;
  }
  return area;
}

double BruteForceAp(const std::vector<Prediction>& preds,
                    const std::vector<GroundTruth>& truths,
                    const std::string& label, double threshold) {
  size_t num_truths = 0;
  for (const auto& t : truths) num_truths += t.label == label ? 1 : 0;
  return ApFromFlags(BruteForceTpFlags(preds, truths, label, threshold), num_truths);
}

std::vector<std::string> PairwiseFrontier(const std::vector<ModelSpec>& models,
                                          bool use_map_50_95) {
  auto metric = [&](const ModelSpec& m) {
    return use_map_50_95 ? m.map_50_95 : m.map_50;
  };
  std::vector<std::string> names;
  for (const auto& a : models) {
    if (!metric(a)) continue;
    bool dominated = false;
    for (const auto& b : models) {
      if (!metric(b) || &a == &b) continue;
      const bool no_worse = b.gflops <= a.gflops && *metric(b) >= *metric(a);
      const bool better = b.gflops < a.gflops || *metric(b) > *metric(a);
      if (no_worse && better) dominated = true;
    }
    if (!dominated) names.push_back(a.name);
  }
  std::sort(names.begin(), names.end());
  return names;
}

size_t Levenshtein(std::string_view a, std::string_view b) {
  std::vector<std::vector<size_t>> d(a.size() + 1, std::vector<size_t>(b.size() + 1));
  for (size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return d[a.size()][b.size()];
}

AlertTrial RandomAlertTrial(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  AlertTrial trial;
  trial.cfg.threshold_cm = 50.0 + 150.0 * unit(gen);
  trial.cfg.min_interval_s = unit(gen) < 0.2 ? 0.0 : 3.0 * unit(gen);
  trial.cfg.rearm_margin_cm = unit(gen) < 0.4 ? 0.0 : 40.0 * unit(gen);
  const int n = 20 + static_cast<int>(gen() % 181);
  const SensorConfig sensor;
  double t = 0.0;
  for (int i = 0; i < n; ++i) {
    if (unit(gen) > 0.1) t += 0.5 * unit(gen);
    const double d = 350.0 * unit(gen);
    trial.stream.push_back(
        {d, 0.005, d >= sensor.min_range_cm && d <= sensor.max_range_cm, t});
  }
  return trial;
}

std::string CheckAlertTrial(const AlertTrial& trial) {
  const AlertConfig& cfg = trial.cfg;
  AlertState state;
  std::optional<double> last_alert;
  bool rearm_seen = true;
  bool armed = true;  // reference state machine
  for (size_t i = 0; i < trial.stream.size(); ++i) {
    const DistanceMeasurement& m = trial.stream[i];
    const auto event = OnMeasurement(state, m, cfg);
    const std::string at = "alert at index " + std::to_string(i);
    if (m.distance_cm > cfg.threshold_cm + cfg.rearm_margin_cm) {
      rearm_seen = true;
      armed = true;
    }
    const bool expected = m.in_range && m.distance_cm <= cfg.threshold_cm &&
                          armed &&
                          (!last_alert || m.timestamp_s - *last_alert >= cfg.min_interval_s);
    if (expected != event.has_value()) {
      return "index " + std::to_string(i) + ": engine " +
             (event ? "fired" : "stayed silent") + " against the reference";
    }
    if (!event) continue;
    if (!m.in_range) return at + " on an out-of-range reading";
    if (event->distance_cm > cfg.threshold_cm) return at + " above threshold";
    if (event->distance_cm != m.distance_cm || event->timestamp_s != m.timestamp_s) {
      return at + " does not echo its measurement";
    }
    if (last_alert && m.timestamp_s - *last_alert < cfg.min_interval_s) {
      return at + " inside the debounce interval";
    }
    if (cfg.rearm_margin_cm > 0.0 && !rearm_seen) {
      return at + " without an intervening re-arm reading";
    }
    last_alert = m.timestamp_s;
    rearm_seen = false;
    if (cfg.rearm_margin_cm > 0.0) armed = false;
  }
  return "";
}

}  // namespace percept::oracle
