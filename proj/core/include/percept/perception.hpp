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
#ifndef PERCEPT_PERCEPTION_HPP_
#define PERCEPT_PERCEPTION_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace percept {

// Axis-aligned box in normalized image coordinates.
struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  bool IsValid() const;
  double Area() const { return (x_max - x_min) * (y_max - y_min); }

  // Throws ValidationError unless 0 <= min <= max <= 1 on both axes.
  static BoundingBox Checked(double x_min, double y_min, double x_max,
                             double y_max);

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct LabeledBox {
  std::string label;
  BoundingBox box;

  friend bool operator==(const LabeledBox&, const LabeledBox&) = default;
};

struct TextRegion {
  std::string text;
  BoundingBox region;

  friend bool operator==(const TextRegion&, const TextRegion&) = default;
};

class ClassVocabulary;

// A captured image, represented by its ground truth.
struct Frame {
  std::string frame_id;
  std::vector<LabeledBox> objects;
  std::vector<TextRegion> texts;
  double captured_at_s = 0.0;

  // Checks box invariants and, when `vocabulary` is non-null, that every
  // object label belongs to it.
  void Validate(const ClassVocabulary* vocabulary = nullptr) const;

  friend bool operator==(const Frame&, const Frame&) = default;
};

struct Detection {
  std::string label;
  double confidence = 0.0;
  BoundingBox box;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct OcrExtraction {
  std::string text;
  double confidence = 0.0;
  BoundingBox region;

  friend bool operator==(const OcrExtraction&, const OcrExtraction&) = default;
};

// Object detector. Implementations must be safe for concurrent const use.
class DetectorBackend {
 public:
  virtual ~DetectorBackend() = default;
  virtual std::string id() const = 0;
  virtual std::vector<Detection> Detect(const Frame& frame) const = 0;
  // Modeled per-frame latency for virtual-clock runs.
  virtual double modeled_latency_s() const { return 0.0; }
};

// Text recognizer. Implementations must be safe for concurrent const use.
class OcrBackend {
 public:
  virtual ~OcrBackend() = default;
  virtual std::string id() const = 0;
  virtual std::vector<OcrExtraction> ExtractText(const Frame& frame) const = 0;
  virtual double modeled_latency_s() const { return 0.0; }
};

// Validates the frame, runs the backend, and checks its output. Any
// exception escaping the backend is rethrown as BackendError.
std::vector<Detection> Detect(const Frame& frame,
                              const DetectorBackend& backend);
std::vector<OcrExtraction> ExtractText(const Frame& frame,
                                       const OcrBackend& backend);

// Deterministic confidence in [0.5, 1.0) keyed on (seed, frame, label).
double MockConfidence(std::uint64_t seed, std::string_view frame_id,
                      std::string_view label);

struct MockDetectorConfig {
  std::string id = "mock";
  double miss_prob = 0.0;
  std::uint64_t seed = 0;
  double latency_s = 0.0;
};

// Returns ground-truth objects, each dropped independently with
// probability miss_prob. The drop decision for object i of a frame depends
// only on (seed, frame_id, i).
class MockDetector final : public DetectorBackend {
 public:
  explicit MockDetector(MockDetectorConfig cfg);

  std::string id() const override { return cfg_.id; }
  std::vector<Detection> Detect(const Frame& frame) const override;
  double modeled_latency_s() const override { return cfg_.latency_s; }

  const MockDetectorConfig& config() const { return cfg_; }

 private:
  MockDetectorConfig cfg_;
};

// One misread: `from` is recognized as `to`.
struct ConfusionRule {
  char from = 0;
  char to = 0;

  friend bool operator==(const ConfusionRule&, const ConfusionRule&) = default;
  friend auto operator<=>(const ConfusionRule&, const ConfusionRule&) = default;
};

// Lookup table built from a rule list; at most one rule per source char.
class ConfusionTable {
 public:
  ConfusionTable() { to_.fill(0); }
  // Throws ValidationError on two rules for the same source character or
  // an identity rule.
  explicit ConfusionTable(const std::vector<ConfusionRule>& rules);

  bool Has(char c) const { return to_[static_cast<unsigned char>(c)] != 0; }
  char Map(char c) const { return to_[static_cast<unsigned char>(c)]; }
  // Number of characters of `text` with a rule.
  size_t EligibleCount(std::string_view text) const;

 private:
  std::array<char, 256> to_;
};

class Rng;

// Replaces each rule-covered character with its confusion with probability
// `rate`, consuming one uniform draw per covered character. Length is
// preserved.
std::string ApplyConfusions(std::string_view text, const ConfusionTable& table,
                            double rate, Rng& rng);

struct MockOcrConfig {
  std::string id = "mock-ocr";
  double substitution_rate = 0.0;
  std::uint64_t seed = 0;
  std::vector<ConfusionRule> rules;
  double latency_s = 0.0;
};

// Returns every ground-truth text with per-character confusions applied.
// The stream for text i of a frame depends only on (seed, frame_id, i).
class MockOcr final : public OcrBackend {
 public:
  explicit MockOcr(MockOcrConfig cfg);

  std::string id() const override { return cfg_.id; }
  std::vector<OcrExtraction> ExtractText(const Frame& frame) const override;
  double modeled_latency_s() const override { return cfg_.latency_s; }

  // The corruption applied to a bare string; ExtractText uses this with
  // (frame_id, index).
  std::string Corrupt(std::string_view text, std::string_view frame_id,
                      size_t index) const;

  const MockOcrConfig& config() const { return cfg_; }

 private:
  MockOcrConfig cfg_;
  ConfusionTable table_;
};

inline constexpr size_t kCocoClassCount = 80;

// The detector's label set: exactly 80 unique non-empty labels.
class ClassVocabulary {
 public:
  // Throws ValidationError naming the offending line on a blank line,
  // duplicate, or wrong count.
  static ClassVocabulary Load(const std::filesystem::path& path);
  static ClassVocabulary Parse(std::string_view content,
                               std::string_view source = "<memory>");

  const std::vector<std::string>& labels() const { return labels_; }
  bool Contains(std::string_view label) const;
  size_t size() const { return labels_.size(); }

 private:
  std::vector<std::string> labels_;
  std::unordered_set<std::string> index_;
};

}  // namespace percept

#endif  // PERCEPT_PERCEPTION_HPP_
