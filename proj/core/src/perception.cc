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
#include "percept/perception.hpp"

#include <string>

#include "percept/csv.hpp"
#include "percept/error.hpp"
#include "percept/rng.hpp"

namespace percept {
namespace {

bool InUnit(double v) { return v >= 0.0 && v <= 1.0; }

void CheckConfidence(double c, const std::string& backend) {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw BackendError(backend, "confidence out of [0,1]: " + FormatDouble(c));
  }
}

std::uint64_t StreamSeed(std::uint64_t seed, std::string_view frame_id,
                         size_t index, std::uint64_t salt) {
  return HashCombine(HashCombine(HashCombine(seed, salt), HashString(frame_id)),
                     index);
}

constexpr std::uint64_t kMissSalt = 0x6d697373;  // "miss"
constexpr std::uint64_t kOcrSalt = 0x6f637200;   // "ocr"

}  // namespace

bool BoundingBox::IsValid() const {
  return InUnit(x_min) && InUnit(y_min) && InUnit(x_max) && InUnit(y_max) &&
         x_min <= x_max && y_min <= y_max;
}

BoundingBox BoundingBox::Checked(double x_min, double y_min, double x_max,
                                 double y_max) {
  BoundingBox b{x_min, y_min, x_max, y_max};
  if (!b.IsValid()) {
    throw ValidationError("invalid bounding box [" + FormatDouble(x_min) +
                          "," + FormatDouble(y_min) + "," +
                          FormatDouble(x_max) + "," + FormatDouble(y_max) +
                          "]");
  }
  return b;
}

void Frame::Validate(const ClassVocabulary* vocabulary) const {
  for (const auto& obj : objects) {
    if (!obj.box.IsValid()) {
      throw ValidationError("frame '" + frame_id + "': invalid box for '" +
                            obj.label + "'");
    }
    if (vocabulary != nullptr && !vocabulary->Contains(obj.label)) {
      throw ValidationError("frame '" + frame_id + "': label '" + obj.label +
                            "' is not in the class vocabulary");
    }
  }
  for (const auto& t : texts) {
    if (!t.region.IsValid()) {
      throw ValidationError("frame '" + frame_id +
                            "': invalid region for text '" + t.text + "'");
    }
  }
}

std::vector<Detection> Detect(const Frame& frame,
                              const DetectorBackend& backend) {
  frame.Validate();
  std::vector<Detection> out;
  try {
    out = backend.Detect(frame);
  } catch (const BackendError&) {
    throw;
  } catch (const std::exception& e) {
    throw BackendError(backend.id(), e.what());
  }
  for (const auto& d : out) CheckConfidence(d.confidence, backend.id());
  return out;
}

std::vector<OcrExtraction> ExtractText(const Frame& frame,
                                       const OcrBackend& backend) {
  frame.Validate();
  std::vector<OcrExtraction> out;
  try {
    out = backend.ExtractText(frame);
  } catch (const BackendError&) {
    throw;
  } catch (const std::exception& e) {
    throw BackendError(backend.id(), e.what());
  }
  for (const auto& x : out) CheckConfidence(x.confidence, backend.id());
  return out;
}

double MockConfidence(std::uint64_t seed, std::string_view frame_id,
                      std::string_view label) {
  const std::uint64_t h =
      HashCombine(HashCombine(seed, HashString(frame_id)), HashString(label));
  return 0.5 + 0.5 * UnitInterval(h);
}

MockDetector::MockDetector(MockDetectorConfig cfg) : cfg_(std::move(cfg)) {
  if (!(cfg_.miss_prob >= 0.0 && cfg_.miss_prob <= 1.0)) {
    throw ValidationError("mock detector: miss_prob must be in [0,1]");
  }
}

std::vector<Detection> MockDetector::Detect(const Frame& frame) const {
  std::vector<Detection> out;
  for (size_t i = 0; i < frame.objects.size(); ++i) {
    const auto& obj = frame.objects[i];
    Rng rng(StreamSeed(cfg_.seed, frame.frame_id, i, kMissSalt));
    if (rng.Bernoulli(cfg_.miss_prob)) continue;
    out.push_back({obj.label, MockConfidence(cfg_.seed, frame.frame_id, obj.label),
                   obj.box});
  }
  return out;
}

ConfusionTable::ConfusionTable(const std::vector<ConfusionRule>& rules) {
  to_.fill(0);
  for (const auto& r : rules) {
    if (r.from == r.to || r.to == 0) {
      throw ValidationError(std::string("confusion rule '") + r.from + "'->'" +
                            r.to + "' is not a substitution");
    }
    if (Has(r.from)) {
      throw ValidationError(std::string("duplicate confusion rule for '") +
                            r.from + "'");
    }
    to_[static_cast<unsigned char>(r.from)] = r.to;
  }
}

size_t ConfusionTable::EligibleCount(std::string_view text) const {
  size_t n = 0;
  for (const char c : text) n += Has(c) ? 1 : 0;
  return n;
}

std::string ApplyConfusions(std::string_view text, const ConfusionTable& table,
                            double rate, Rng& rng) {
  std::string out(text);
  for (char& c : out) {
    if (!table.Has(c)) continue;
    if (rng.Uniform() < rate) c = table.Map(c);
  }
  return out;
}

MockOcr::MockOcr(MockOcrConfig cfg)
    : cfg_(std::move(cfg)), table_(cfg_.rules) {
  if (!(cfg_.substitution_rate >= 0.0 && cfg_.substitution_rate <= 1.0)) {
    throw ValidationError("mock ocr: substitution_rate must be in [0,1]");
  }
}

std::string MockOcr::Corrupt(std::string_view text, std::string_view frame_id,
                             size_t index) const {
  Rng rng(StreamSeed(cfg_.seed, frame_id, index, kOcrSalt));
  return ApplyConfusions(text, table_, cfg_.substitution_rate, rng);
}

std::vector<OcrExtraction> MockOcr::ExtractText(const Frame& frame) const {
  std::vector<OcrExtraction> out;
  out.reserve(frame.texts.size());
  for (size_t i = 0; i < frame.texts.size(); ++i) {
    const auto& t = frame.texts[i];
    out.push_back({Corrupt(t.text, frame.frame_id, i),
                   MockConfidence(cfg_.seed, frame.frame_id, t.text), t.region});
  }
  return out;
}

ClassVocabulary ClassVocabulary::Load(const std::filesystem::path& path) {
  return Parse(ReadFile(path), path.string());
}

ClassVocabulary ClassVocabulary::Parse(std::string_view content,
                                       std::string_view source) {
  ClassVocabulary v;
  int line_number = 0;
  size_t start = 0;
  while (start < content.size()) {
    size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_number;
    start = end + 1;
    const auto where = std::string(source) + ":" + std::to_string(line_number);
    if (Trim(line).empty()) {
      throw ValidationError(where + ": empty label");
    }
    std::string label(Trim(line));
    if (!v.index_.insert(label).second) {
      throw ValidationError(where + ": duplicate label '" + label + "'");
    }
    v.labels_.push_back(std::move(label));
    if (v.labels_.size() > kCocoClassCount) {
      throw ValidationError(where + ": more than " +
                            std::to_string(kCocoClassCount) + " labels");
    }
  }
  if (v.labels_.size() != kCocoClassCount) {
    throw ValidationError(std::string(source) + ":" +
                          std::to_string(line_number) + ": expected " +
                          std::to_string(kCocoClassCount) + " labels, found " +
                          std::to_string(v.labels_.size()));
  }
  return v;
}

bool ClassVocabulary::Contains(std::string_view label) const {
  return index_.contains(std::string(label));
}

}  // namespace percept
