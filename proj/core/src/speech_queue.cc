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
#include "percept/speech_queue.hpp"

#include <algorithm>
#include <unordered_set>

#include "percept/csv.hpp"

namespace percept {

std::string_view ToString(Priority p) {
  switch (p) {
    case Priority::kAlert:
      return "alert";
    case Priority::kPerception:
      return "perception";
    case Priority::kInfo:
      return "info";
  }
  return "unknown";
}

std::string_view ToString(DropPolicy policy) {
  return policy == DropPolicy::kDropLowestNewest ? "drop-lowest-newest"
                                                 : "reject-new";
}

std::string Transcript::Export() const {
  std::string out;
  for (const auto& e : entries) {
    out += FormatFixed(e.spoken_at_s, 3);
    out += '\t';
    out += std::to_string(static_cast<int>(e.priority));
    out += '\t';
    out += e.text;
    out += '\n';
  }
  return out;
}

QueueFullError::QueueFullError(DropPolicy policy, SpeechMessage dropped)
    : Error("speech queue full (" + std::string(ToString(policy)) +
            "): dropped message #" + std::to_string(dropped.sequence) + " '" +
            dropped.text + "'"),
      policy_(policy),
      dropped_(std::move(dropped)) {}

SpeechQueue::SpeechQueue(size_t capacity, DropPolicy policy)
    : capacity_(capacity), policy_(policy) {
  if (capacity_ == 0) throw ValidationError("speech queue capacity must be >= 1");
}

std::uint64_t SpeechQueue::Enqueue(SpeechMessage msg) {
  if (!(msg.rate > 0.0)) {
    throw ValidationError("speech rate must be > 0");
  }
  std::unique_lock lock(mu_);
  msg.sequence = next_sequence_++;
  const std::uint64_t seq = msg.sequence;
  if (pending_.size() < capacity_) {
    pending_.insert(std::move(msg));
    return seq;
  }

  SpeechMessage victim;
  if (policy_ == DropPolicy::kRejectNew) {
    victim = std::move(msg);
  } else {
    // The ordering puts the lowest-priority, newest message last.
    auto last = std::prev(pending_.end());
    if (Order{}(msg, *last)) {
      victim = *last;
      pending_.erase(last);
      pending_.insert(std::move(msg));
    } else {
      victim = std::move(msg);
    }
  }
  dropped_.push_back(victim);
  lock.unlock();
  throw QueueFullError(policy_, std::move(victim));
}

std::optional<SpeechMessage> SpeechQueue::DequeueNext() {
  std::lock_guard lock(mu_);
  if (pending_.empty()) return std::nullopt;
  auto node = pending_.extract(pending_.begin());
  return std::move(node.value());
}

void SpeechQueue::Requeue(SpeechMessage msg) {
  std::lock_guard lock(mu_);
  pending_.insert(std::move(msg));
}

size_t SpeechQueue::size() const {
  std::lock_guard lock(mu_);
  return pending_.size();
}

std::vector<SpeechMessage> SpeechQueue::dropped() const {
  std::lock_guard lock(mu_);
  return dropped_;
}

double ModeledDuration(std::string_view text, double rate,
                       double base_per_char_s) {
  return base_per_char_s * static_cast<double>(text.size()) / rate;
}

void MockSynthesizer::Speak(const SpeechMessage& msg, double now_s) {
  const size_t call = calls_++;
  if (failing_calls_.contains(call)) {
    throw Error("injected synthesizer failure on call " + std::to_string(call));
  }
  transcript_.entries.push_back({now_s, msg.priority, msg.text});
}

SpeechError::SpeechError(SpeechMessage failed, const std::string& cause)
    : Error("speech failed twice for message #" +
            std::to_string(failed.sequence) + ": " + cause),
      failed_(std::move(failed)) {}

Transcript SpeakAll(SpeechQueue& queue, SpeechBackend& backend,
                    VirtualClock& clock, double base_per_char_s) {
  Transcript spoken;
  std::unordered_set<std::uint64_t> retried;
  while (auto msg = queue.DequeueNext()) {
    try {
      backend.Speak(*msg, clock.now());
    } catch (const std::exception& e) {
      if (retried.insert(msg->sequence).second) {
        queue.Requeue(std::move(*msg));
        continue;
      }
      throw SpeechError(std::move(*msg), e.what());
    }
    spoken.entries.push_back({clock.now(), msg->priority, msg->text});
    clock.Advance(ModeledDuration(msg->text, msg->rate, base_per_char_s));
  }
  return spoken;
}

}  // namespace percept
