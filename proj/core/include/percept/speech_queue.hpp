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
#ifndef PERCEPT_SPEECH_QUEUE_HPP_
#define PERCEPT_SPEECH_QUEUE_HPP_

#include <cstdint>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "percept/error.hpp"

namespace percept {

// Lower value speaks first.
enum class Priority : int { kAlert = 0, kPerception = 1, kInfo = 2 };

std::string_view ToString(Priority p);

struct SpeechMessage {
  std::string text;
  Priority priority = Priority::kInfo;
  double enqueued_at_s = 0.0;
  double rate = 1.0;  // speed multiplier
  std::uint64_t sequence = 0;  // assigned by SpeechQueue::Enqueue

  friend bool operator==(const SpeechMessage&, const SpeechMessage&) = default;
};

struct TranscriptEntry {
  double spoken_at_s = 0.0;
  Priority priority = Priority::kInfo;
  std::string text;

  friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

struct Transcript {
  std::vector<TranscriptEntry> entries;

  // One `<t>\t<priority>\t<text>` line per entry, t with 3 decimals and
  // priority as its numeric class.
  std::string Export() const;

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

enum class DropPolicy {
  kDropLowestNewest,  // evict the lowest-priority, most recent message
  kRejectNew,         // refuse the incoming message
};

std::string_view ToString(DropPolicy policy);

inline constexpr size_t kDefaultQueueCapacity = 64;

class QueueFullError : public Error {
 public:
  QueueFullError(DropPolicy policy, SpeechMessage dropped);

  DropPolicy policy() const { return policy_; }
  const SpeechMessage& dropped() const { return dropped_; }

 private:
  DropPolicy policy_;
  SpeechMessage dropped_;
};

// Bounded priority queue, FIFO within a priority class. Safe for any
// number of concurrent producers and one consumer.
class SpeechQueue {
 public:
  explicit SpeechQueue(size_t capacity = kDefaultQueueCapacity,
                       DropPolicy policy = DropPolicy::kDropLowestNewest);

  // Assigns the next sequence number and stores the message. At capacity
  // the drop policy picks a victim (possibly `msg` itself), records it in
  // dropped(), and QueueFullError is thrown after the queue is updated.
  // Throws ValidationError when rate <= 0.
  std::uint64_t Enqueue(SpeechMessage msg);

  std::optional<SpeechMessage> DequeueNext();

  // Puts a previously dequeued message back with its original sequence.
  // Bypasses the capacity bound.
  void Requeue(SpeechMessage msg);

  size_t size() const;
  bool empty() const { return size() == 0; }
  size_t capacity() const { return capacity_; }
  std::vector<SpeechMessage> dropped() const;

 private:
  struct Order {
    bool operator()(const SpeechMessage& a, const SpeechMessage& b) const {
      if (a.priority != b.priority) return a.priority < b.priority;
      return a.sequence < b.sequence;
    }
  };

  const size_t capacity_;
  const DropPolicy policy_;
  mutable std::mutex mu_;
  std::set<SpeechMessage, Order> pending_;
  std::vector<SpeechMessage> dropped_;
  std::uint64_t next_sequence_ = 0;
};

// Seconds to speak `text` at `rate`: base_per_char_s * len / rate.
double ModeledDuration(std::string_view text, double rate,
                       double base_per_char_s);

// Simulation time, advanced explicitly.
class VirtualClock {
 public:
  explicit VirtualClock(double start_s = 0.0) : now_s_(start_s) {}
  double now() const { return now_s_; }
  void Advance(double dt_s) { now_s_ += dt_s; }
  void AdvanceTo(double t_s) {
    if (t_s > now_s_) now_s_ = t_s;
  }

 private:
  double now_s_;
};

class SpeechBackend {
 public:
  virtual ~SpeechBackend() = default;
  virtual std::string id() const = 0;
  // Speaks one message starting at `now_s`; throws on failure.
  virtual void Speak(const SpeechMessage& msg, double now_s) = 0;
};

// Appends to a transcript instead of producing audio. Can be told to fail
// specific calls (0-based call index) for fault testing.
class MockSynthesizer final : public SpeechBackend {
 public:
  MockSynthesizer() = default;
  explicit MockSynthesizer(std::set<size_t> failing_calls)
      : failing_calls_(std::move(failing_calls)) {}

  std::string id() const override { return "mock-tts"; }
  void Speak(const SpeechMessage& msg, double now_s) override;

  const Transcript& transcript() const { return transcript_; }

 private:
  Transcript transcript_;
  std::set<size_t> failing_calls_;
  size_t calls_ = 0;
};

class SpeechError : public Error {
 public:
  SpeechError(SpeechMessage failed, const std::string& cause);
  const SpeechMessage& failed() const { return failed_; }

 private:
  SpeechMessage failed_;
};

// Drains `queue` in dequeue order. Each message is spoken at clock.now()
// and the clock advances by its modeled duration. A message whose first
// attempt fails is requeued once; a second failure throws SpeechError
// carrying it (the message is not requeued again).
Transcript SpeakAll(SpeechQueue& queue, SpeechBackend& backend,
                    VirtualClock& clock, double base_per_char_s);

}  // namespace percept

#endif  // PERCEPT_SPEECH_QUEUE_HPP_
