#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>

#include "pairtrack/detection.hpp"

namespace pairtrack::tracking {

enum class TrackStatus { Tentative, Confirmed, Dead };

const char* to_string(TrackStatus s);

struct TrackObservation {
  int frame_index = 0;
  model::PairedDetection detection;
};

/// Fixed-capacity circular buffer of past detections; the oldest entry is
/// evicted when a push exceeds capacity.
class TrackHistory {
 public:
  explicit TrackHistory(std::size_t capacity = 6) : capacity_(capacity) {
    if (capacity_ < 2) throw std::invalid_argument("history capacity < 2");
  }

  void push(TrackObservation obs) {
    buf_.push_back(std::move(obs));
    if (buf_.size() > capacity_) buf_.pop_front();
  }

  const TrackObservation& back() const { return buf_.back(); }
  const TrackObservation& front() const { return buf_.front(); }
  std::size_t size() const { return buf_.size(); }
  bool empty() const { return buf_.empty(); }
  std::size_t capacity() const { return capacity_; }
  auto begin() const { return buf_.begin(); }
  auto end() const { return buf_.end(); }

 private:
  std::deque<TrackObservation> buf_;
  std::size_t capacity_;
};

/// Identity-bearing history of paired detections with lifecycle state.
struct Track {
  std::int64_t track_id = 0;
  model::ClassLabel class_label = model::ClassLabel::Vehicle;
  TrackHistory history{6};
  int hit_count = 0;
  int miss_streak = 0;
  TrackStatus status = TrackStatus::Tentative;
};

}  // namespace pairtrack::tracking
