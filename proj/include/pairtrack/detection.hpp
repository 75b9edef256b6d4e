#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pairtrack/geometry.hpp"

namespace pairtrack::model {

/// Sweep buffer bounds: 6 sweeps, index 0 is current time.
constexpr int kBufferBegin = -5;
constexpr int kBufferEnd = 0;

enum class ClassLabel { Vehicle, Pedestrian, Cyclist };

const char* to_string(ClassLabel c);
ClassLabel class_from_string(const std::string& s);

/// Begin/end sweep indices of an object inside the buffer, with markers for
/// a begin or end that falls strictly inside it.
struct TimeTargets {
  int t_b = kBufferBegin;
  int t_e = kBufferEnd;
  bool birth_flag = false;
  bool death_flag = false;
};

/// One detected object: two oriented boxes sharing extent, one at the end
/// of the buffer and one at its begin time.
struct PairedDetection {
  std::string id;
  ClassLabel class_label = ClassLabel::Vehicle;
  geometry::OrientedBox2D box_end;
  geometry::OrientedBox2D box_begin;
  double shared_height = 1.5;
  double shared_z = 0.75;
  int t_b = kBufferBegin;
  int t_e = kBufferEnd;
  bool birth_flag = false;
  bool death_flag = false;
  double confidence = 1.0;
};

/// Throws std::invalid_argument when a PairedDetection invariant is broken
/// (extent not shared, time order, flag consistency, singleton boxes).
void validate_detection(const PairedDetection& d);

struct GroundTruthPose {
  geometry::OrientedBox2D box;
  double z = 0.75;
  double height = 1.5;
};

/// Ground-truth slice of one track over the sweep buffer of a frame.
struct GroundTruthTrack {
  std::string track_id;
  ClassLabel class_label = ClassLabel::Vehicle;
  std::map<int, GroundTruthPose> presence;  // sweep index -> pose
};

struct Frame {
  int frame_index = 0;
  double timestamp = 0.0;
  std::vector<PairedDetection> detections;
  std::vector<GroundTruthTrack> ground_truth;
};

struct NotInBuffer : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Derives (t_b, t_e) as the earliest/latest present sweep in the buffer and
/// sets the birth/death markers when they fall strictly inside it.
/// Throws NotInBuffer when the track has no presence in the buffer.
TimeTargets derive_time_targets(const GroundTruthTrack& track,
                                int buffer_begin = kBufferBegin,
                                int buffer_end = kBufferEnd);

/// Midpoint between the two box centers of a pair.
geometry::Vec2 pair_midpoint(const PairedDetection& d);

}  // namespace pairtrack::model
