#include "pairtrack/detection.hpp"

#include <cmath>

namespace pairtrack::model {

const char* to_string(ClassLabel c) {
  switch (c) {
    case ClassLabel::Vehicle: return "Vehicle";
    case ClassLabel::Pedestrian: return "Pedestrian";
    case ClassLabel::Cyclist: return "Cyclist";
  }
  return "Vehicle";
}

ClassLabel class_from_string(const std::string& s) {
  if (s == "Vehicle") return ClassLabel::Vehicle;
  if (s == "Pedestrian") return ClassLabel::Pedestrian;
  if (s == "Cyclist") return ClassLabel::Cyclist;
  throw std::invalid_argument("unknown class label: " + s);
}

void validate_detection(const PairedDetection& d) {
  if (!geometry::is_valid(d.box_end) || !geometry::is_valid(d.box_begin)) {
    throw std::invalid_argument("detection " + d.id + ": invalid box");
  }
  const double extent_tol = 1e-9;
  if (std::abs(d.box_end.length - d.box_begin.length) > extent_tol ||
      std::abs(d.box_end.width - d.box_begin.width) > extent_tol) {
    throw std::invalid_argument("detection " + d.id +
                                ": pair does not share extent");
  }
  if (d.t_b > d.t_e || d.t_b < kBufferBegin || d.t_e > kBufferEnd) {
    throw std::invalid_argument("detection " + d.id + ": bad time targets");
  }
  if (d.t_b == d.t_e) {
    if (std::abs(d.box_end.cx - d.box_begin.cx) > extent_tol ||
        std::abs(d.box_end.cy - d.box_begin.cy) > extent_tol ||
        std::abs(d.box_end.heading - d.box_begin.heading) > extent_tol) {
      throw std::invalid_argument("detection " + d.id +
                                  ": singleton with distinct boxes");
    }
  }
  if (d.birth_flag && d.t_b <= kBufferBegin) {
    throw std::invalid_argument("detection " + d.id +
                                ": birth flag at buffer begin");
  }
  if (d.death_flag && d.t_e >= kBufferEnd) {
    throw std::invalid_argument("detection " + d.id +
                                ": death flag at buffer end");
  }
  if (d.confidence < 0.0 || d.confidence > 1.0) {
    throw std::invalid_argument("detection " + d.id + ": confidence range");
  }
}

TimeTargets derive_time_targets(const GroundTruthTrack& track,
                                int buffer_begin, int buffer_end) {
  TimeTargets t;
  bool any = false;
  int lo = buffer_end;
  int hi = buffer_begin;
  for (const auto& [sweep, pose] : track.presence) {
    (void)pose;
    if (sweep < buffer_begin || sweep > buffer_end) continue;
    lo = std::min(lo, sweep);
    hi = std::max(hi, sweep);
    any = true;
  }
  if (!any) {
    throw NotInBuffer("track " + track.track_id + " absent from buffer");
  }
  t.t_b = lo;
  t.t_e = hi;
  t.birth_flag = lo > buffer_begin;
  t.death_flag = hi < buffer_end;
  return t;
}

geometry::Vec2 pair_midpoint(const PairedDetection& d) {
  return (d.box_begin.center() + d.box_end.center()) * 0.5;
}

}  // namespace pairtrack::model
