#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pairtrack/detection.hpp"
#include "pairtrack/tracker.hpp"

namespace pairtrack::mot {

struct MotParams {
  double iou_threshold = 0.5;
  double near_radius = 30.0;  // meters, near/far split from the origin
};

struct Counts {
  int fp = 0;
  int fn = 0;
  int id_switches = 0;
  int gt_count = 0;
  int matches = 0;
  double center_error_sum = 0.0;

  double mota() const {
    if (gt_count == 0) return (fp == 0 && id_switches == 0) ? 1.0 : 0.0;
    return 1.0 - double(fp + fn + id_switches) / double(gt_count);
  }
  double motp() const {
    return matches == 0 ? 0.0 : center_error_sum / double(matches);
  }
};

struct MotReport {
  Counts total;
  std::map<std::string, Counts> per_class;
  Counts near;  // ground truth / track within near_radius of the origin
  Counts far;
  double begin_center_error_mean = 0.0;  // begin-box diagnostic, meters
  int frames = 0;

  double mota() const { return total.mota(); }
  double motp() const { return total.motp(); }
};

struct ClockMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// CLEAR-MOT scoring of a track log against ground truth carried in the
/// frames. Per frame: previous matches carry over while still above the IOU
/// gate, the remainder is matched optimally on (1 - iou2d) cost, and
/// fp/fn/id-switch counts accumulate. Matching uses the current-time (end)
/// boxes; begin-box quality is reported as a separate diagnostic.
/// Throws ClockMismatch when the log holds frames the ground truth lacks.
MotReport evaluate(const std::vector<tracking::TrackRecord>& track_log,
                   const std::vector<model::Frame>& gt_frames,
                   const MotParams& params = {});

/// Plain-text summary table.
std::string report_table(const MotReport& report);

}  // namespace pairtrack::mot
