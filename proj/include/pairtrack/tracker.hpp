#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pairtrack/assignment.hpp"
#include "pairtrack/detection.hpp"
#include "pairtrack/likelihood.hpp"
#include "pairtrack/track.hpp"

namespace pairtrack::tracking {

struct TrackerConfig {
  int hypothesis_budget = 1;
  int kbest_per_parent = 3;
  int confirm_hits = 2;  // cumulative hits to confirm
  int max_miss = 3;      // shortened to 1 after a death-flagged detection
  int history_capacity = 6;
  likelihood::LikelihoodParams likelihood;
  bool record_pedigree = false;
};

void validate_config(const TrackerConfig& config);

/// One global assignment of detections to tracks; a node of the pedigree.
struct Hypothesis {
  std::int64_t id = 0;
  std::optional<std::int64_t> parent_id;
  std::vector<Track> tracks;
  double log_weight = 0.0;        // normalized per generation, max = 0
  double total_log_weight = 0.0;  // cumulative, never normalized
  assign::TrackAssignment assignment_record;
};

/// One output row of the track log.
struct TrackRecord {
  int frame_index = 0;
  std::int64_t track_id = 0;
  model::ClassLabel class_label = model::ClassLabel::Vehicle;
  TrackStatus status = TrackStatus::Confirmed;
  geometry::OrientedBox2D box_end;
  geometry::OrientedBox2D box_begin;
};

struct PedigreeNode {
  int frame_index = 0;
  std::int64_t id = 0;
  std::optional<std::int64_t> parent_id;
  double log_weight = 0.0;
  bool kept = true;
};

struct OutOfOrderFrame : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Multi-hypothesis tracker over paired detections. Each frame expands every
/// live hypothesis through k-best assignment enumeration, prunes the pooled
/// children to the budget, and reports the best hypothesis's confirmed
/// tracks. With hypothesis_budget = 1 this commits to the single best
/// assignment every frame, i.e. greedy association.
class Tracker {
 public:
  explicit Tracker(TrackerConfig config);

  /// Processes one frame; frame indices must be strictly increasing.
  std::vector<TrackRecord> step(const model::Frame& frame);

  const std::vector<Hypothesis>& hypotheses() const { return hypotheses_; }
  const std::vector<PedigreeNode>& pedigree() const { return pedigree_; }
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  TrackerConfig config_;
  std::vector<Hypothesis> hypotheses_;
  std::optional<int> last_frame_;
  std::int64_t next_track_id_ = 1;
  std::int64_t next_hypothesis_id_ = 1;
  std::vector<PedigreeNode> pedigree_;
  std::vector<std::string> diagnostics_;
};

/// Folds step over a frame sequence; deterministic given config and input.
std::vector<TrackRecord> run_sequence(const std::vector<model::Frame>& frames,
                                      const TrackerConfig& config);

/// Pedigree as a DOT graph for inspection.
std::string pedigree_dot(const std::vector<PedigreeNode>& nodes);

}  // namespace pairtrack::tracking
