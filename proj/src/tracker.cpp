#include "pairtrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace pairtrack::tracking {

const char* to_string(TrackStatus s) {
  switch (s) {
    case TrackStatus::Tentative: return "Tentative";
    case TrackStatus::Confirmed: return "Confirmed";
    case TrackStatus::Dead: return "Dead";
  }
  return "Dead";
}

void validate_config(const TrackerConfig& config) {
  if (config.hypothesis_budget < 1 || config.kbest_per_parent < 1 ||
      config.confirm_hits < 1 || config.max_miss < 1 ||
      config.history_capacity < 2) {
    throw std::invalid_argument("tracker config values must be positive");
  }
}

Tracker::Tracker(TrackerConfig config) : config_(std::move(config)) {
  validate_config(config_);
  Hypothesis root;
  root.id = 0;
  hypotheses_.push_back(std::move(root));
}

namespace {

Track spawn_track(std::int64_t id, const model::PairedDetection& det,
                  int frame_index, const TrackerConfig& config) {
  Track t;
  t.track_id = id;
  t.class_label = det.class_label;
  t.history = TrackHistory(std::size_t(config.history_capacity));
  t.history.push({frame_index, det});
  t.hit_count = 1;
  t.status = t.hit_count >= config.confirm_hits ? TrackStatus::Confirmed
                                                : TrackStatus::Tentative;
  return t;
}

}  // namespace

std::vector<TrackRecord> Tracker::step(const model::Frame& frame) {
  if (last_frame_ && frame.frame_index <= *last_frame_) {
    throw OutOfOrderFrame("frame " + std::to_string(frame.frame_index) +
                          " after " + std::to_string(*last_frame_));
  }
  last_frame_ = frame.frame_index;
  const auto& dets = frame.detections;

  // Track ids are reserved per detection index before expansion so that the
  // same detection spawns the same id in every child hypothesis, keeping the
  // output independent of the hypothesis budget.
  std::vector<std::int64_t> spawn_ids(dets.size());
  for (std::size_t j = 0; j < dets.size(); ++j) {
    spawn_ids[j] = next_track_id_ + std::int64_t(j);
  }
  next_track_id_ += std::int64_t(dets.size());

  struct Child {
    Hypothesis hyp;
    std::int64_t parent_id;
  };
  std::vector<Child> children;

  std::set<std::pair<int, std::size_t>> flagged;  // occlusion notes emitted
  for (const Hypothesis& parent : hypotheses_) {
    const assign::CostMatrix cm = assign::build_cost_matrix(
        parent.tracks, dets, frame.frame_index, config_.likelihood);
    const auto solutions = assign::kbest_track_assignments(
        cm, std::size_t(config_.kbest_per_parent));

    for (const assign::TrackAssignment& sol : solutions) {
      Child child;
      child.parent_id = parent.id;
      child.hyp.parent_id = parent.id;
      child.hyp.total_log_weight = parent.total_log_weight - sol.total_cost;
      child.hyp.assignment_record = sol;

      std::vector<char> det_used(dets.size(), 0);
      for (std::size_t i = 0; i < parent.tracks.size(); ++i) {
        Track t = parent.tracks[i];
        const int j = sol.track_to_det[i];
        if (j >= 0) {
          if (det_used[std::size_t(j)]) {
            throw std::logic_error("detection assigned twice in hypothesis");
          }
          det_used[std::size_t(j)] = 1;
          t.history.push({frame.frame_index, dets[std::size_t(j)]});
          t.hit_count += 1;
          t.miss_streak = 0;
          if (t.status == TrackStatus::Tentative &&
              t.hit_count >= config_.confirm_hits) {
            t.status = TrackStatus::Confirmed;
          }
        } else {
          t.miss_streak += 1;
          // A death-flagged last detection is evidence, not proof: it
          // shortens the allowed miss streak to one.
          const int allowed = t.history.back().detection.death_flag
                                  ? 1
                                  : config_.max_miss;
          if (t.miss_streak >= allowed) {
            t.status = TrackStatus::Dead;
          }
        }
        if (t.status != TrackStatus::Dead) {
          child.hyp.tracks.push_back(std::move(t));
        }
      }

      for (std::size_t j = 0; j < dets.size(); ++j) {
        if (det_used[j]) continue;
        child.hyp.tracks.push_back(spawn_track(
            spawn_ids[j], dets[j], frame.frame_index, config_));
        if (!dets[j].birth_flag && dets[j].t_b == model::kBufferBegin &&
            flagged.insert({frame.frame_index, j}).second) {
          diagnostics_.push_back(
              "frame " + std::to_string(frame.frame_index) + " detection " +
              dets[j].id + ": new track with full-buffer presence, likely "
              "occlusion emergence");
        }
      }
      children.push_back(std::move(child));
    }
  }

  // Normalize weights within the generation and prune to the budget.
  double max_total = -std::numeric_limits<double>::infinity();
  for (const Child& c : children) {
    max_total = std::max(max_total, c.hyp.total_log_weight);
  }
  for (Child& c : children) {
    c.hyp.log_weight = c.hyp.total_log_weight - max_total;
  }
  std::stable_sort(children.begin(), children.end(),
                   [](const Child& a, const Child& b) {
                     if (a.hyp.log_weight != b.hyp.log_weight) {
                       return a.hyp.log_weight > b.hyp.log_weight;
                     }
                     if (a.parent_id != b.parent_id) {
                       return a.parent_id < b.parent_id;
                     }
                     return a.hyp.assignment_record.track_to_det <
                            b.hyp.assignment_record.track_to_det;
                   });

  const std::size_t keep =
      std::min(children.size(), std::size_t(config_.hypothesis_budget));
  std::vector<Hypothesis> next;
  next.reserve(keep);
  for (std::size_t i = 0; i < children.size(); ++i) {
    Hypothesis& h = children[i].hyp;
    h.id = next_hypothesis_id_++;
    if (config_.record_pedigree) {
      pedigree_.push_back(
          {frame.frame_index, h.id, h.parent_id, h.log_weight, i < keep});
    }
    if (i < keep) next.push_back(std::move(h));
  }
  hypotheses_ = std::move(next);

  std::vector<TrackRecord> records;
  if (!hypotheses_.empty()) {
    const Hypothesis& best = hypotheses_.front();
    for (const Track& t : best.tracks) {
      if (t.status != TrackStatus::Confirmed) continue;
      const model::PairedDetection& d = t.history.back().detection;
      records.push_back({frame.frame_index, t.track_id, t.class_label,
                         t.status, d.box_end, d.box_begin});
    }
    std::sort(records.begin(), records.end(),
              [](const TrackRecord& a, const TrackRecord& b) {
                return a.track_id < b.track_id;
              });
  }
  return records;
}

std::vector<TrackRecord> run_sequence(const std::vector<model::Frame>& frames,
                                      const TrackerConfig& config) {
  Tracker tracker(config);
  std::vector<TrackRecord> log;
  for (const model::Frame& frame : frames) {
    auto records = tracker.step(frame);
    log.insert(log.end(), records.begin(), records.end());
  }
  return log;
}

std::string pedigree_dot(const std::vector<PedigreeNode>& nodes) {
  std::ostringstream os;
  os << "digraph pedigree {\n  rankdir=LR;\n";
  for (const PedigreeNode& n : nodes) {
    os << "  h" << n.id << " [label=\"h" << n.id << "\\nf" << n.frame_index
       << " w=" << n.log_weight << "\"";
    if (!n.kept) os << " style=dotted";
    os << "];\n";
    if (n.parent_id) {
      os << "  h" << *n.parent_id << " -> h" << n.id << ";\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace pairtrack::tracking
