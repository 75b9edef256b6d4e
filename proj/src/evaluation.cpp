#include "pairtrack/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>
#include <unordered_map>

#include "pairtrack/assignment.hpp"

namespace pairtrack::mot {

namespace {

struct GtBox {
  const model::GroundTruthTrack* track;
  geometry::OrientedBox2D box;        // at sweep 0
  geometry::OrientedBox2D begin_box;  // at the earliest present sweep
};

double center_distance(const geometry::OrientedBox2D& a,
                       const geometry::OrientedBox2D& b) {
  return (a.center() - b.center()).norm();
}

}  // namespace

MotReport evaluate(const std::vector<tracking::TrackRecord>& track_log,
                   const std::vector<model::Frame>& gt_frames,
                   const MotParams& params) {
  std::set<int> gt_frame_set;
  for (const model::Frame& f : gt_frames) gt_frame_set.insert(f.frame_index);
  std::map<int, std::vector<const tracking::TrackRecord*>> rows_by_frame;
  for (const tracking::TrackRecord& r : track_log) {
    if (!gt_frame_set.count(r.frame_index)) {
      throw ClockMismatch("track log frame " + std::to_string(r.frame_index) +
                          " has no ground truth");
    }
    rows_by_frame[r.frame_index].push_back(&r);
  }

  MotReport report;
  report.frames = int(gt_frames.size());
  std::unordered_map<std::string, std::int64_t> carry;
  double begin_error_sum = 0.0;
  int begin_error_count = 0;

  for (const model::Frame& frame : gt_frames) {
    std::vector<GtBox> gts;
    for (const model::GroundTruthTrack& t : frame.ground_truth) {
      auto at_now = t.presence.find(0);
      if (at_now == t.presence.end()) continue;  // not present at end time
      gts.push_back({&t, at_now->second.box, t.presence.begin()->second.box});
    }
    const auto& rows = rows_by_frame[frame.frame_index];

    std::vector<int> gt_match(gts.size(), -1);
    std::vector<char> row_used(rows.size(), 0);

    // Carry over previous correspondences still above the gate.
    for (std::size_t g = 0; g < gts.size(); ++g) {
      auto prev = carry.find(gts[g].track->track_id);
      if (prev == carry.end()) continue;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (row_used[r] || rows[r]->track_id != prev->second) continue;
        if (rows[r]->class_label != gts[g].track->class_label) break;
        if (geometry::iou2d(gts[g].box, rows[r]->box_end) >=
            params.iou_threshold) {
          gt_match[g] = int(r);
          row_used[r] = 1;
        }
        break;
      }
    }

    // Optimal matching on the remainder, gated and class-checked.
    std::vector<std::size_t> free_gt, free_row;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gt_match[g] < 0) free_gt.push_back(g);
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!row_used[r]) free_row.push_back(r);
    }
    if (!free_gt.empty() && !free_row.empty()) {
      assign::CostMatrix m;
      m.num_tracks = free_gt.size();
      m.num_detections = free_row.size();
      const std::size_t n = m.size();
      m.entries.assign(n * n, assign::kInfeasible);
      for (std::size_t a = 0; a < free_gt.size(); ++a) {
        for (std::size_t b = 0; b < free_row.size(); ++b) {
          const GtBox& gt = gts[free_gt[a]];
          const tracking::TrackRecord& row = *rows[free_row[b]];
          if (row.class_label != gt.track->class_label) continue;
          const double iou = geometry::iou2d(gt.box, row.box_end);
          if (iou < params.iou_threshold) continue;
          m.at(a, b) = 1.0 - iou;
        }
        m.at(a, free_row.size() + a) = 2.0;  // leave this gt unmatched
      }
      for (std::size_t b = 0; b < free_row.size(); ++b) {
        m.at(free_gt.size() + b, b) = 2.0;  // leave this track unmatched
        for (std::size_t a = 0; a < free_gt.size(); ++a) {
          m.at(free_gt.size() + b, free_row.size() + a) = 0.0;
        }
      }
      const assign::AssignmentSolution sol = assign::solve_optimal(m);
      for (std::size_t a = 0; a < free_gt.size(); ++a) {
        const int col = sol.row_to_col[a];
        if (col >= 0 && std::size_t(col) < free_row.size()) {
          gt_match[free_gt[a]] = int(free_row[std::size_t(col)]);
          row_used[free_row[std::size_t(col)]] = 1;
        }
      }
    }

    // Accumulate counts.
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const GtBox& gt = gts[g];
      const std::string cls = model::to_string(gt.track->class_label);
      const bool near = gt.box.center().norm() <= params.near_radius;
      Counts& near_far = near ? report.near : report.far;
      report.total.gt_count += 1;
      report.per_class[cls].gt_count += 1;
      near_far.gt_count += 1;

      if (gt_match[g] < 0) {
        report.total.fn += 1;
        report.per_class[cls].fn += 1;
        near_far.fn += 1;
        continue;
      }
      const tracking::TrackRecord& row = *rows[std::size_t(gt_match[g])];
      const double err = center_distance(gt.box, row.box_end);
      report.total.matches += 1;
      report.total.center_error_sum += err;
      report.per_class[cls].matches += 1;
      report.per_class[cls].center_error_sum += err;
      near_far.matches += 1;
      near_far.center_error_sum += err;

      begin_error_sum += center_distance(gt.begin_box, row.box_begin);
      begin_error_count += 1;

      auto prev = carry.find(gt.track->track_id);
      if (prev != carry.end() && prev->second != row.track_id) {
        report.total.id_switches += 1;
        report.per_class[cls].id_switches += 1;
        near_far.id_switches += 1;
      }
      carry[gt.track->track_id] = row.track_id;
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (row_used[r]) continue;
      const std::string cls = model::to_string(rows[r]->class_label);
      const bool near = rows[r]->box_end.center().norm() <= params.near_radius;
      report.total.fp += 1;
      report.per_class[cls].fp += 1;
      (near ? report.near : report.far).fp += 1;
    }
  }

  report.begin_center_error_mean =
      begin_error_count == 0 ? 0.0 : begin_error_sum / begin_error_count;
  return report;
}

namespace {

void print_row(std::ostringstream& os, const std::string& name,
               const Counts& c) {
  os << std::left << std::setw(12) << name << std::right << std::setw(8)
     << std::fixed << std::setprecision(4) << c.mota() << std::setw(8)
     << std::setprecision(3) << c.motp() << std::setw(7) << c.fp
     << std::setw(7) << c.fn << std::setw(7) << c.id_switches << std::setw(8)
     << c.gt_count << "\n";
}

}  // namespace

std::string report_table(const MotReport& report) {
  std::ostringstream os;
  os << std::left << std::setw(12) << "scope" << std::right << std::setw(8)
     << "MOTA" << std::setw(8) << "MOTP" << std::setw(7) << "FP"
     << std::setw(7) << "FN" << std::setw(7) << "IDSW" << std::setw(8)
     << "GT" << "\n";
  print_row(os, "total", report.total);
  for (const auto& [cls, counts] : report.per_class) {
    print_row(os, cls, counts);
  }
  print_row(os, "near", report.near);
  print_row(os, "far", report.far);
  os << "begin-center error mean: " << std::setprecision(3)
     << report.begin_center_error_mean << " m over " << report.frames
     << " frames\n";
  return os.str();
}

}  // namespace pairtrack::mot
