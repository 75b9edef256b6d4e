#include "pairtrack/likelihood.hpp"

#include <cmath>
#include <limits>

namespace pairtrack::likelihood {

namespace {
constexpr double kLogSqrt2Pi = 0.9189385332046727;  // log(sqrt(2*pi))
}

const char* to_string(ScoreModel m) {
  switch (m) {
    case ScoreModel::StaticIOU: return "StaticIOU";
    case ScoreModel::MovingProjection: return "MovingProjection";
    case ScoreModel::Incompatible: return "Incompatible";
  }
  return "Incompatible";
}

double log_normal_pdf(double x, double sigma) {
  const double z = x / sigma;
  return -0.5 * z * z - std::log(sigma) - kLogSqrt2Pi;
}

namespace {

AssociationScore static_score_from_lambda(double lambda,
                                          const LikelihoodParams& params) {
  AssociationScore s;
  s.model_used = ScoreModel::StaticIOU;
  s.log_likelihood =
      log_normal_pdf(1.0 - lambda, params.sigma_lambda) + params.log_assoc;
  s.diagnostics = ScoreDiagnostics{lambda, 0.0, 0.0};
  return s;
}

}  // namespace

std::optional<AssociationScore> score_static(
    const geometry::OrientedBox2D& track_box,
    const geometry::OrientedBox2D& det_box, const LikelihoodParams& params) {
  const double lambda = geometry::iou2d(track_box, det_box);
  if (lambda < params.lambda0) return std::nullopt;
  return static_score_from_lambda(lambda, params);
}

std::optional<AssociationScore> score_moving(const TimedBox& track_begin,
                                             const TimedBox& track_end,
                                             const TimedBox& det_begin,
                                             const TimedBox& det_end,
                                             const LikelihoodParams& params) {
  const geometry::Vec2 a = track_begin.box.center();
  const geometry::Vec2 d = det_end.box.center();
  const double baseline = (d - a).norm();
  const double time_span = det_end.time - track_begin.time;
  if (baseline < params.min_axis_length || time_span <= 0.0) {
    return std::nullopt;
  }

  const auto proj = geometry::project_onto_axis(
      {{track_end.box.center(), 'B'}, {det_begin.box.center(), 'C'}}, a, d);
  const geometry::ProjectedPoint& b = proj.projected_points[0];
  const geometry::ProjectedPoint& c = proj.projected_points[1];

  // Track span [A, B'] against detection span [C', D] along the axis.
  const double lambda = geometry::segment_iou(
      geometry::segment(0.0, b.along), geometry::segment(c.along, baseline));
  const double lambda_t =
      std::abs(track_end.time - det_begin.time) / time_span;
  const double lateral = std::max(b.lateral, c.lateral);

  AssociationScore s;
  s.model_used = ScoreModel::MovingProjection;
  s.log_likelihood = log_normal_pdf(lambda - lambda_t, params.sigma_t) +
                     log_normal_pdf(lateral, params.sigma_l) +
                     params.log_assoc;
  s.diagnostics = ScoreDiagnostics{lambda, lambda_t, lateral};
  return s;
}

AssociationScore score_pair(const tracking::Track& track,
                            const model::PairedDetection& det,
                            int det_frame_index,
                            const LikelihoodParams& params) {
  if (track.class_label != det.class_label || track.history.empty()) {
    return {-std::numeric_limits<double>::infinity(),
            ScoreModel::Incompatible, std::nullopt};
  }

  const tracking::TrackObservation& last = track.history.back();
  const TimedBox trk_begin{last.detection.box_begin,
                           double(last.frame_index + last.detection.t_b)};
  const TimedBox trk_end{last.detection.box_end,
                         double(last.frame_index + last.detection.t_e)};
  const TimedBox det_begin{det.box_begin, double(det_frame_index + det.t_b)};
  const TimedBox det_end{det.box_end, double(det_frame_index + det.t_e)};

  // Closest-in-time box pair; ties prefer the later boxes on both sides.
  const TimedBox* trk_boxes[2] = {&trk_end, &trk_begin};
  const TimedBox* det_boxes[2] = {&det_end, &det_begin};
  const TimedBox* best_trk = trk_boxes[0];
  const TimedBox* best_det = det_boxes[0];
  double best_gap = std::numeric_limits<double>::infinity();
  for (const TimedBox* tb : trk_boxes) {
    for (const TimedBox* db : det_boxes) {
      const double gap = std::abs(tb->time - db->time);
      if (gap < best_gap) {
        best_gap = gap;
        best_trk = tb;
        best_det = db;
      }
    }
  }

  const double lambda = geometry::iou2d(best_trk->box, best_det->box);
  if (lambda >= params.lambda0) {
    return static_score_from_lambda(lambda, params);
  }
  if (auto moving =
          score_moving(trk_begin, trk_end, det_begin, det_end, params)) {
    return *moving;
  }
  // Degenerate axis: the object barely moved, so the static model applies
  // with the threshold waived.
  return static_score_from_lambda(lambda, params);
}

}  // namespace pairtrack::likelihood
