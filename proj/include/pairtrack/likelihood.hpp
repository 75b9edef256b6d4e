#pragma once

#include <optional>

#include "pairtrack/detection.hpp"
#include "pairtrack/geometry.hpp"
#include "pairtrack/track.hpp"

namespace pairtrack::likelihood {

/// Design parameters of the association likelihood models, plus the
/// dimensionless constants that make assignment, miss, birth and false-alarm
/// hypotheses comparable in one cost matrix.
struct LikelihoodParams {
  double lambda0 = 0.3;       // IOU threshold for the static model
  double sigma_lambda = 0.2;  // std-dev of 1 - lambda
  double sigma_t = 0.1;       // std-dev of lambda - lambda_t
  double sigma_l = 0.5;       // std-dev of lateral deviation, meters
  double log_miss = -2.302585092994046;   // log(1 - P_D), P_D = 0.9
  double log_birth = -2.995732273553991;  // log birth intensity constant
  double log_false = -5.298317366548036;  // log clutter density constant
  double min_axis_length = 0.25;  // meters; shorter baselines are degenerate
  double log_assoc = 0.0;  // dimensionless constant added to pair scores
  double birth_flag_log_bonus = 0.0;  // added to log_birth when flagged
};

enum class ScoreModel { StaticIOU, MovingProjection, Incompatible };

const char* to_string(ScoreModel m);

struct ScoreDiagnostics {
  double lambda = 0.0;
  double lambda_t = 0.0;
  double lateral_max = 0.0;
};

struct AssociationScore {
  double log_likelihood = 0.0;
  ScoreModel model_used = ScoreModel::StaticIOU;
  std::optional<ScoreDiagnostics> diagnostics;
};

/// Log-density of N(0, sigma^2) at x.
double log_normal_pdf(double x, double sigma);

/// Static/slow model: lambda = iou2d of the two boxes; applicable when
/// lambda >= lambda0 (inclusive). Returns nullopt otherwise so the caller
/// can fall through to the moving model.
std::optional<AssociationScore> score_static(
    const geometry::OrientedBox2D& track_box,
    const geometry::OrientedBox2D& det_box, const LikelihoodParams& params);

/// A box with its global time (frame clock units).
struct TimedBox {
  geometry::OrientedBox2D box;
  double time = 0.0;
};

/// Moving-object model: projects the inner pair of box centers onto the
/// axis through the track's begin center and the detection's end center,
/// compares the 1D along-axis IOU against the temporal IOU, and penalizes
/// the maximum lateral deviation. Returns nullopt when the axis baseline is
/// shorter than min_axis_length or the time span is not positive.
std::optional<AssociationScore> score_moving(const TimedBox& track_begin,
                                             const TimedBox& track_end,
                                             const TimedBox& det_begin,
                                             const TimedBox& det_end,
                                             const LikelihoodParams& params);

/// Dispatch: class mismatch is Incompatible; otherwise the static model is
/// tried on the closest-in-time box pair, then the moving model, and a
/// degenerate axis falls back to the static model with the threshold waived.
/// `det_frame_index` re-indexes the detection's sweep times onto the global
/// frame clock shared with the track history.
AssociationScore score_pair(const tracking::Track& track,
                            const model::PairedDetection& det,
                            int det_frame_index,
                            const LikelihoodParams& params);

}  // namespace pairtrack::likelihood
