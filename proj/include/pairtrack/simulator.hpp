#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pairtrack/detection.hpp"
#include "pairtrack/sweep_grid.hpp"

namespace pairtrack::sim {

enum class MotionType { Static, ConstVelocity, ConstTurn };

struct MotionSpec {
  MotionType type = MotionType::Static;
  double speed = 0.0;     // m/s, along the heading
  double yaw_rate = 0.0;  // rad/s, ConstTurn only
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

struct ObjectSpec {
  std::string name;
  model::ClassLabel class_label = model::ClassLabel::Vehicle;
  double length = 4.5;
  double width = 2.0;
  double height = 1.6;
  double z = 0.8;
  Pose initial;
  MotionSpec motion;
  int birth_frame = model::kBufferBegin;  // may be negative (pre-roll)
  int death_frame = 1 << 30;              // first frame no longer alive
  std::vector<std::array<int, 2>> occlusions;  // [start, end) frame intervals
};

struct SensorSpec {
  double detection_probability = 1.0;
  double center_noise = 0.0;   // std-dev, meters, per axis
  double heading_noise = 0.0;  // std-dev, radians
  double clutter_rate = 0.0;   // expected false alarms per frame
  std::array<double, 4> clutter_region = {-50.0, -50.0, 50.0, 50.0};
};

struct PointCloudSpec {
  bool enabled = false;
  int points_per_object_per_sweep = 100;
  int background_points_per_sweep = 0;
  std::array<double, 4> region = {-60.0, -60.0, 60.0, 60.0};
};

struct ScenarioSpec {
  std::string name = "scenario";
  int duration_frames = 0;
  double frame_rate = 10.0;  // Hz
  std::uint64_t seed = 1;
  std::vector<ObjectSpec> objects;
  SensorSpec sensor;
  PointCloudSpec point_cloud;
};

struct InvalidSpec : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void validate_spec(const ScenarioSpec& spec);

/// Point cloud for one frame's buffer with the index of the object each
/// point was sampled from (-1 for background).
struct FramePoints {
  int frame_index = 0;
  sweep::SweepPointCloud cloud;
  std::vector<int> object_index;
};

struct SimOutput {
  std::vector<model::Frame> frames;
  std::vector<FramePoints> point_clouds;  // filled when enabled in the spec
};

/// Object pose at a continuous time in seconds.
Pose pose_at(const ObjectSpec& obj, double time_s);

/// True when the object is alive and not occluded at the given sweep time.
bool visible_at(const ObjectSpec& obj, int global_sweep);

/// Deterministic scenario engine: per frame, every visible object emits a
/// paired detection with begin/end boxes at its poses at t_b and t_e,
/// Gaussian center/heading noise, misses with probability 1 - P_D, and
/// Poisson clutter singletons. All randomness comes from the scenario seed.
SimOutput simulate(const ScenarioSpec& spec);

/// Points sampled on each visible object's box perimeter per sweep, plus
/// uniform background points, all in the buffer-end frame.
FramePoints synthesize_points(const ScenarioSpec& spec, int frame_index);

}  // namespace pairtrack::sim
