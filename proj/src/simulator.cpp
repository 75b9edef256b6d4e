#include "pairtrack/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pairtrack::sim {

namespace {

// Distributions are hand-rolled on top of mt19937_64 so that output streams
// are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return double(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal(double sigma) {
    // Box-Muller, first value only; consumes two uniforms per draw.
    const double u1 = std::max(uniform(), 1e-300);
    const double u2 = uniform();
    return sigma * std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * geometry::kPi * u2);
  }

  int poisson(double rate) {
    // Inversion by sequential search; fine for small rates.
    if (rate <= 0.0) return 0;
    const double l = std::exp(-rate);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > l);
    return k - 1;
  }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + int(uniform() * double(hi - lo + 1));
  }

 private:
  std::mt19937_64 eng_;
};

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a + 0x9e3779b97f4a7c15ull * (b + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kDetectionStream = 0xd37ec7;
constexpr std::uint64_t kPointStream = 0x907145;

}  // namespace

void validate_spec(const ScenarioSpec& spec) {
  if (spec.duration_frames < 1) throw InvalidSpec("duration must be >= 1");
  if (spec.frame_rate <= 0.0) throw InvalidSpec("frame rate must be > 0");
  if (spec.sensor.detection_probability < 0.0 ||
      spec.sensor.detection_probability > 1.0) {
    throw InvalidSpec("detection probability outside [0, 1]");
  }
  if (spec.sensor.center_noise < 0.0 || spec.sensor.heading_noise < 0.0 ||
      spec.sensor.clutter_rate < 0.0) {
    throw InvalidSpec("noise parameters must be non-negative");
  }
  for (const ObjectSpec& obj : spec.objects) {
    if (obj.name.empty()) throw InvalidSpec("object without a name");
    if (obj.length <= 0.0 || obj.width <= 0.0 || obj.height <= 0.0) {
      throw InvalidSpec("object " + obj.name + ": non-positive extent");
    }
    if (obj.birth_frame >= obj.death_frame) {
      throw InvalidSpec("object " + obj.name + ": birth after death");
    }
    if (obj.death_frame > spec.duration_frames &&
        obj.death_frame != (1 << 30)) {
      throw InvalidSpec("object " + obj.name + ": death after duration");
    }
    for (const auto& occ : obj.occlusions) {
      if (occ[0] >= occ[1]) {
        throw InvalidSpec("object " + obj.name + ": empty occlusion");
      }
    }
  }
}

Pose pose_at(const ObjectSpec& obj, double time_s) {
  const Pose& p0 = obj.initial;
  switch (obj.motion.type) {
    case MotionType::Static:
      return p0;
    case MotionType::ConstVelocity: {
      return {p0.x + obj.motion.speed * time_s * std::cos(p0.heading),
              p0.y + obj.motion.speed * time_s * std::sin(p0.heading),
              p0.heading};
    }
    case MotionType::ConstTurn: {
      const double w = obj.motion.yaw_rate;
      const double v = obj.motion.speed;
      if (std::abs(w) < 1e-12) {
        return {p0.x + v * time_s * std::cos(p0.heading),
                p0.y + v * time_s * std::sin(p0.heading), p0.heading};
      }
      const double h1 = p0.heading + w * time_s;
      return {p0.x + (v / w) * (std::sin(h1) - std::sin(p0.heading)),
              p0.y + (v / w) * (std::cos(p0.heading) - std::cos(h1)),
              geometry::normalize_heading(h1)};
    }
  }
  return p0;
}

bool visible_at(const ObjectSpec& obj, int global_sweep) {
  if (global_sweep < obj.birth_frame || global_sweep >= obj.death_frame) {
    return false;
  }
  for (const auto& occ : obj.occlusions) {
    if (global_sweep >= occ[0] && global_sweep < occ[1]) return false;
  }
  return true;
}

namespace {

geometry::OrientedBox2D box_at(const ObjectSpec& obj, const Pose& pose) {
  return {pose.x, pose.y, obj.length, obj.width,
          geometry::normalize_heading(pose.heading)};
}

/// Ground-truth slice of one object over the frame's buffer. Presence is
/// filled contiguously from the first to the last visible sweep; gaps inside
/// the range are treated as if the object had been seen throughout.
bool ground_truth_slice(const ScenarioSpec& spec, const ObjectSpec& obj,
                        int frame, model::GroundTruthTrack& out) {
  bool any = false;
  int first = 0, last = 0;
  for (int s = frame + model::kBufferBegin; s <= frame; ++s) {
    if (!visible_at(obj, s)) continue;
    if (!any) first = s;
    last = s;
    any = true;
  }
  if (!any) return false;

  out.track_id = obj.name;
  out.class_label = obj.class_label;
  out.presence.clear();
  for (int s = first; s <= last; ++s) {
    const Pose pose = pose_at(obj, double(s) / spec.frame_rate);
    out.presence[s - frame] = {box_at(obj, pose), obj.z, obj.height};
  }
  return true;
}

}  // namespace

SimOutput simulate(const ScenarioSpec& spec) {
  validate_spec(spec);
  SimOutput out;
  out.frames.reserve(std::size_t(spec.duration_frames));

  for (int f = 0; f < spec.duration_frames; ++f) {
    Rng rng(mix(spec.seed, mix(kDetectionStream, std::uint64_t(f))));
    model::Frame frame;
    frame.frame_index = f;
    frame.timestamp = double(f) / spec.frame_rate;

    for (const ObjectSpec& obj : spec.objects) {
      model::GroundTruthTrack gt;
      if (!ground_truth_slice(spec, obj, f, gt)) continue;
      frame.ground_truth.push_back(gt);

      const double u_keep = rng.uniform();
      const model::TimeTargets targets = model::derive_time_targets(gt);

      model::PairedDetection det;
      det.class_label = obj.class_label;
      det.t_b = targets.t_b;
      det.t_e = targets.t_e;
      det.birth_flag = targets.birth_flag;
      det.death_flag = targets.death_flag;
      det.shared_height = obj.height;
      det.shared_z = obj.z;
      det.box_end = gt.presence.at(targets.t_e).box;
      det.box_begin = gt.presence.at(targets.t_b).box;

      const double nx = rng.normal(spec.sensor.center_noise);
      const double ny = rng.normal(spec.sensor.center_noise);
      const double nh = rng.normal(spec.sensor.heading_noise);
      det.box_end.cx += nx;
      det.box_end.cy += ny;
      det.box_end.heading =
          geometry::normalize_heading(det.box_end.heading + nh);
      if (targets.t_b != targets.t_e) {
        det.box_begin.cx += rng.normal(spec.sensor.center_noise);
        det.box_begin.cy += rng.normal(spec.sensor.center_noise);
        det.box_begin.heading = geometry::normalize_heading(
            det.box_begin.heading + rng.normal(spec.sensor.heading_noise));
      } else {
        det.box_begin = det.box_end;  // singleton pair stays identical
      }

      if (spec.sensor.center_noise > 0.0) {
        const double mag = std::hypot(nx, ny);
        det.confidence = std::clamp(
            1.0 - mag / (3.0 * spec.sensor.center_noise), 0.05, 0.99);
      } else {
        det.confidence = 0.99;
      }

      if (u_keep < spec.sensor.detection_probability) {
        det.id = "d" + std::to_string(f) + "_" +
                 std::to_string(frame.detections.size());
        model::validate_detection(det);
        frame.detections.push_back(std::move(det));
      }
    }

    const int clutter = rng.poisson(spec.sensor.clutter_rate);
    for (int c = 0; c < clutter; ++c) {
      const auto& region = spec.sensor.clutter_region;
      model::PairedDetection det;
      det.id = "d" + std::to_string(f) + "_" +
               std::to_string(frame.detections.size());
      const double x = rng.uniform(region[0], region[2]);
      const double y = rng.uniform(region[1], region[3]);
      const double heading =
          geometry::normalize_heading(rng.uniform(-geometry::kPi,
                                                  geometry::kPi));
      const double length = rng.uniform(0.5, 5.0);
      const double width = rng.uniform(0.3, 2.5);
      const int sweep = rng.uniform_int(model::kBufferBegin + 1, -1);
      const int cls = rng.uniform_int(0, 2);
      det.class_label = model::ClassLabel(cls);
      det.box_end = {x, y, length, width, heading};
      det.box_begin = det.box_end;
      det.t_b = sweep;
      det.t_e = sweep;
      det.birth_flag = true;  // case (e) signature: singleton mid-buffer
      det.death_flag = true;
      det.shared_height = rng.uniform(0.5, 2.0);
      det.shared_z = det.shared_height / 2.0;
      det.confidence = rng.uniform(0.05, 0.5);
      model::validate_detection(det);
      frame.detections.push_back(std::move(det));
    }

    out.frames.push_back(std::move(frame));
  }

  if (spec.point_cloud.enabled) {
    out.point_clouds.reserve(out.frames.size());
    for (int f = 0; f < spec.duration_frames; ++f) {
      out.point_clouds.push_back(synthesize_points(spec, f));
    }
  }
  return out;
}

FramePoints synthesize_points(const ScenarioSpec& spec, int frame_index) {
  Rng rng(mix(spec.seed, mix(kPointStream, std::uint64_t(frame_index))));
  FramePoints out;
  out.frame_index = frame_index;

  for (int s = frame_index + model::kBufferBegin; s <= frame_index; ++s) {
    const int sweep_index = s - frame_index;
    for (std::size_t oi = 0; oi < spec.objects.size(); ++oi) {
      const ObjectSpec& obj = spec.objects[oi];
      if (!visible_at(obj, s)) continue;
      const Pose pose = pose_at(obj, double(s) / spec.frame_rate);
      const double cos_h = std::cos(pose.heading);
      const double sin_h = std::sin(pose.heading);
      const double half_perim = obj.length + obj.width;
      for (int p = 0; p < spec.point_cloud.points_per_object_per_sweep; ++p) {
        // Uniform position on the box perimeter, in local coordinates.
        double t = rng.uniform() * 2.0 * half_perim;
        double lx, ly;
        if (t < obj.length) {
          lx = t - obj.length / 2.0;
          ly = -obj.width / 2.0;
        } else if (t < half_perim) {
          lx = obj.length / 2.0;
          ly = (t - obj.length) - obj.width / 2.0;
        } else if (t < half_perim + obj.length) {
          lx = (t - half_perim) - obj.length / 2.0;
          ly = obj.width / 2.0;
        } else {
          lx = -obj.length / 2.0;
          ly = (t - half_perim - obj.length) - obj.width / 2.0;
        }
        sweep::SweepPoint pt;
        pt.x = pose.x + cos_h * lx - sin_h * ly;
        pt.y = pose.y + sin_h * lx + cos_h * ly;
        pt.z = obj.z + (rng.uniform() - 0.5) * obj.height;
        pt.sweep_index = sweep_index;
        pt.intensity = rng.uniform();
        out.cloud.points.push_back(pt);
        out.object_index.push_back(int(oi));
      }
    }
    for (int p = 0; p < spec.point_cloud.background_points_per_sweep; ++p) {
      const auto& region = spec.point_cloud.region;
      sweep::SweepPoint pt;
      pt.x = rng.uniform(region[0], region[2]);
      pt.y = rng.uniform(region[1], region[3]);
      pt.z = rng.uniform(-0.3, 2.5);
      pt.sweep_index = sweep_index;
      pt.intensity = rng.uniform();
      out.cloud.points.push_back(pt);
      out.object_index.push_back(-1);
    }
  }
  return out;
}

}  // namespace pairtrack::sim
