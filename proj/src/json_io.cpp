#include "pairtrack/json_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace pairtrack::io {

using nlohmann::json;

nlohmann::json to_json(const geometry::OrientedBox2D& b) {
  return {{"cx", b.cx},
          {"cy", b.cy},
          {"length", b.length},
          {"width", b.width},
          {"heading", b.heading}};
}

geometry::OrientedBox2D box_from_json(const json& j) {
  geometry::OrientedBox2D b;
  b.cx = j.at("cx").get<double>();
  b.cy = j.at("cy").get<double>();
  b.length = j.at("length").get<double>();
  b.width = j.at("width").get<double>();
  b.heading = geometry::normalize_heading(j.at("heading").get<double>());
  if (!geometry::is_valid(b)) throw IoError("invalid box in input");
  return b;
}

nlohmann::json to_json(const model::PairedDetection& d) {
  return {{"id", d.id},
          {"class_label", model::to_string(d.class_label)},
          {"box_end", to_json(d.box_end)},
          {"box_begin", to_json(d.box_begin)},
          {"shared_height", d.shared_height},
          {"shared_z", d.shared_z},
          {"t_b", d.t_b},
          {"t_e", d.t_e},
          {"birth_flag", d.birth_flag},
          {"death_flag", d.death_flag},
          {"confidence", d.confidence}};
}

model::PairedDetection detection_from_json(const json& j) {
  model::PairedDetection d;
  d.id = j.at("id").get<std::string>();
  d.class_label = model::class_from_string(j.at("class_label"));
  d.box_end = box_from_json(j.at("box_end"));
  d.box_begin = box_from_json(j.at("box_begin"));
  d.shared_height = j.at("shared_height").get<double>();
  d.shared_z = j.at("shared_z").get<double>();
  d.t_b = j.at("t_b").get<int>();
  d.t_e = j.at("t_e").get<int>();
  d.birth_flag = j.at("birth_flag").get<bool>();
  d.death_flag = j.at("death_flag").get<bool>();
  d.confidence = j.at("confidence").get<double>();
  model::validate_detection(d);
  return d;
}

nlohmann::json to_json(const model::GroundTruthTrack& t) {
  json presence = json::object();
  for (const auto& [sweep, pose] : t.presence) {
    presence[std::to_string(sweep)] = {
        {"box", to_json(pose.box)}, {"z", pose.z}, {"height", pose.height}};
  }
  return {{"track_id", t.track_id},
          {"class_label", model::to_string(t.class_label)},
          {"presence", presence}};
}

model::GroundTruthTrack ground_truth_from_json(const json& j) {
  model::GroundTruthTrack t;
  t.track_id = j.at("track_id").get<std::string>();
  t.class_label = model::class_from_string(j.at("class_label"));
  for (const auto& [key, pose] : j.at("presence").items()) {
    model::GroundTruthPose p;
    p.box = box_from_json(pose.at("box"));
    p.z = pose.at("z").get<double>();
    p.height = pose.at("height").get<double>();
    t.presence[std::stoi(key)] = p;
  }
  if (t.presence.empty()) throw IoError("ground truth without presence");
  return t;
}

nlohmann::json to_json(const model::Frame& f) {
  json dets = json::array();
  for (const auto& d : f.detections) dets.push_back(to_json(d));
  json j = {{"frame_index", f.frame_index},
            {"timestamp", f.timestamp},
            {"detections", dets}};
  if (!f.ground_truth.empty()) {
    json gt = json::array();
    for (const auto& t : f.ground_truth) gt.push_back(to_json(t));
    j["ground_truth"] = gt;
  }
  return j;
}

model::Frame frame_from_json(const json& j) {
  model::Frame f;
  f.frame_index = j.at("frame_index").get<int>();
  f.timestamp = j.at("timestamp").get<double>();
  std::set<std::string> ids;
  for (const auto& d : j.at("detections")) {
    f.detections.push_back(detection_from_json(d));
    if (!ids.insert(f.detections.back().id).second) {
      throw IoError("duplicate detection id in frame " +
                    std::to_string(f.frame_index));
    }
  }
  if (j.contains("ground_truth")) {
    for (const auto& t : j.at("ground_truth")) {
      f.ground_truth.push_back(ground_truth_from_json(t));
    }
  }
  return f;
}

nlohmann::json to_json(const tracking::TrackRecord& r) {
  return {{"frame_index", r.frame_index},
          {"track_id", r.track_id},
          {"class_label", model::to_string(r.class_label)},
          {"status", tracking::to_string(r.status)},
          {"box_end", to_json(r.box_end)},
          {"box_begin", to_json(r.box_begin)}};
}

tracking::TrackRecord track_record_from_json(const json& j) {
  tracking::TrackRecord r;
  r.frame_index = j.at("frame_index").get<int>();
  r.track_id = j.at("track_id").get<std::int64_t>();
  r.class_label = model::class_from_string(j.at("class_label"));
  const std::string status = j.at("status").get<std::string>();
  r.status = status == "Confirmed" ? tracking::TrackStatus::Confirmed
                                   : tracking::TrackStatus::Tentative;
  r.box_end = box_from_json(j.at("box_end"));
  r.box_begin = box_from_json(j.at("box_begin"));
  return r;
}

namespace {

json counts_to_json(const mot::Counts& c) {
  return {{"mota", c.mota()},   {"motp", c.motp()},
          {"fp", c.fp},         {"fn", c.fn},
          {"id_switches", c.id_switches}, {"gt_count", c.gt_count},
          {"matches", c.matches}};
}

}  // namespace

nlohmann::json to_json(const mot::MotReport& report) {
  json per_class = json::object();
  for (const auto& [cls, counts] : report.per_class) {
    per_class[cls] = counts_to_json(counts);
  }
  json j = counts_to_json(report.total);
  j["per_class"] = per_class;
  j["near"] = counts_to_json(report.near);
  j["far"] = counts_to_json(report.far);
  j["begin_center_error_mean"] = report.begin_center_error_mean;
  j["frames"] = report.frames;
  return j;
}

nlohmann::json to_json(const sweep::LabelAssignment& assignment,
                       int frame_index) {
  json reps = json::array();
  for (const auto& r : assignment.representatives) {
    reps.push_back({r.x, r.y});
  }
  json positives = json::array();
  for (const auto& p : assignment.positives) {
    positives.push_back(
        {{"cell", {p.cell.x, p.cell.y}},
         {"representative", {p.representative.x, p.representative.y}},
         {"track_id", p.target.track_id},
         {"class_label", model::to_string(p.target.class_label)},
         {"box_end", to_json(p.target.box_end)},
         {"box_begin", to_json(p.target.box_begin)},
         {"z", p.target.z},
         {"height", p.target.height},
         {"t_b", p.target.times.t_b},
         {"t_e", p.target.times.t_e},
         {"birth_flag", p.target.times.birth_flag},
         {"death_flag", p.target.times.death_flag}});
  }
  return {{"frame_index", frame_index},
          {"representatives", reps},
          {"positives", positives},
          {"unassigned", assignment.unassigned}};
}

namespace {

sim::MotionSpec motion_from_json(const json& j) {
  sim::MotionSpec m;
  const std::string type = j.value("type", std::string("Static"));
  if (type == "Static") {
    m.type = sim::MotionType::Static;
  } else if (type == "ConstVelocity") {
    m.type = sim::MotionType::ConstVelocity;
  } else if (type == "ConstTurn") {
    m.type = sim::MotionType::ConstTurn;
  } else {
    throw sim::InvalidSpec("unknown motion type: " + type);
  }
  m.speed = j.value("speed", 0.0);
  m.yaw_rate = j.value("yaw_rate", 0.0);
  return m;
}

json motion_to_json(const sim::MotionSpec& m) {
  const char* type = m.type == sim::MotionType::Static ? "Static"
                     : m.type == sim::MotionType::ConstVelocity
                         ? "ConstVelocity"
                         : "ConstTurn";
  return {{"type", type}, {"speed", m.speed}, {"yaw_rate", m.yaw_rate}};
}

}  // namespace

sim::ScenarioSpec scenario_from_json(const json& j) {
  sim::ScenarioSpec spec;
  spec.name = j.value("name", std::string("scenario"));
  spec.duration_frames = j.at("duration_frames").get<int>();
  spec.frame_rate = j.value("frame_rate", 10.0);
  spec.seed = j.value("seed", std::uint64_t(1));
  for (const auto& o : j.value("objects", json::array())) {
    sim::ObjectSpec obj;
    obj.name = o.at("name").get<std::string>();
    obj.class_label = model::class_from_string(o.at("class_label"));
    obj.length = o.at("length").get<double>();
    obj.width = o.at("width").get<double>();
    obj.height = o.value("height", 1.6);
    obj.z = o.value("z", obj.height / 2.0);
    if (o.contains("initial_pose")) {
      const auto& p = o.at("initial_pose");
      obj.initial = {p.value("x", 0.0), p.value("y", 0.0),
                     p.value("heading", 0.0)};
    }
    if (o.contains("motion")) obj.motion = motion_from_json(o.at("motion"));
    obj.birth_frame = o.value("birth_frame", model::kBufferBegin);
    obj.death_frame = o.value("death_frame", 1 << 30);
    for (const auto& occ : o.value("occlusions", json::array())) {
      obj.occlusions.push_back({occ.at(0).get<int>(), occ.at(1).get<int>()});
    }
    spec.objects.push_back(std::move(obj));
  }
  if (j.contains("sensor")) {
    const auto& s = j.at("sensor");
    spec.sensor.detection_probability = s.value("detection_probability", 1.0);
    spec.sensor.center_noise = s.value("center_noise", 0.0);
    spec.sensor.heading_noise = s.value("heading_noise", 0.0);
    spec.sensor.clutter_rate = s.value("clutter_rate", 0.0);
    if (s.contains("clutter_region")) {
      const auto& r = s.at("clutter_region");
      spec.sensor.clutter_region = {r.at(0).get<double>(),
                                    r.at(1).get<double>(),
                                    r.at(2).get<double>(),
                                    r.at(3).get<double>()};
    }
  }
  if (j.contains("point_cloud")) {
    const auto& p = j.at("point_cloud");
    spec.point_cloud.enabled = p.value("enabled", false);
    spec.point_cloud.points_per_object_per_sweep =
        p.value("points_per_object_per_sweep", 100);
    spec.point_cloud.background_points_per_sweep =
        p.value("background_points_per_sweep", 0);
    if (p.contains("region")) {
      const auto& r = p.at("region");
      spec.point_cloud.region = {r.at(0).get<double>(), r.at(1).get<double>(),
                                 r.at(2).get<double>(), r.at(3).get<double>()};
    }
  }
  return spec;
}

nlohmann::json to_json(const sim::ScenarioSpec& spec) {
  json objects = json::array();
  for (const auto& o : spec.objects) {
    json occ = json::array();
    for (const auto& iv : o.occlusions) occ.push_back({iv[0], iv[1]});
    objects.push_back({{"name", o.name},
                       {"class_label", model::to_string(o.class_label)},
                       {"length", o.length},
                       {"width", o.width},
                       {"height", o.height},
                       {"z", o.z},
                       {"initial_pose",
                        {{"x", o.initial.x},
                         {"y", o.initial.y},
                         {"heading", o.initial.heading}}},
                       {"motion", motion_to_json(o.motion)},
                       {"birth_frame", o.birth_frame},
                       {"death_frame", o.death_frame},
                       {"occlusions", occ}});
  }
  return {{"name", spec.name},
          {"duration_frames", spec.duration_frames},
          {"frame_rate", spec.frame_rate},
          {"seed", spec.seed},
          {"objects", objects},
          {"sensor",
           {{"detection_probability", spec.sensor.detection_probability},
            {"center_noise", spec.sensor.center_noise},
            {"heading_noise", spec.sensor.heading_noise},
            {"clutter_rate", spec.sensor.clutter_rate},
            {"clutter_region", spec.sensor.clutter_region}}},
          {"point_cloud",
           {{"enabled", spec.point_cloud.enabled},
            {"points_per_object_per_sweep",
             spec.point_cloud.points_per_object_per_sweep},
            {"background_points_per_sweep",
             spec.point_cloud.background_points_per_sweep},
            {"region", spec.point_cloud.region}}}};
}

tracking::TrackerConfig tracker_config_from_json(const json& j) {
  tracking::TrackerConfig c;
  c.hypothesis_budget = j.value("hypothesis_budget", 1);
  c.kbest_per_parent = j.value("kbest_per_parent", 3);
  c.confirm_hits = j.value("confirm_hits", 2);
  c.max_miss = j.value("max_miss", 3);
  c.history_capacity = j.value("history_capacity", 6);
  c.record_pedigree = j.value("record_pedigree", false);
  if (j.contains("likelihood")) {
    const auto& l = j.at("likelihood");
    likelihood::LikelihoodParams& p = c.likelihood;
    p.lambda0 = l.value("lambda0", p.lambda0);
    p.sigma_lambda = l.value("sigma_lambda", p.sigma_lambda);
    p.sigma_t = l.value("sigma_t", p.sigma_t);
    p.sigma_l = l.value("sigma_l", p.sigma_l);
    p.log_miss = l.value("log_miss", p.log_miss);
    p.log_birth = l.value("log_birth", p.log_birth);
    p.log_false = l.value("log_false", p.log_false);
    p.min_axis_length = l.value("min_axis_length", p.min_axis_length);
    p.log_assoc = l.value("log_assoc", p.log_assoc);
    p.birth_flag_log_bonus =
        l.value("birth_flag_log_bonus", p.birth_flag_log_bonus);
  }
  tracking::validate_config(c);
  return c;
}

sweep::PipelineConfig pipeline_config_from_json(const json& j) {
  sweep::PipelineConfig c;
  if (j.contains("voxel")) {
    const auto& v = j.at("voxel");
    c.voxel.voxel_size_xy = v.value("voxel_size_xy", c.voxel.voxel_size_xy);
    c.voxel.voxel_size_z = v.value("voxel_size_z", c.voxel.voxel_size_z);
    c.voxel.max_points = v.value("max_points", c.voxel.max_points);
    c.voxel.seed = v.value("seed", c.voxel.seed);
  }
  if (j.contains("stages")) {
    const auto& stages = j.at("stages");
    if (stages.size() != c.stages.size()) {
      throw IoError("pipeline config needs exactly 6 stages (2..7)");
    }
    for (std::size_t i = 0; i < c.stages.size(); ++i) {
      const auto& s = stages[i];
      sweep::StageConfig& sc = c.stages[i];
      if (s.contains("mode")) {
        sc.mode = sweep::propagation_mode_from_string(s.at("mode"));
      }
      sc.kernel_extent = s.value("kernel_extent", sc.kernel_extent);
      sc.stride = s.value("stride", sc.stride);
      sc.feature_dim = s.value("feature_dim", sc.feature_dim);
    }
  }
  const std::string anchor = j.value("anchor_strategy", std::string("midpoint"));
  if (anchor == "midpoint") {
    c.anchor_strategy = sweep::AnchorStrategy::Midpoint;
  } else if (anchor == "nearest_corner") {
    c.anchor_strategy = sweep::AnchorStrategy::NearestCorner;
  } else {
    throw IoError("unknown anchor strategy: " + anchor);
  }
  return c;
}

namespace {

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<json> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      lines.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw IoError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return lines;
}

}  // namespace

std::vector<model::Frame> read_frames(const std::string& path) {
  std::vector<model::Frame> frames;
  try {
    for (const json& j : read_jsonl(path)) {
      frames.push_back(frame_from_json(j));
    }
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  return frames;
}

void write_frames(const std::string& path,
                  const std::vector<model::Frame>& frames) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (const model::Frame& f : frames) out << to_json(f).dump() << "\n";
}

std::vector<tracking::TrackRecord> read_track_log(const std::string& path) {
  std::vector<tracking::TrackRecord> log;
  try {
    for (const json& j : read_jsonl(path)) {
      log.push_back(track_record_from_json(j));
    }
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  return log;
}

void write_track_log(const std::string& path,
                     const std::vector<tracking::TrackRecord>& log) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& r : log) out << to_json(r).dump() << "\n";
}

std::vector<PointFrame> read_point_clouds(const std::string& path) {
  std::vector<PointFrame> frames;
  try {
    for (const json& j : read_jsonl(path)) {
      PointFrame pf;
      pf.frame_index = j.at("frame_index").get<int>();
      for (const json& p : j.at("points")) {
        sweep::SweepPoint pt;
        pt.x = p.at("x").get<double>();
        pt.y = p.at("y").get<double>();
        pt.z = p.at("z").get<double>();
        pt.sweep_index = p.at("sweep_index").get<int>();
        pt.intensity = p.value("intensity", 0.0);
        pf.cloud.points.push_back(pt);
        pf.object.push_back(p.value("object", std::string()));
      }
      frames.push_back(std::move(pf));
    }
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  return frames;
}

void write_point_clouds(const std::string& path,
                        const std::vector<sim::FramePoints>& clouds,
                        const std::vector<std::string>& object_names) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (const sim::FramePoints& fp : clouds) {
    json points = json::array();
    for (std::size_t i = 0; i < fp.cloud.points.size(); ++i) {
      const sweep::SweepPoint& p = fp.cloud.points[i];
      json jp = {{"x", p.x},
                 {"y", p.y},
                 {"z", p.z},
                 {"sweep_index", p.sweep_index},
                 {"intensity", p.intensity}};
      const int oi = fp.object_index[i];
      if (oi >= 0 && std::size_t(oi) < object_names.size()) {
        jp["object"] = object_names[std::size_t(oi)];
      }
      points.push_back(std::move(jp));
    }
    out << json{{"frame_index", fp.frame_index}, {"points", points}}.dump()
        << "\n";
  }
}

sim::ScenarioSpec read_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    json j;
    in >> j;
    sim::ScenarioSpec spec = scenario_from_json(j);
    sim::validate_spec(spec);
    return spec;
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

tracking::TrackerConfig read_tracker_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    json j;
    in >> j;
    return tracker_config_from_json(j);
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

sweep::PipelineConfig read_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    json j;
    in >> j;
    return pipeline_config_from_json(j);
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace pairtrack::io
