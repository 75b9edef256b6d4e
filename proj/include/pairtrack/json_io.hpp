#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pairtrack/detection.hpp"
#include "pairtrack/evaluation.hpp"
#include "pairtrack/simulator.hpp"
#include "pairtrack/sweep_grid.hpp"
#include "pairtrack/tracker.hpp"

namespace pairtrack::io {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- JSON conversions ----

nlohmann::json to_json(const geometry::OrientedBox2D& b);
geometry::OrientedBox2D box_from_json(const nlohmann::json& j);

nlohmann::json to_json(const model::PairedDetection& d);
model::PairedDetection detection_from_json(const nlohmann::json& j);

nlohmann::json to_json(const model::GroundTruthTrack& t);
model::GroundTruthTrack ground_truth_from_json(const nlohmann::json& j);

nlohmann::json to_json(const model::Frame& f);
model::Frame frame_from_json(const nlohmann::json& j);

nlohmann::json to_json(const tracking::TrackRecord& r);
tracking::TrackRecord track_record_from_json(const nlohmann::json& j);

nlohmann::json to_json(const mot::MotReport& report);

nlohmann::json to_json(const sweep::LabelAssignment& assignment,
                       int frame_index);

sim::ScenarioSpec scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const sim::ScenarioSpec& spec);

tracking::TrackerConfig tracker_config_from_json(const nlohmann::json& j);
sweep::PipelineConfig pipeline_config_from_json(const nlohmann::json& j);

// ---- files ----

/// One frame's points with the name of the source object per point
/// (empty string for background).
struct PointFrame {
  int frame_index = 0;
  sweep::SweepPointCloud cloud;
  std::vector<std::string> object;
};

std::vector<model::Frame> read_frames(const std::string& path);
void write_frames(const std::string& path,
                  const std::vector<model::Frame>& frames);

std::vector<tracking::TrackRecord> read_track_log(const std::string& path);
void write_track_log(const std::string& path,
                     const std::vector<tracking::TrackRecord>& log);

std::vector<PointFrame> read_point_clouds(const std::string& path);
void write_point_clouds(const std::string& path,
                        const std::vector<sim::FramePoints>& clouds,
                        const std::vector<std::string>& object_names);

sim::ScenarioSpec read_scenario(const std::string& path);
tracking::TrackerConfig read_tracker_config(const std::string& path);
sweep::PipelineConfig read_pipeline_config(const std::string& path);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace pairtrack::io
