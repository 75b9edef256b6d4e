#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "pairtrack/detection.hpp"
#include "pairtrack/geometry.hpp"

namespace pairtrack::sweep {

struct CellIndex {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t z = 0;
  auto operator<=>(const CellIndex&) const = default;
};

struct CellIndexHash {
  std::size_t operator()(const CellIndex& c) const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::uint64_t v : {std::uint64_t(c.x), std::uint64_t(c.y),
                            std::uint64_t(c.z)}) {
      h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return std::size_t(h);
  }
};

using FeatureVector = std::vector<double>;
using PointSet = std::set<std::size_t>;

/// Active integer cells with their feature vectors and, per cell, the set of
/// source point indices reachable through the computation graph.
struct SparseFeatureGrid {
  int stage = 1;
  double cell_size_xy = 0.1;
  double cell_size_z = 0.15;
  bool bev = false;
  std::unordered_map<CellIndex, FeatureVector, CellIndexHash> cells;
  std::unordered_map<CellIndex, PointSet, CellIndexHash> provenance;

  bool empty() const { return cells.empty(); }
  /// Keys in lexicographic order; the deterministic iteration order used by
  /// every aggregation and serialization path.
  std::vector<CellIndex> sorted_cells() const;
};

struct SweepPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  int sweep_index = 0;
  double intensity = 0.0;
};

/// Multi-sweep point buffer, all points in the buffer-end frame.
struct SweepPointCloud {
  std::vector<SweepPoint> points;
  int buffer_begin = model::kBufferBegin;
  int buffer_end = model::kBufferEnd;
};

struct VoxelizeParams {
  double voxel_size_xy = 0.1;
  double voxel_size_z = 0.15;
  int max_points = 30;
  std::uint64_t seed = 0;
};

/// Buckets points into voxels, keeps at most max_points per voxel (random
/// shuffle with the given seed), and stacks the per-sweep means of
/// (x, y, z, sweep, intensity) into one feature of 6 x 5 values. Sweeps with
/// no surviving points contribute zeros. Provenance records the surviving
/// point indices.
SparseFeatureGrid voxelize(const SweepPointCloud& cloud,
                           const VoxelizeParams& params);

enum class PropagationMode { Dilating, Submanifold };

const char* to_string(PropagationMode m);
PropagationMode propagation_mode_from_string(const std::string& s);

/// One sparse stage: the output active set is the strided downsample of the
/// input active set, dilated by the kernel footprint in dilating mode and
/// untouched in submanifold mode. Output features are the sums of the input
/// features inside the kernel window, zero-padded or truncated to
/// out_feature_dim; provenance is the union over the window.
SparseFeatureGrid propagate_stage(const SparseFeatureGrid& grid,
                                  PropagationMode mode, int kernel_extent,
                                  int stride, int out_feature_dim);

struct IncompatibleStrides : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reinterprets every grid onto the first grid's resolution by integral
/// index scaling, summing features of coincident cells and unioning their
/// provenance. Throws IncompatibleStrides when a cell-size ratio is not an
/// integer.
SparseFeatureGrid collect_union(
    const std::vector<const SparseFeatureGrid*>& stages);

/// Collapses a 3D grid onto (x, y) columns; the output feature is the
/// concatenation of the elementwise sum and elementwise max over the column.
SparseFeatureGrid bev_pool(const SparseFeatureGrid& grid);

struct EmptyGrid : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InactiveCell : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The active BEV cell whose center is nearest to y; ties go to the
/// lexicographically smaller index. Throws EmptyGrid.
CellIndex assign_anchor(const SparseFeatureGrid& bev, geometry::Vec2 y);

/// The set of source points with a computation path to the cell.
/// Throws InactiveCell when the cell is not active.
PointSet inverse_neighborhood(const SparseFeatureGrid& grid, CellIndex cell);

// ---- fixed pipeline driver -------------------------------------------------

struct StageConfig {
  PropagationMode mode = PropagationMode::Dilating;
  int kernel_extent = 3;
  int stride = 2;
  int feature_dim = 128;
};

enum class AnchorStrategy { Midpoint, NearestCorner };

struct PipelineConfig {
  VoxelizeParams voxel;
  // Stages 2..7; stages 5..7 keep the stage-4 resolution and widen the
  // receptive field.
  std::array<StageConfig, 6> stages = {
      StageConfig{PropagationMode::Dilating, 3, 2, 32},
      StageConfig{PropagationMode::Dilating, 3, 2, 64},
      StageConfig{PropagationMode::Dilating, 3, 2, 128},
      StageConfig{PropagationMode::Dilating, 7, 1, 128},
      StageConfig{PropagationMode::Dilating, 7, 1, 128},
      StageConfig{PropagationMode::Dilating, 7, 1, 128},
  };
  AnchorStrategy anchor_strategy = AnchorStrategy::Midpoint;
};

struct PipelineResult {
  SparseFeatureGrid bev;                      // union of stages 4..7, pooled
  std::vector<SparseFeatureGrid> stage_grids;  // stages 1..7 when kept
};

PipelineResult run_pipeline(const SweepPointCloud& cloud,
                            const PipelineConfig& config,
                            bool keep_stages = false);

// ---- label assignment -------------------------------------------------

/// Regression payload of one ground-truth object for target generation.
struct ObjectTarget {
  std::string track_id;
  model::ClassLabel class_label = model::ClassLabel::Vehicle;
  geometry::OrientedBox2D box_end;
  geometry::OrientedBox2D box_begin;
  double z = 0.75;
  double height = 1.5;
  model::TimeTargets times;
};

/// Builds the target payload from a ground-truth buffer slice.
ObjectTarget make_object_target(const model::GroundTruthTrack& track,
                                int buffer_begin = model::kBufferBegin,
                                int buffer_end = model::kBufferEnd);

/// The representative point used to anchor an object.
geometry::Vec2 representative_point(const ObjectTarget& target,
                                    AnchorStrategy strategy);

struct PositiveAssignment {
  CellIndex cell;
  geometry::Vec2 representative;
  ObjectTarget target;
};

struct LabelAssignment {
  std::vector<geometry::Vec2> representatives;
  std::vector<PositiveAssignment> positives;
  std::vector<std::string> unassigned;  // objects that lost a cell collision
};

/// One representative per object mapped through assign_anchor. When two
/// objects land on the same cell the nearer representative keeps it and the
/// other is reported unassigned. An empty grid assigns nothing.
LabelAssignment build_label_assignment(
    const SparseFeatureGrid& bev, const std::vector<ObjectTarget>& targets,
    AnchorStrategy strategy = AnchorStrategy::Midpoint);

}  // namespace pairtrack::sweep
