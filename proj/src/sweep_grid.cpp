#include "pairtrack/sweep_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pairtrack::sweep {

namespace {

constexpr int kPointDim = 5;  // x, y, z, relative time, intensity

std::int64_t floor_div_index(double v, double size) {
  return std::int64_t(std::floor(v / size));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic Fisher-Yates driven by splitmix64, independent of map
// iteration order because the stream is seeded per voxel.
void shuffle_indices(std::vector<std::size_t>& idx, std::uint64_t seed) {
  std::uint64_t state = seed;
  for (std::size_t i = idx.size(); i > 1; --i) {
    state = splitmix64(state);
    const std::size_t j = std::size_t(state % i);
    std::swap(idx[i - 1], idx[j]);
  }
}

}  // namespace

std::vector<CellIndex> SparseFeatureGrid::sorted_cells() const {
  std::vector<CellIndex> keys;
  keys.reserve(cells.size());
  for (const auto& [k, v] : cells) {
    (void)v;
    keys.push_back(k);
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

const char* to_string(PropagationMode m) {
  return m == PropagationMode::Dilating ? "dilating" : "submanifold";
}

PropagationMode propagation_mode_from_string(const std::string& s) {
  if (s == "dilating") return PropagationMode::Dilating;
  if (s == "submanifold") return PropagationMode::Submanifold;
  throw std::invalid_argument("unknown propagation mode: " + s);
}

SparseFeatureGrid voxelize(const SweepPointCloud& cloud,
                           const VoxelizeParams& params) {
  if (params.voxel_size_xy <= 0.0 || params.voxel_size_z <= 0.0) {
    throw std::invalid_argument("voxel size must be positive");
  }
  if (params.max_points < 1) {
    throw std::invalid_argument("max_points must be >= 1");
  }

  SparseFeatureGrid grid;
  grid.stage = 1;
  grid.cell_size_xy = params.voxel_size_xy;
  grid.cell_size_z = params.voxel_size_z;

  std::unordered_map<CellIndex, std::vector<std::size_t>, CellIndexHash>
      buckets;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const SweepPoint& p = cloud.points[i];
    if (p.sweep_index < cloud.buffer_begin || p.sweep_index > cloud.buffer_end)
      throw std::invalid_argument("point sweep index outside buffer");
    buckets[{floor_div_index(p.x, params.voxel_size_xy),
             floor_div_index(p.y, params.voxel_size_xy),
             floor_div_index(p.z, params.voxel_size_z)}]
        .push_back(i);
  }

  const int sweeps = cloud.buffer_end - cloud.buffer_begin + 1;
  for (auto& [cell, idx] : buckets) {
    if (int(idx.size()) > params.max_points) {
      shuffle_indices(idx, splitmix64(params.seed ^ CellIndexHash{}(cell)));
      idx.resize(std::size_t(params.max_points));
      std::sort(idx.begin(), idx.end());
    }

    FeatureVector feature(std::size_t(sweeps) * kPointDim, 0.0);
    std::vector<int> counts(std::size_t(sweeps), 0);
    PointSet prov;
    for (std::size_t i : idx) {
      const SweepPoint& p = cloud.points[i];
      const std::size_t slot = std::size_t(p.sweep_index - cloud.buffer_begin);
      double* f = feature.data() + slot * kPointDim;
      f[0] += p.x;
      f[1] += p.y;
      f[2] += p.z;
      f[3] += double(p.sweep_index);
      f[4] += p.intensity;
      ++counts[slot];
      prov.insert(i);
    }
    for (std::size_t s = 0; s < std::size_t(sweeps); ++s) {
      if (counts[s] == 0) continue;
      for (int d = 0; d < kPointDim; ++d) {
        feature[s * kPointDim + d] /= double(counts[s]);
      }
    }
    grid.cells.emplace(cell, std::move(feature));
    grid.provenance.emplace(cell, std::move(prov));
  }
  return grid;
}

namespace {

bool divisible(const CellIndex& c, int stride) {
  return c.x % stride == 0 && c.y % stride == 0 && c.z % stride == 0;
}

std::vector<CellIndex> kernel_offsets(int kernel_extent) {
  const int r = kernel_extent / 2;
  std::vector<CellIndex> offsets;
  offsets.reserve(std::size_t(kernel_extent) * kernel_extent * kernel_extent);
  for (int dx = -r; dx <= r; ++dx)
    for (int dy = -r; dy <= r; ++dy)
      for (int dz = -r; dz <= r; ++dz) offsets.push_back({dx, dy, dz});
  return offsets;
}

}  // namespace

SparseFeatureGrid propagate_stage(const SparseFeatureGrid& grid,
                                  PropagationMode mode, int kernel_extent,
                                  int stride, int out_feature_dim) {
  if (grid.bev) throw std::invalid_argument("propagate_stage needs a 3D grid");
  if (kernel_extent < 1 || kernel_extent % 2 == 0) {
    throw std::invalid_argument("kernel extent must be odd and >= 1");
  }
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  if (out_feature_dim < 1) throw std::invalid_argument("bad feature dim");

  SparseFeatureGrid out;
  out.stage = grid.stage + 1;
  out.cell_size_xy = grid.cell_size_xy * stride;
  out.cell_size_z = grid.cell_size_z * stride;

  const auto offsets = kernel_offsets(kernel_extent);

  // Active set.
  std::unordered_map<CellIndex, char, CellIndexHash> active;
  for (const auto& [cell, feat] : grid.cells) {
    (void)feat;
    if (mode == PropagationMode::Submanifold) {
      if (divisible(cell, stride)) {
        active[{cell.x / stride, cell.y / stride, cell.z / stride}] = 1;
      }
    } else {
      for (const CellIndex& d : offsets) {
        const CellIndex j{cell.x + d.x, cell.y + d.y, cell.z + d.z};
        if (divisible(j, stride)) {
          active[{j.x / stride, j.y / stride, j.z / stride}] = 1;
        }
      }
    }
  }

  // Features: sum over the kernel window around each active output site,
  // accumulated in fixed offset order.
  for (const auto& [o, flag] : active) {
    (void)flag;
    FeatureVector feature(std::size_t(out_feature_dim), 0.0);
    PointSet prov;
    for (const CellIndex& d : offsets) {
      const CellIndex i{o.x * stride + d.x, o.y * stride + d.y,
                        o.z * stride + d.z};
      auto it = grid.cells.find(i);
      if (it == grid.cells.end()) continue;
      const FeatureVector& f = it->second;
      const std::size_t n = std::min(f.size(), feature.size());
      for (std::size_t k = 0; k < n; ++k) feature[k] += f[k];
      const auto& p = grid.provenance.at(i);
      prov.insert(p.begin(), p.end());
    }
    out.cells.emplace(o, std::move(feature));
    out.provenance.emplace(o, std::move(prov));
  }
  return out;
}

SparseFeatureGrid collect_union(
    const std::vector<const SparseFeatureGrid*>& stages) {
  if (stages.empty()) throw std::invalid_argument("no stages to union");
  const SparseFeatureGrid& base = *stages.front();

  SparseFeatureGrid out;
  out.stage = base.stage;
  out.cell_size_xy = base.cell_size_xy;
  out.cell_size_z = base.cell_size_z;
  out.bev = base.bev;

  for (const SparseFeatureGrid* g : stages) {
    const double ratio = g->cell_size_xy / base.cell_size_xy;
    const double ratio_z = g->cell_size_z / base.cell_size_z;
    const std::int64_t factor = std::int64_t(std::llround(ratio));
    if (factor < 1 || std::abs(ratio - double(factor)) > 1e-9 ||
        std::abs(ratio_z - double(factor)) > 1e-9) {
      throw IncompatibleStrides("cell size ratio is not integral");
    }
    for (const CellIndex& cell : g->sorted_cells()) {
      const CellIndex j{cell.x * factor, cell.y * factor, cell.z * factor};
      const FeatureVector& f = g->cells.at(cell);
      FeatureVector& dst = out.cells[j];
      if (dst.size() < f.size()) dst.resize(f.size(), 0.0);
      for (std::size_t k = 0; k < f.size(); ++k) dst[k] += f[k];
      const auto& p = g->provenance.at(cell);
      out.provenance[j].insert(p.begin(), p.end());
    }
  }
  return out;
}

SparseFeatureGrid bev_pool(const SparseFeatureGrid& grid) {
  if (grid.bev) throw std::invalid_argument("grid is already 2D");

  SparseFeatureGrid out;
  out.stage = grid.stage;
  out.cell_size_xy = grid.cell_size_xy;
  out.cell_size_z = grid.cell_size_z;
  out.bev = true;

  std::unordered_map<CellIndex, std::pair<FeatureVector, FeatureVector>,
                     CellIndexHash>
      columns;  // (sum, max) per column
  for (const CellIndex& cell : grid.sorted_cells()) {
    const FeatureVector& f = grid.cells.at(cell);
    const CellIndex col{cell.x, cell.y, 0};
    auto it = columns.find(col);
    if (it == columns.end()) {
      columns.emplace(col, std::make_pair(f, f));
    } else {
      auto& [sum, mx] = it->second;
      if (sum.size() < f.size()) {
        sum.resize(f.size(), 0.0);
        mx.resize(f.size(), 0.0);
      }
      for (std::size_t k = 0; k < f.size(); ++k) {
        sum[k] += f[k];
        mx[k] = std::max(mx[k], f[k]);
      }
    }
    const auto& p = grid.provenance.at(cell);
    out.provenance[col].insert(p.begin(), p.end());
  }
  for (auto& [col, sm] : columns) {
    FeatureVector feature = std::move(sm.first);
    feature.insert(feature.end(), sm.second.begin(), sm.second.end());
    out.cells.emplace(col, std::move(feature));
  }
  return out;
}

CellIndex assign_anchor(const SparseFeatureGrid& bev, geometry::Vec2 y) {
  if (bev.cells.empty()) throw EmptyGrid("no active cells");
  CellIndex best{};
  double best_d2 = std::numeric_limits<double>::infinity();
  for (const CellIndex& cell : bev.sorted_cells()) {
    const double cx = (double(cell.x) + 0.5) * bev.cell_size_xy;
    const double cy = (double(cell.y) + 0.5) * bev.cell_size_xy;
    const double d2 = (cx - y.x) * (cx - y.x) + (cy - y.y) * (cy - y.y);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = cell;
    }
  }
  return best;
}

PointSet inverse_neighborhood(const SparseFeatureGrid& grid, CellIndex cell) {
  auto it = grid.provenance.find(cell);
  if (it == grid.provenance.end()) throw InactiveCell("cell is not active");
  return it->second;
}

PipelineResult run_pipeline(const SweepPointCloud& cloud,
                            const PipelineConfig& config, bool keep_stages) {
  PipelineResult result;
  std::vector<SparseFeatureGrid> grids;
  grids.reserve(7);
  grids.push_back(voxelize(cloud, config.voxel));
  for (const StageConfig& sc : config.stages) {
    grids.push_back(propagate_stage(grids.back(), sc.mode, sc.kernel_extent,
                                    sc.stride, sc.feature_dim));
  }
  const SparseFeatureGrid merged =
      collect_union({&grids[3], &grids[4], &grids[5], &grids[6]});
  result.bev = bev_pool(merged);
  if (keep_stages) result.stage_grids = std::move(grids);
  return result;
}

ObjectTarget make_object_target(const model::GroundTruthTrack& track,
                                int buffer_begin, int buffer_end) {
  ObjectTarget t;
  t.track_id = track.track_id;
  t.class_label = track.class_label;
  t.times = model::derive_time_targets(track, buffer_begin, buffer_end);
  const model::GroundTruthPose& end_pose = track.presence.at(t.times.t_e);
  const model::GroundTruthPose& begin_pose = track.presence.at(t.times.t_b);
  t.box_end = end_pose.box;
  t.box_begin = begin_pose.box;
  t.z = end_pose.z;
  t.height = end_pose.height;
  return t;
}

geometry::Vec2 representative_point(const ObjectTarget& target,
                                    AnchorStrategy strategy) {
  if (strategy == AnchorStrategy::Midpoint) {
    return (target.box_begin.center() + target.box_end.center()) * 0.5;
  }
  // Corner of the end box closest to the sensor at the origin.
  const auto corners = target.box_end.corners();
  geometry::Vec2 best = corners[0];
  double best_d = best.norm();
  for (const geometry::Vec2& c : corners) {
    const double d = c.norm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

LabelAssignment build_label_assignment(const SparseFeatureGrid& bev,
                                       const std::vector<ObjectTarget>& targets,
                                       AnchorStrategy strategy) {
  LabelAssignment out;
  out.representatives.reserve(targets.size());

  struct Claim {
    std::size_t target_index;
    double dist2;
  };
  std::unordered_map<CellIndex, Claim, CellIndexHash> claims;

  for (std::size_t i = 0; i < targets.size(); ++i) {
    const geometry::Vec2 y = representative_point(targets[i], strategy);
    out.representatives.push_back(y);
    if (bev.empty()) {
      out.unassigned.push_back(targets[i].track_id);
      continue;
    }
    const CellIndex cell = assign_anchor(bev, y);
    const double cx = (double(cell.x) + 0.5) * bev.cell_size_xy;
    const double cy = (double(cell.y) + 0.5) * bev.cell_size_xy;
    const double d2 = (cx - y.x) * (cx - y.x) + (cy - y.y) * (cy - y.y);
    auto it = claims.find(cell);
    if (it == claims.end()) {
      claims.emplace(cell, Claim{i, d2});
    } else if (d2 < it->second.dist2) {
      out.unassigned.push_back(targets[it->second.target_index].track_id);
      it->second = Claim{i, d2};
    } else {
      out.unassigned.push_back(targets[i].track_id);
    }
  }

  // Emit positives in target order.
  std::vector<std::pair<std::size_t, CellIndex>> winners;
  for (const auto& [cell, claim] : claims) {
    winners.push_back({claim.target_index, cell});
  }
  std::sort(winners.begin(), winners.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [idx, cell] : winners) {
    out.positives.push_back({cell, out.representatives[idx], targets[idx]});
  }
  std::sort(out.unassigned.begin(), out.unassigned.end());
  return out;
}

}  // namespace pairtrack::sweep
