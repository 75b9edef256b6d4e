// Test-only oracles, kept independent of the implementation paths they
// check: Monte-Carlo box-overlap areas, exhaustive permutation enumeration,
// and plain set arithmetic for sparse-grid propagation.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "pairtrack/assignment.hpp"
#include "pairtrack/geometry.hpp"
#include "pairtrack/sweep_grid.hpp"

namespace oracles {

// Deterministic uniform stream; mt19937_64 output is pinned by the standard.
class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

inline bool point_in_box(const pairtrack::geometry::OrientedBox2D& b,
                         double x, double y) {
  const double c = std::cos(b.heading);
  const double s = std::sin(b.heading);
  const double dx = x - b.cx;
  const double dy = y - b.cy;
  const double lx = c * dx + s * dy;
  const double ly = -s * dx + c * dy;
  return std::abs(lx) <= b.length / 2.0 && std::abs(ly) <= b.width / 2.0;
}

/// Monte-Carlo IOU estimate over the joint bounding region of both boxes.
inline double mc_iou(const pairtrack::geometry::OrientedBox2D& a,
                     const pairtrack::geometry::OrientedBox2D& b,
                     std::size_t samples, std::uint64_t seed) {
  const double ra = 0.5 * std::hypot(a.length, a.width);
  const double rb = 0.5 * std::hypot(b.length, b.width);
  const double lo_x = std::min(a.cx - ra, b.cx - rb);
  const double hi_x = std::max(a.cx + ra, b.cx + rb);
  const double lo_y = std::min(a.cy - ra, b.cy - rb);
  const double hi_y = std::max(a.cy + ra, b.cy + rb);

  TestRng rng(seed);
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = rng.uniform(lo_x, hi_x);
    const double y = rng.uniform(lo_y, hi_y);
    const bool in_a = point_in_box(a, x, y);
    const bool in_b = point_in_box(b, x, y);
    if (in_a && in_b) ++inter;
    if (in_a || in_b) ++uni;
  }
  return uni == 0 ? 0.0 : double(inter) / double(uni);
}

struct PermSolution {
  std::vector<int> perm;
  double cost = 0.0;
};

/// Every sentinel-free permutation of the matrix, sorted by (cost, perm).
inline std::vector<PermSolution> brute_force_permutations(
    const pairtrack::assign::CostMatrix& m) {
  const int n = int(m.size());
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::vector<PermSolution> out;
  do {
    double cost = 0.0;
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      const double c = m.at(std::size_t(i), std::size_t(perm[i]));
      if (c >= pairtrack::assign::kInfeasible / 2.0) {
        ok = false;
        break;
      }
      cost += c;
    }
    if (ok) out.push_back({perm, cost});
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::sort(out.begin(), out.end(),
            [](const PermSolution& a, const PermSolution& b) {
              if (a.cost != b.cost) return a.cost < b.cost;
              return a.perm < b.perm;
            });
  return out;
}

using CellSet = std::set<pairtrack::sweep::CellIndex>;

/// Set-arithmetic oracle for one propagation stage's active set.
inline CellSet propagate_active_oracle(const CellSet& active, bool dilating,
                                       int kernel_extent, int stride) {
  const int r = kernel_extent / 2;
  CellSet dilated;
  if (dilating) {
    for (const auto& c : active) {
      for (int dx = -r; dx <= r; ++dx)
        for (int dy = -r; dy <= r; ++dy)
          for (int dz = -r; dz <= r; ++dz)
            dilated.insert({c.x + dx, c.y + dy, c.z + dz});
    }
  } else {
    dilated = active;
  }
  CellSet out;
  for (const auto& c : dilated) {
    if (c.x % stride == 0 && c.y % stride == 0 && c.z % stride == 0) {
      out.insert({c.x / stride, c.y / stride, c.z / stride});
    }
  }
  return out;
}

/// Graph-reachability oracle for the inverse neighborhood: walks the stage
/// configs forward and keeps, per cell, the reachable source points.
struct OracleStage {
  bool dilating = true;
  int kernel_extent = 3;
  int stride = 2;
};

inline std::vector<std::size_t> erf_oracle(
    const pairtrack::sweep::SweepPointCloud& cloud, double voxel_xy,
    double voxel_z, const std::vector<OracleStage>& stages,
    pairtrack::sweep::CellIndex query_bev_cell) {
  using pairtrack::sweep::CellIndex;
  std::map<CellIndex, std::set<std::size_t>> reach;
  CellSet active;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const auto& p = cloud.points[i];
    const CellIndex c{std::int64_t(std::floor(p.x / voxel_xy)),
                      std::int64_t(std::floor(p.y / voxel_xy)),
                      std::int64_t(std::floor(p.z / voxel_z))};
    reach[c].insert(i);
    active.insert(c);
  }
  for (const OracleStage& st : stages) {
    const int r = st.kernel_extent / 2;
    const CellSet next_active =
        propagate_active_oracle(active, st.dilating, st.kernel_extent,
                                st.stride);
    // Contributions flow through the kernel window regardless of mode; the
    // mode only decides which output sites exist.
    std::map<CellIndex, std::set<std::size_t>> next;
    for (const auto& [c, pts] : reach) {
      for (int dx = -r; dx <= r; ++dx) {
        for (int dy = -r; dy <= r; ++dy) {
          for (int dz = -r; dz <= r; ++dz) {
            const CellIndex j{c.x + dx, c.y + dy, c.z + dz};
            if (j.x % st.stride || j.y % st.stride || j.z % st.stride)
              continue;
            const CellIndex o{j.x / st.stride, j.y / st.stride,
                              j.z / st.stride};
            if (!next_active.count(o)) continue;
            next[o].insert(pts.begin(), pts.end());
          }
        }
      }
    }
    reach = std::move(next);
    active = next_active;
  }
  std::set<std::size_t> bev;
  for (const auto& [c, pts] : reach) {
    if (c.x == query_bev_cell.x && c.y == query_bev_cell.y) {
      bev.insert(pts.begin(), pts.end());
    }
  }
  return {bev.begin(), bev.end()};
}

}  // namespace oracles
