#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pairtrack/detection.hpp"
#include "pairtrack/likelihood.hpp"
#include "pairtrack/track.hpp"

namespace pairtrack::assign {

/// Sentinel for infeasible entries. Kept finite so the optimal solver stays
/// branch-free; any solution touching a sentinel arc is rejected.
constexpr double kInfeasible = 1e12;

/// Augmented square cost matrix: rows are tracks followed by one birth row
/// per detection, columns are detections followed by one miss column per
/// track. The lower-right block pairing unused birth rows with unused miss
/// columns costs zero.
struct CostMatrix {
  std::size_t num_tracks = 0;
  std::size_t num_detections = 0;
  std::vector<double> entries;  // row-major, size() x size()

  std::size_t size() const { return num_tracks + num_detections; }
  double& at(std::size_t r, std::size_t c) { return entries[r * size() + c]; }
  double at(std::size_t r, std::size_t c) const {
    return entries[r * size() + c];
  }
};

/// Builds the augmented matrix from negative log-likelihoods:
/// track x detection entries from score_pair, the per-track miss cost, and
/// per-detection birth-or-false cost max(log_birth + log confidence,
/// log_false). Incompatible pairs become sentinels.
CostMatrix build_cost_matrix(const std::vector<tracking::Track>& tracks,
                             const std::vector<model::PairedDetection>& dets,
                             int det_frame_index,
                             const likelihood::LikelihoodParams& params);

struct Infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AssignmentSolution {
  std::vector<int> row_to_col;  // permutation of the augmented matrix
  double total_cost = 0.0;
  int rank = 1;  // 1-based position in a k-best list
};

/// Minimum-cost permutation (Jonker-Volgenant style shortest augmenting
/// paths). Among equal-cost optima the lexicographically smallest
/// row-to-column vector is returned. Throws Infeasible when every
/// permutation touches a sentinel.
AssignmentSolution solve_optimal(const CostMatrix& m);

/// The k cheapest permutations in non-decreasing cost order (Murty
/// partitioning over a best-first queue). Returns fewer when the feasible
/// set is smaller; equal costs are ordered lexicographically.
std::vector<AssignmentSolution> murty_kbest(const CostMatrix& m,
                                            std::size_t k);

/// One global track-level outcome: detection index per track or -1 for a
/// miss. Detections claimed by no track pay their birth-or-false cost.
/// total_cost equals the cost of the corresponding augmented permutation.
struct TrackAssignment {
  std::vector<int> track_to_det;
  double total_cost = 0.0;
  int rank = 1;
};

/// K-best enumeration over distinct track-level outcomes. Equivalent to
/// murty_kbest on the augmented matrix with the interchangeable zero-block
/// completions collapsed, so no duplicate outcomes are produced.
std::vector<TrackAssignment> kbest_track_assignments(const CostMatrix& m,
                                                     std::size_t k);

}  // namespace pairtrack::assign
