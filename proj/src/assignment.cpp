#include "pairtrack/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace pairtrack::assign {

namespace {

constexpr double kHalfSentinel = kInfeasible / 2.0;

struct JvResult {
  std::vector<int> row_to_col;
  std::vector<double> u, v;
};

// Shortest-augmenting-path assignment with potentials, O(n^3).
JvResult jv_solve(const std::vector<double>& a, int n) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  JvResult r;
  r.row_to_col.assign(n, -1);
  r.u.assign(n, 0.0);
  r.v.assign(n, 0.0);
  for (int j = 1; j <= n; ++j) {
    if (p[j] > 0) r.row_to_col[p[j] - 1] = j - 1;
  }
  for (int j = 0; j < n; ++j) r.v[j] = v[j + 1];
  for (int i = 0; i < n; ++i) {
    const int j = r.row_to_col[i];
    r.u[i] = a[i * n + j] - r.v[j];
  }
  return r;
}

double direct_cost(const std::vector<double>& a, int n,
                   const std::vector<int>& sol) {
  double c = 0.0;
  for (int i = 0; i < n; ++i) c += a[i * n + sol[i]];
  return c;
}

bool touches_sentinel(const std::vector<double>& a, int n,
                      const std::vector<int>& sol) {
  for (int i = 0; i < n; ++i) {
    if (a[i * n + sol[i]] >= kHalfSentinel) return true;
  }
  return false;
}

double tie_tolerance(const std::vector<double>& a) {
  double scale = 1.0;
  for (double x : a) {
    if (x < kHalfSentinel) scale = std::max(scale, std::abs(x));
  }
  return 1e-11 * scale;
}

void apply_force(std::vector<double>& a, int n, int r, int c) {
  for (int cc = 0; cc < n; ++cc) {
    if (cc != c) a[r * n + cc] = kInfeasible;
  }
  for (int rr = 0; rr < n; ++rr) {
    if (rr != r) a[rr * n + c] = kInfeasible;
  }
}

// True when an equal-cost alternative exists that changes the assignment of
// some row < relevant_rows. Alternates correspond to directed cycles in the
// graph over columns whose edges follow tight (zero reduced cost) arcs.
bool has_relevant_alternate(const std::vector<double>& a, int n,
                            int relevant_rows, const JvResult& jv,
                            double atol) {
  std::vector<int> row_of(n, -1);
  for (int i = 0; i < n; ++i) row_of[jv.row_to_col[i]] = i;

  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) {
    const int matched = jv.row_to_col[i];
    for (int j = 0; j < n; ++j) {
      if (j == matched) continue;
      const double cij = a[i * n + j];
      if (cij >= kHalfSentinel) continue;
      if (std::abs(cij - jv.u[i] - jv.v[j]) <= atol) {
        adj[matched].push_back(j);
      }
    }
  }

  // Tarjan SCC, iterative.
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  int next_index = 0, next_comp = 0;
  std::vector<std::pair<int, std::size_t>> call;
  for (int s = 0; s < n; ++s) {
    if (index[s] != -1) continue;
    call.push_back({s, 0});
    while (!call.empty()) {
      auto& [node, ei] = call.back();
      if (ei == 0) {
        index[node] = low[node] = next_index++;
        stack.push_back(node);
        on_stack[node] = 1;
      }
      bool descended = false;
      while (ei < adj[node].size()) {
        const int w = adj[node][ei];
        ++ei;
        if (index[w] == -1) {
          call.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[w]) low[node] = std::min(low[node], index[w]);
      }
      if (descended) continue;
      if (low[node] == index[node]) {
        int sz = 0;
        bool relevant = false;
        while (true) {
          const int w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = next_comp;
          ++sz;
          if (row_of[w] >= 0 && row_of[w] < relevant_rows) relevant = true;
          if (w == node) break;
        }
        ++next_comp;
        if (sz >= 2 && relevant) return true;
      }
      const int done = node;
      call.pop_back();
      if (!call.empty()) {
        low[call.back().first] = std::min(low[call.back().first], low[done]);
      }
    }
  }
  return false;
}

struct EngineSolution {
  std::vector<int> row_to_col;
  double cost = 0.0;
};

// Optimal solve; among equal-cost optima the result is lexicographically
// minimal over the first `relevant_rows` rows. Returns false if the subspace
// has no sentinel-free permutation.
bool canonical_solve(std::vector<double> a, int n, int relevant_rows,
                     double atol, EngineSolution& out) {
  if (n == 0) {
    out = {{}, 0.0};
    return true;
  }
  JvResult jv = jv_solve(a, n);
  if (touches_sentinel(a, n, jv.row_to_col)) return false;
  double best = direct_cost(a, n, jv.row_to_col);
  std::vector<int> sol = jv.row_to_col;

  if (has_relevant_alternate(a, n, relevant_rows, jv, atol)) {
    for (int r = 0; r < relevant_rows; ++r) {
      for (int c = 0; c < n; ++c) {
        if (a[r * n + c] >= kHalfSentinel) continue;
        if (c == sol[r]) break;  // current column already achieves best
        std::vector<double> forced = a;
        apply_force(forced, n, r, c);
        const JvResult trial = jv_solve(forced, n);
        if (touches_sentinel(forced, n, trial.row_to_col)) continue;
        const double cost = direct_cost(forced, n, trial.row_to_col);
        if (cost <= best + atol) {
          a = std::move(forced);
          sol = trial.row_to_col;
          best = std::min(best, cost);
          break;
        }
      }
      apply_force(a, n, r, sol[r]);
    }
  }
  out.row_to_col = std::move(sol);
  out.cost = best;
  return true;
}

struct EngineNode {
  std::vector<double> m;
  int fixed_rows = 0;
  EngineSolution sol;
  std::uint64_t seq = 0;
};

struct NodeOrder {
  int relevant_rows;
  // Min-heap: cost, then lexicographic assignment, then insertion order.
  bool operator()(const EngineNode& a, const EngineNode& b) const {
    if (a.sol.cost != b.sol.cost) return a.sol.cost > b.sol.cost;
    for (int i = 0; i < relevant_rows; ++i) {
      if (a.sol.row_to_col[i] != b.sol.row_to_col[i]) {
        return a.sol.row_to_col[i] > b.sol.row_to_col[i];
      }
    }
    return a.seq > b.seq;
  }
};

// Best-first Murty partitioning over rows [0, partition_rows).
std::vector<EngineSolution> kbest_engine(const std::vector<double>& base,
                                         int n, int partition_rows,
                                         std::size_t k) {
  std::vector<EngineSolution> out;
  if (k == 0) return out;
  const double atol = tie_tolerance(base);

  EngineSolution root;
  if (!canonical_solve(base, n, partition_rows, atol, root)) return out;
  if (n == 0) {
    out.push_back(root);
    return out;
  }

  std::uint64_t seq = 0;
  std::priority_queue<EngineNode, std::vector<EngineNode>, NodeOrder> queue(
      NodeOrder{partition_rows});
  queue.push({base, 0, std::move(root), seq++});

  while (out.size() < k && !queue.empty()) {
    EngineNode node = queue.top();
    queue.pop();
    out.push_back(node.sol);
    if (out.size() == k) break;

    std::vector<double> work = node.m;
    for (int r = node.fixed_rows; r < partition_rows; ++r) {
      std::vector<double> child = work;
      child[r * n + node.sol.row_to_col[r]] = kInfeasible;
      EngineSolution sol;
      if (canonical_solve(child, n, partition_rows, atol, sol)) {
        queue.push({std::move(child), r, std::move(sol), seq++});
      }
      apply_force(work, n, r, node.sol.row_to_col[r]);
    }
  }
  return out;
}

}  // namespace

CostMatrix build_cost_matrix(const std::vector<tracking::Track>& tracks,
                             const std::vector<model::PairedDetection>& dets,
                             int det_frame_index,
                             const likelihood::LikelihoodParams& params) {
  CostMatrix m;
  m.num_tracks = tracks.size();
  m.num_detections = dets.size();
  const std::size_t n = m.size();
  m.entries.assign(n * n, kInfeasible);

  const std::size_t t = m.num_tracks;
  const std::size_t d = m.num_detections;
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const likelihood::AssociationScore s =
          likelihood::score_pair(tracks[i], dets[j], det_frame_index, params);
      m.at(i, j) = (s.model_used == likelihood::ScoreModel::Incompatible)
                       ? kInfeasible
                       : -s.log_likelihood;
    }
    m.at(i, d + i) = -params.log_miss;
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double log_conf = std::log(std::max(dets[j].confidence, 1e-12));
    double log_birth = params.log_birth + log_conf;
    if (dets[j].birth_flag) log_birth += params.birth_flag_log_bonus;
    m.at(t + j, j) = -std::max(log_birth, params.log_false);
    for (std::size_t c = 0; c < t; ++c) m.at(t + j, d + c) = 0.0;
  }
  return m;
}

AssignmentSolution solve_optimal(const CostMatrix& m) {
  const int n = static_cast<int>(m.size());
  EngineSolution sol;
  if (!canonical_solve(m.entries, n, n, tie_tolerance(m.entries), sol)) {
    throw Infeasible("no finite-cost permutation");
  }
  return {std::move(sol.row_to_col), sol.cost, 1};
}

std::vector<AssignmentSolution> murty_kbest(const CostMatrix& m,
                                            std::size_t k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const int n = static_cast<int>(m.size());
  const auto sols = kbest_engine(m.entries, n, n, k);
  if (sols.empty()) throw Infeasible("no finite-cost permutation");
  std::vector<AssignmentSolution> out;
  out.reserve(sols.size());
  for (std::size_t i = 0; i < sols.size(); ++i) {
    out.push_back({sols[i].row_to_col, sols[i].cost, int(i + 1)});
  }
  return out;
}

std::vector<TrackAssignment> kbest_track_assignments(const CostMatrix& m,
                                                     std::size_t k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const int t = static_cast<int>(m.num_tracks);
  const int d = static_cast<int>(m.num_detections);
  const int n = t + d;

  // Collapse the augmented matrix onto track rows: assigning det j instead
  // of leaving it to its birth row trades the birth cost away, so the
  // per-detection birth costs move into a constant and the zero block's
  // interchangeable completions disappear.
  double constant = 0.0;
  std::vector<double> reduced(std::size_t(n) * n, 0.0);
  for (int j = 0; j < d; ++j) constant += m.at(t + j, j);
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j < n; ++j) reduced[i * n + j] = kInfeasible;
    for (int j = 0; j < d; ++j) {
      const double c = m.at(i, j);
      if (c < kHalfSentinel) reduced[i * n + j] = c - m.at(t + j, j);
    }
    reduced[i * n + d + i] = m.at(i, d + i);
  }
  // Padding rows absorb unclaimed detection and miss columns at no cost.

  const auto sols = kbest_engine(reduced, n, t, k);
  if (sols.empty()) throw Infeasible("no finite-cost track assignment");
  std::vector<TrackAssignment> out;
  out.reserve(sols.size());
  for (std::size_t s = 0; s < sols.size(); ++s) {
    TrackAssignment ta;
    ta.track_to_det.resize(t);
    for (int i = 0; i < t; ++i) {
      const int col = sols[s].row_to_col.empty() ? -1 : sols[s].row_to_col[i];
      ta.track_to_det[i] = (col >= 0 && col < d) ? col : -1;
    }
    ta.total_cost = sols[s].cost + constant;
    ta.rank = int(s + 1);
    out.push_back(std::move(ta));
  }
  return out;
}

}  // namespace pairtrack::assign
