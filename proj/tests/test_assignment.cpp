#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "pairtrack/assignment.hpp"

using namespace pairtrack;
using assign::CostMatrix;

namespace {

CostMatrix matrix_from(std::size_t n, const std::vector<double>& entries) {
  CostMatrix m;
  m.num_tracks = n;
  m.num_detections = 0;
  m.entries = entries;
  REQUIRE(entries.size() == n * n);
  return m;
}

CostMatrix random_matrix(std::size_t n, oracles::TestRng& rng) {
  CostMatrix m;
  m.num_tracks = n;
  m.num_detections = 0;
  m.entries.resize(n * n);
  for (double& e : m.entries) e = rng.uniform();
  return m;
}

}  // namespace

TEST_CASE("solve_optimal trivial cases") {
  SUBCASE("identity-dominant matrix") {
    const CostMatrix m = matrix_from(3, {0, 1, 1, 1, 0, 1, 1, 1, 0});
    const auto sol = assign::solve_optimal(m);
    CHECK(sol.row_to_col == std::vector<int>{0, 1, 2});
    CHECK(sol.total_cost == doctest::Approx(0.0));
  }
  SUBCASE("1x1 matrix") {
    const CostMatrix m = matrix_from(1, {3.5});
    const auto sol = assign::solve_optimal(m);
    CHECK(sol.row_to_col == std::vector<int>{0});
    CHECK(sol.total_cost == doctest::Approx(3.5));
  }
  SUBCASE("empty matrix") {
    const CostMatrix m = matrix_from(0, {});
    const auto sol = assign::solve_optimal(m);
    CHECK(sol.row_to_col.empty());
    CHECK(sol.total_cost == 0.0);
  }
}

TEST_CASE("solve_optimal matches brute force on random 5x5 matrices") {
  oracles::TestRng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const CostMatrix m = random_matrix(5, rng);
    const auto sol = assign::solve_optimal(m);
    const auto oracle = oracles::brute_force_permutations(m);
    CHECK(sol.total_cost == doctest::Approx(oracle[0].cost).epsilon(1e-12));
    CHECK(sol.row_to_col == oracle[0].perm);
  }
}

TEST_CASE("solve_optimal breaks cost ties lexicographically") {
  // Both the identity and the swap on rows {0,1} cost 2.
  const CostMatrix m = matrix_from(3, {1, 1, 9, 1, 1, 9, 9, 9, 0});
  const auto sol = assign::solve_optimal(m);
  CHECK(sol.row_to_col == std::vector<int>{0, 1, 2});

  // A matrix whose optimum is unique but not the identity.
  const CostMatrix m2 = matrix_from(2, {1.0, 0.0, 0.0, 1.0});
  CHECK(assign::solve_optimal(m2).row_to_col == std::vector<int>{1, 0});
}

TEST_CASE("solve_optimal rejects fully infeasible matrices") {
  CostMatrix m = matrix_from(2, {assign::kInfeasible, assign::kInfeasible,
                                 assign::kInfeasible, assign::kInfeasible});
  CHECK_THROWS_AS(assign::solve_optimal(m), assign::Infeasible);
}

TEST_CASE("murty_kbest k=1 equals solve_optimal") {
  oracles::TestRng rng(103);
  for (int trial = 0; trial < 100; ++trial) {
    const CostMatrix m = random_matrix(4, rng);
    const auto best = assign::solve_optimal(m);
    const auto list = assign::murty_kbest(m, 1);
    REQUIRE(list.size() == 1);
    CHECK(list[0].row_to_col == best.row_to_col);
    CHECK(list[0].total_cost == doctest::Approx(best.total_cost));
    CHECK(list[0].rank == 1);
  }
}

TEST_CASE("murty_kbest enumerates a 3x3 matrix exhaustively in order") {
  const CostMatrix m =
      matrix_from(3, {4.0, 1.0, 3.0, 2.0, 0.0, 5.0, 3.0, 2.0, 2.0});
  const auto list = assign::murty_kbest(m, 6);
  REQUIRE(list.size() == 6);
  const auto oracle = oracles::brute_force_permutations(m);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(list[i].total_cost == doctest::Approx(oracle[i].cost));
    CHECK(list[i].row_to_col == oracle[i].perm);
    CHECK(list[i].rank == int(i + 1));
  }
}

TEST_CASE("murty_kbest equals brute force on random matrices up to 5x5") {
  oracles::TestRng rng(107);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 1 + std::size_t(rng.uniform() * 5.0);
    const CostMatrix m = random_matrix(n, rng);
    const auto oracle = oracles::brute_force_permutations(m);
    const auto list = assign::murty_kbest(m, oracle.size());
    REQUIRE(list.size() == oracle.size());
    std::set<std::vector<int>> seen;
    for (std::size_t i = 0; i < list.size(); ++i) {
      CHECK(list[i].total_cost ==
            doctest::Approx(oracle[i].cost).epsilon(1e-9));
      CHECK(seen.insert(list[i].row_to_col).second);  // each exactly once
    }
    if (list.size() >= 2) {
      for (std::size_t i = 1; i < list.size(); ++i) {
        CHECK(list[i].total_cost >= list[i - 1].total_cost - 1e-12);
      }
    }
  }
}

TEST_CASE("murty_kbest(m, k) is a prefix of murty_kbest(m, k+1)") {
  oracles::TestRng rng(109);
  for (int trial = 0; trial < 50; ++trial) {
    const CostMatrix m = random_matrix(4, rng);
    const auto longer = assign::murty_kbest(m, 7);
    const auto shorter = assign::murty_kbest(m, 6);
    REQUIRE(shorter.size() <= longer.size());
    for (std::size_t i = 0; i < shorter.size(); ++i) {
      CHECK(shorter[i].row_to_col == longer[i].row_to_col);
    }
  }
}

TEST_CASE("murty_kbest handles a tie between rank 2 and rank 3") {
  // Permutations: id = 0+1+7 = 8 is best; (0,1)-swap = 2+2+7 = 11 and
  // (1,2)-swap = 0+3+8 = 11 tie; enumeration must keep both, lex order.
  const CostMatrix m =
      matrix_from(3, {0.0, 2.0, 9.0, 2.0, 1.0, 3.0, 9.0, 8.0, 7.0});
  const auto list = assign::murty_kbest(m, 3);
  REQUIRE(list.size() == 3);
  CHECK(list[0].row_to_col == std::vector<int>{0, 1, 2});
  CHECK(list[0].total_cost == doctest::Approx(8.0));
  CHECK(list[1].total_cost == doctest::Approx(11.0));
  CHECK(list[2].total_cost == doctest::Approx(11.0));
  CHECK(list[1].row_to_col == std::vector<int>{0, 2, 1});
  CHECK(list[2].row_to_col == std::vector<int>{1, 0, 2});
}

TEST_CASE("row-constant shifts preserve the assignment ordering") {
  oracles::TestRng rng(113);
  for (int trial = 0; trial < 50; ++trial) {
    const CostMatrix m = random_matrix(4, rng);
    CostMatrix shifted = m;
    const double delta = rng.uniform(-3.0, 3.0);
    for (std::size_t j = 0; j < 4; ++j) shifted.at(2, j) += delta;

    const auto a = assign::murty_kbest(m, 10);
    const auto b = assign::murty_kbest(shifted, 10);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].row_to_col == b[i].row_to_col);
      CHECK(b[i].total_cost ==
            doctest::Approx(a[i].total_cost + delta).epsilon(1e-9));
    }
  }
}

namespace {

// A small augmented matrix built by hand: 2 tracks, 2 detections.
CostMatrix augmented_2x2(double c00, double c01, double c10, double c11,
                         double miss, double birth) {
  CostMatrix m;
  m.num_tracks = 2;
  m.num_detections = 2;
  m.entries.assign(16, assign::kInfeasible);
  m.at(0, 0) = c00;
  m.at(0, 1) = c01;
  m.at(1, 0) = c10;
  m.at(1, 1) = c11;
  m.at(0, 2) = miss;
  m.at(1, 3) = miss;
  m.at(2, 0) = birth;
  m.at(3, 1) = birth;
  m.at(2, 2) = m.at(2, 3) = m.at(3, 2) = m.at(3, 3) = 0.0;
  return m;
}

}  // namespace

TEST_CASE("kbest_track_assignments matches the augmented permutation costs") {
  const CostMatrix m = augmented_2x2(1.0, 4.0, 3.0, 2.0, 5.0, 6.0);
  const auto classes = assign::kbest_track_assignments(m, 16);
  const auto perms = assign::murty_kbest(m, 1000);

  // The best class must match the best permutation cost exactly.
  CHECK(classes[0].total_cost == doctest::Approx(perms[0].total_cost));
  CHECK(classes[0].track_to_det == std::vector<int>{0, 1});

  // Class costs must be exactly the distinct meaningful permutation costs.
  std::set<std::vector<int>> seen;
  for (const auto& c : classes) CHECK(seen.insert(c.track_to_det).second);
  // 2 tracks x 2 dets: 7 outcomes (both, swapped, three single, none... ).
  CHECK(classes.size() == 7);
  for (std::size_t i = 1; i < classes.size(); ++i) {
    CHECK(classes[i].total_cost >= classes[i - 1].total_cost - 1e-12);
  }

  // Every class cost appears among the permutation costs.
  for (const auto& c : classes) {
    bool found = false;
    for (const auto& p : perms) {
      if (std::abs(p.total_cost - c.total_cost) < 1e-9) found = true;
    }
    CHECK(found);
  }
}

TEST_CASE("kbest_track_assignments with no tracks or no detections") {
  SUBCASE("no tracks: single all-birth outcome") {
    CostMatrix m;
    m.num_tracks = 0;
    m.num_detections = 2;
    m.entries.assign(4, assign::kInfeasible);
    m.at(0, 0) = 1.5;
    m.at(1, 1) = 2.5;
    const auto classes = assign::kbest_track_assignments(m, 5);
    REQUIRE(classes.size() == 1);
    CHECK(classes[0].track_to_det.empty());
    CHECK(classes[0].total_cost == doctest::Approx(4.0));
  }
  SUBCASE("no detections: misses only") {
    CostMatrix m;
    m.num_tracks = 2;
    m.num_detections = 0;
    m.entries.assign(4, assign::kInfeasible);
    m.at(0, 0) = 2.0;
    m.at(1, 1) = 2.0;
    const auto classes = assign::kbest_track_assignments(m, 5);
    REQUIRE(classes.size() == 1);
    CHECK(classes[0].track_to_det == std::vector<int>{-1, -1});
    CHECK(classes[0].total_cost == doctest::Approx(4.0));
  }
  SUBCASE("empty problem") {
    CostMatrix m;
    const auto classes = assign::kbest_track_assignments(m, 3);
    REQUIRE(classes.size() == 1);
    CHECK(classes[0].total_cost == 0.0);
  }
}
