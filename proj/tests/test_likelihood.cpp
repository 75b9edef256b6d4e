#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pairtrack/likelihood.hpp"

using namespace pairtrack;
using namespace pairtrack::likelihood;
using geometry::OrientedBox2D;

namespace {

tracking::Track track_with(const model::PairedDetection& det, int frame,
                           model::ClassLabel cls = model::ClassLabel::Vehicle) {
  tracking::Track t;
  t.track_id = 1;
  t.class_label = cls;
  t.history.push({frame, det});
  return t;
}

model::PairedDetection pair_det(const OrientedBox2D& begin,
                                const OrientedBox2D& end, int t_b = -5,
                                int t_e = 0) {
  model::PairedDetection d;
  d.box_begin = begin;
  d.box_end = end;
  d.t_b = t_b;
  d.t_e = t_e;
  return d;
}

}  // namespace

TEST_CASE("score_static residual and threshold behavior") {
  LikelihoodParams p;

  SUBCASE("identical boxes give the model maximum") {
    const OrientedBox2D b{0, 0, 4, 2, 0};
    const auto s = score_static(b, b, p);
    REQUIRE(s.has_value());
    CHECK(s->log_likelihood ==
          doctest::Approx(log_normal_pdf(0.0, p.sigma_lambda)));
    CHECK(s->model_used == ScoreModel::StaticIOU);
    CHECK(s->diagnostics->lambda == doctest::Approx(1.0));
  }

  SUBCASE("threshold is inclusive") {
    // Two unit squares offset to produce iou exactly lambda0 = 1/3.
    p.lambda0 = 1.0 / 3.0;
    const OrientedBox2D a{0, 0, 1, 1, 0};
    const OrientedBox2D b{0.5, 0, 1, 1, 0};
    const auto s = score_static(a, b, p);
    CHECK(s.has_value());
  }

  SUBCASE("below threshold is not applicable") {
    const OrientedBox2D a{0, 0, 1, 1, 0};
    const OrientedBox2D b{0.9, 0, 1, 1, 0};  // iou = 0.1/1.9 < 0.3
    CHECK_FALSE(score_static(a, b, p).has_value());
  }

  SUBCASE("lambda 0.8 with sigma 0.2 matches the Gaussian density") {
    // Direct evaluation: N(0.2; 0, 0.04).
    p.sigma_lambda = 0.2;
    const double expected =
        -0.5 * (0.2 / 0.2) * (0.2 / 0.2) -
        std::log(0.2 * std::sqrt(2.0 * geometry::kPi));
    // Boxes engineered for iou = 0.8: 1x1 squares offset by 1/9.
    const OrientedBox2D a{0, 0, 1, 1, 0};
    const OrientedBox2D b{1.0 / 9.0, 0, 1, 1, 0};
    const auto s = score_static(a, b, p);
    REQUIRE(s.has_value());
    CHECK(s->diagnostics->lambda == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(s->log_likelihood == doctest::Approx(expected).epsilon(1e-9));
  }

  SUBCASE("monotone non-decreasing in lambda on [lambda0, 1]") {
    double prev = -1e300;
    for (double lambda = p.lambda0; lambda <= 1.0; lambda += 0.01) {
      const double ll =
          log_normal_pdf(1.0 - lambda, p.sigma_lambda) + p.log_assoc;
      CHECK(ll >= prev);
      prev = ll;
    }
  }
}

TEST_CASE("score_moving zero residual for consistent motion") {
  LikelihoodParams p;
  // Constant velocity along +x at 1 m per frame; track pair spans frames
  // 0..5, detection pair spans 1..6 (one frame later).
  auto box_at = [](double t) {
    return OrientedBox2D{t * 1.0, 0.0, 4.0, 2.0, 0.0};
  };
  const auto s = score_moving({box_at(0), 0.0}, {box_at(5), 5.0},
                              {box_at(1), 1.0}, {box_at(6), 6.0}, p);
  REQUIRE(s.has_value());
  CHECK(s->model_used == ScoreModel::MovingProjection);
  CHECK(s->diagnostics->lambda == doctest::Approx(s->diagnostics->lambda_t));
  CHECK(s->diagnostics->lateral_max == doctest::Approx(0.0));
  CHECK(s->log_likelihood ==
        doctest::Approx(log_normal_pdf(0, p.sigma_t) +
                        log_normal_pdf(0, p.sigma_l)));
}

TEST_CASE("score_moving lambda_t arithmetic") {
  LikelihoodParams p;
  // Track times t_A = -5, t_B = 0; detection re-indexed to t_C = -4,
  // t_D = 1: lambda_t = |0 - (-4)| / |1 - (-5)| = 2/3.
  auto box_at = [](double t) {
    return OrientedBox2D{2.0 * t, 0.0, 4.0, 2.0, 0.0};
  };
  const auto s = score_moving({box_at(-5), -5.0}, {box_at(0), 0.0},
                              {box_at(-4), -4.0}, {box_at(1), 1.0}, p);
  REQUIRE(s.has_value());
  CHECK(s->diagnostics->lambda_t == doctest::Approx(2.0 / 3.0));
  CHECK(s->diagnostics->lambda == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("score_moving lateral deviation equals hand geometry") {
  LikelihoodParams p;
  // Axis A=(0,0) to D=(4,3); track end at B=(2,0): |BB'| = 1.2 by hand.
  const auto s =
      score_moving({{0, 0, 1, 1, 0}, 0.0}, {{2, 0, 1, 1, 0}, 1.0},
                   {{2.4, 1.8, 1, 1, 0}, 2.0}, {{4, 3, 1, 1, 0}, 3.0}, p);
  REQUIRE(s.has_value());
  CHECK(s->diagnostics->lateral_max == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("score_moving degenerate cases return nullopt") {
  LikelihoodParams p;
  const OrientedBox2D b{0, 0, 1, 1, 0};
  SUBCASE("short baseline") {
    CHECK_FALSE(score_moving({b, 0}, {b, 1}, {b, 2}, {{0.1, 0, 1, 1, 0}, 3}, p)
                    .has_value());
  }
  SUBCASE("non-positive time span") {
    CHECK_FALSE(
        score_moving({b, 5}, {b, 6}, {b, 1}, {{9, 0, 1, 1, 0}, 5}, p)
            .has_value());
  }
}

TEST_CASE("score_moving is invariant under rigid transforms and time shifts") {
  LikelihoodParams p;
  oracles::TestRng rng(37);
  for (int i = 0; i < 200; ++i) {
    const double speed = rng.uniform(1.0, 15.0);
    const double heading = rng.uniform(-geometry::kPi, geometry::kPi);
    const double x0 = rng.uniform(-30, 30), y0 = rng.uniform(-30, 30);
    auto box_at = [&](double t) {
      return OrientedBox2D{x0 + speed * t * std::cos(heading),
                           y0 + speed * t * std::sin(heading), 4.0, 2.0,
                           geometry::normalize_heading(heading)};
    };
    const auto base = score_moving({box_at(0), 0}, {box_at(0.5), 0.5},
                                   {box_at(0.1), 0.1}, {box_at(0.6), 0.6}, p);
    REQUIRE(base.has_value());

    const double angle = rng.uniform(-geometry::kPi, geometry::kPi);
    const double tx = rng.uniform(-50, 50), ty = rng.uniform(-50, 50);
    const double dt = rng.uniform(-100, 100);
    auto rigid = [&](const OrientedBox2D& b) {
      const double c = std::cos(angle), s = std::sin(angle);
      return OrientedBox2D{c * b.cx - s * b.cy + tx, s * b.cx + c * b.cy + ty,
                           b.length, b.width,
                           geometry::normalize_heading(b.heading + angle)};
    };
    const auto moved = score_moving(
        {rigid(box_at(0)), 0 + dt}, {rigid(box_at(0.5)), 0.5 + dt},
        {rigid(box_at(0.1)), 0.1 + dt}, {rigid(box_at(0.6)), 0.6 + dt}, p);
    REQUIRE(moved.has_value());
    CHECK(std::abs(base->log_likelihood - moved->log_likelihood) < 1e-9);
  }
}

TEST_CASE("zero residual property over random constant-velocity objects") {
  LikelihoodParams p;
  oracles::TestRng rng(41);
  for (int i = 0; i < 100; ++i) {
    const double speed = rng.uniform(0.8, 20.0);
    const double heading = rng.uniform(-geometry::kPi, geometry::kPi);
    auto box_at = [&](double t) {
      return OrientedBox2D{speed * t * std::cos(heading),
                           speed * t * std::sin(heading), 2.0, 1.0,
                           geometry::normalize_heading(heading)};
    };
    const auto s = score_moving({box_at(0), 0}, {box_at(5), 5},
                                {box_at(1), 1}, {box_at(6), 6}, p);
    REQUIRE(s.has_value());
    CHECK(std::abs(s->diagnostics->lambda - s->diagnostics->lambda_t) < 1e-6);
    CHECK(s->diagnostics->lateral_max < 1e-9);
  }
}

TEST_CASE("score_pair dispatch") {
  LikelihoodParams p;

  SUBCASE("overlapping parked boxes pick the static model") {
    const OrientedBox2D b{0, 0, 4, 2, 0};
    const auto det0 = pair_det(b, b);
    const tracking::Track t = track_with(det0, 0);
    const auto s = score_pair(t, det0, 1, p);
    CHECK(s.model_used == ScoreModel::StaticIOU);
  }

  SUBCASE("fast mover with disjoint boxes picks the moving model") {
    // Small box at 15 m/s: consecutive end boxes are 1.5 m apart, longer
    // than the box, so the closest-in-time pair has iou 0.
    auto box_at = [](double t) {
      return OrientedBox2D{15.0 * t, 0.0, 1.0, 0.5, 0.0};
    };
    const auto det_a = pair_det(box_at(0.4), box_at(0.9));
    const auto det_b = pair_det(box_at(0.5), box_at(1.0));
    const tracking::Track t = track_with(det_a, 9);
    const auto s = score_pair(t, det_b, 10, p);
    CHECK(s.model_used == ScoreModel::MovingProjection);
    CHECK(std::isfinite(s.log_likelihood));
  }

  SUBCASE("class mismatch is incompatible") {
    const OrientedBox2D b{0, 0, 4, 2, 0};
    const auto det0 = pair_det(b, b);
    const tracking::Track t = track_with(det0, 0, model::ClassLabel::Vehicle);
    auto ped = det0;
    ped.class_label = model::ClassLabel::Pedestrian;
    const auto s = score_pair(t, ped, 1, p);
    CHECK(s.model_used == ScoreModel::Incompatible);
    CHECK(std::isinf(s.log_likelihood));
  }

  SUBCASE("degenerate axis falls back to static with threshold waived") {
    // Barely-moving boxes with low overlap would fail the static gate, but
    // the axis baseline is below min_axis_length.
    p.lambda0 = 0.999;
    const OrientedBox2D a{0, 0, 1, 1, 0};
    const OrientedBox2D b{0.1, 0, 1, 1, 0};
    const auto det_a = pair_det(a, a);
    const auto det_b = pair_det(b, b, -4, -4);
    const tracking::Track t = track_with(det_a, 0);
    const auto s = score_pair(t, det_b, 1, p);
    CHECK(s.model_used == ScoreModel::StaticIOU);
    CHECK(std::isfinite(s.log_likelihood));
  }
}

TEST_CASE("sigma changes never alter the dispatch") {
  oracles::TestRng rng(43);
  LikelihoodParams a;
  LikelihoodParams b;
  b.sigma_lambda = 0.05;
  b.sigma_t = 0.5;
  b.sigma_l = 2.0;
  for (int i = 0; i < 300; ++i) {
    auto box = [&]() {
      return OrientedBox2D{rng.uniform(-20, 20), rng.uniform(-20, 20),
                           rng.uniform(0.5, 5), rng.uniform(0.3, 2.5),
                           geometry::normalize_heading(
                               rng.uniform(-geometry::kPi, geometry::kPi))};
    };
    const auto det_a = pair_det(box(), box(), -5, 0);
    const auto det_b = pair_det(box(), box(), -5, 0);
    const tracking::Track t = track_with(det_a, 4);
    const auto sa = score_pair(t, det_b, 5, a);
    const auto sb = score_pair(t, det_b, 5, b);
    CHECK(sa.model_used == sb.model_used);
  }
}
