#include "pairtrack/geometry.hpp"

#include <algorithm>
#include <cassert>

namespace pairtrack::geometry {

double normalize_heading(double h) {
  h = std::fmod(h, 2.0 * kPi);
  if (h <= -kPi) h += 2.0 * kPi;
  if (h > kPi) h -= 2.0 * kPi;
  return h;
}

std::array<Vec2, 4> OrientedBox2D::corners() const {
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  const double hl = 0.5 * length;
  const double hw = 0.5 * width;
  // Local corners (+l,+w), (-l,+w), (-l,-w), (+l,-w) rotated into the world.
  const std::array<Vec2, 4> local = {
      Vec2{hl, hw}, Vec2{-hl, hw}, Vec2{-hl, -hw}, Vec2{hl, -hw}};
  std::array<Vec2, 4> out;
  for (std::size_t i = 0; i < 4; ++i) {
    out[i] = {cx + c * local[i].x - s * local[i].y,
              cy + s * local[i].x + c * local[i].y};
  }
  return out;
}

bool is_valid(const OrientedBox2D& b) {
  return b.length > 0.0 && b.width > 0.0 && std::isfinite(b.cx) &&
         std::isfinite(b.cy) && b.heading > -kPi && b.heading <= kPi;
}

double polygon_area(const std::vector<Vec2>& poly) {
  if (poly.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    twice += a.cross(b);
  }
  return 0.5 * std::abs(twice);
}

namespace {

double signed_area(const std::vector<Vec2>& poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    twice += poly[i].cross(poly[(i + 1) % poly.size()]);
  }
  return 0.5 * twice;
}

std::vector<Vec2> as_ccw(std::vector<Vec2> poly) {
  if (signed_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());
  return poly;
}

}  // namespace

std::vector<Vec2> clip_convex(const std::vector<Vec2>& subject,
                              const std::vector<Vec2>& clip) {
  if (subject.size() < 3 || clip.size() < 3) return {};
  std::vector<Vec2> output = as_ccw(subject);
  const std::vector<Vec2> clipper = as_ccw(clip);

  for (std::size_t i = 0; i < clipper.size() && !output.empty(); ++i) {
    const Vec2 e0 = clipper[i];
    const Vec2 e1 = clipper[(i + 1) % clipper.size()];
    const Vec2 edge = e1 - e0;

    std::vector<Vec2> input;
    input.swap(output);
    for (std::size_t j = 0; j < input.size(); ++j) {
      const Vec2 cur = input[j];
      const Vec2 nxt = input[(j + 1) % input.size()];
      // Points on the clip edge count as inside.
      const double dc = edge.cross(cur - e0);
      const double dn = edge.cross(nxt - e0);
      const bool cur_in = dc >= -kAreaEpsilon;
      const bool nxt_in = dn >= -kAreaEpsilon;
      if (cur_in) output.push_back(cur);
      if (cur_in != nxt_in) {
        const double denom = dc - dn;
        if (std::abs(denom) > 0.0) {
          const double t = dc / denom;
          output.push_back(cur + (nxt - cur) * t);
        }
      }
    }
  }
  return output;
}

double iou2d(const OrientedBox2D& a, const OrientedBox2D& b) {
  assert(is_valid(a) && is_valid(b));
  const auto ca = a.corners();
  const auto cb = b.corners();
  const std::vector<Vec2> pa(ca.begin(), ca.end());
  const std::vector<Vec2> pb(cb.begin(), cb.end());

  const std::vector<Vec2> inter = clip_convex(pa, pb);
  double inter_area = polygon_area(inter);
  if (inter_area < kAreaEpsilon) return 0.0;
  inter_area = std::min(inter_area, std::min(a.area(), b.area()));

  const double union_area = a.area() + b.area() - inter_area;
  if (union_area <= 0.0) return 0.0;
  return inter_area / union_area;
}

Segment1D segment(double a, double b) {
  return a <= b ? Segment1D{a, b} : Segment1D{b, a};
}

double segment_iou(const Segment1D& a, const Segment1D& b) {
  assert(a.lo <= a.hi && b.lo <= b.hi);
  const double span = std::max(a.hi, b.hi) - std::min(a.lo, b.lo);
  if (span <= 0.0) return 0.0;
  const double inter = std::min(a.hi, b.hi) - std::max(a.lo, b.lo);
  if (inter <= 0.0) return 0.0;
  return inter / span;
}

AxisProjection project_onto_axis(const std::vector<TaggedPoint>& points,
                                 const Vec2& origin, const Vec2& through) {
  const Vec2 diff = through - origin;
  const double len = diff.norm();
  if (len <= kAxisEpsilon) {
    throw DegenerateAxis("axis endpoints coincide");
  }
  AxisProjection proj;
  proj.axis_origin = origin;
  proj.axis_dir = diff * (1.0 / len);
  proj.projected_points.reserve(points.size());
  for (const TaggedPoint& tp : points) {
    const Vec2 rel = tp.p - origin;
    proj.projected_points.push_back(
        {rel.dot(proj.axis_dir), std::abs(proj.axis_dir.cross(rel)), tp.tag});
  }
  return proj;
}

}  // namespace pairtrack::geometry
