#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pairtrack::geometry {

constexpr double kPi = 3.14159265358979323846;

/// A sliver intersection below this area (m^2) counts as empty.
constexpr double kAreaEpsilon = 1e-12;

/// Two axis endpoints closer than this (m) cannot define a direction.
constexpr double kAxisEpsilon = 1e-9;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

/// Maps any angle to the canonical range (-pi, pi], boundary to +pi.
double normalize_heading(double h);

/// Oriented rectangle in the ground plane. Heading is the direction of the
/// length axis, radians in (-pi, pi].
struct OrientedBox2D {
  double cx = 0.0;
  double cy = 0.0;
  double length = 1.0;
  double width = 1.0;
  double heading = 0.0;

  Vec2 center() const { return {cx, cy}; }
  double area() const { return length * width; }

  /// Corner positions in counter-clockwise order.
  std::array<Vec2, 4> corners() const;
};

/// True when extents are positive and the heading is canonical.
bool is_valid(const OrientedBox2D& b);

/// Intersection-over-union of two oriented boxes via convex polygon
/// clipping (Sutherland-Hodgman) and the shoelace formula. Symmetric,
/// returns a value in [0, 1]; degenerate overlaps count as 0.
double iou2d(const OrientedBox2D& a, const OrientedBox2D& b);

/// Area of a convex polygon given as an ordered vertex ring.
double polygon_area(const std::vector<Vec2>& poly);

/// Clips a convex subject polygon by a convex clip polygon; both rings may
/// be in either winding. Returns the intersection ring (possibly empty).
std::vector<Vec2> clip_convex(const std::vector<Vec2>& subject,
                              const std::vector<Vec2>& clip);

/// 1D closed interval, lo <= hi.
struct Segment1D {
  double lo = 0.0;
  double hi = 0.0;
};

/// Builds a segment from unordered endpoints.
Segment1D segment(double a, double b);

/// |a intersect b| over the outer hull span of the two segments. Disjoint
/// segments score 0 against the full span; two point segments score 0.
double segment_iou(const Segment1D& a, const Segment1D& b);

struct DegenerateAxis : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TaggedPoint {
  Vec2 p;
  char tag = ' ';
};

struct ProjectedPoint {
  double along = 0.0;    // signed coordinate along the axis from its origin
  double lateral = 0.0;  // perpendicular distance, >= 0
  char tag = ' ';
};

struct AxisProjection {
  Vec2 axis_origin;
  Vec2 axis_dir;  // unit vector
  std::vector<ProjectedPoint> projected_points;
};

/// Projects tagged points onto the axis from `origin` through `through`.
/// Throws DegenerateAxis when the two points are closer than kAxisEpsilon.
AxisProjection project_onto_axis(const std::vector<TaggedPoint>& points,
                                 const Vec2& origin, const Vec2& through);

}  // namespace pairtrack::geometry
