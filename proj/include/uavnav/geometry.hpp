#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace uavnav {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

/// Componentwise clamp into the unit cube.
Vec3 clamp_unit(const Vec3& p);

bool in_unit_cube(const Vec3& p);

/// Closed parameter interval [enter, exit] along a segment, t in [0, 1].
struct Interval {
  double enter = 0.0;
  double exit = 0.0;

  double length() const { return exit - enter; }
};

/// Vertical prism over a convex counter-clockwise base polygon, spanning
/// altitudes [0, height].
class Obstacle {
 public:
  Obstacle(std::vector<Vec2> base, double height);

  /// Axis-aligned box footprint [x0, x1] x [y0, y1].
  static Obstacle box(double x0, double y0, double x1, double y1, double height);

  const std::vector<Vec2>& base() const { return base_; }
  double height() const { return height_; }

  bool footprint_contains(double x, double y) const;
  /// Membership in the closed prism volume.
  bool contains(const Vec3& p) const;

  /// Portion of segment a->b inside the closed prism, or nullopt if the
  /// segment misses it.
  std::optional<Interval> clip(const Vec3& a, const Vec3& b) const;

 private:
  std::vector<Vec2> base_;
  double height_;
};

struct SegmentHit {
  /// Length of the segment inside the union of all volumes.
  double depth = 0.0;
  /// Smallest segment parameter at which any volume is touched.
  std::optional<double> first_entry;
};

SegmentHit trace_segment(const Vec3& from, const Vec3& to, std::span<const Obstacle> obstacles);

bool inside_any(const Vec3& p, std::span<const Obstacle> obstacles);

}  // namespace uavnav
