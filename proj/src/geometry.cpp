#include "uavnav/geometry.hpp"

#include <algorithm>
#include <limits>

#include "uavnav/error.hpp"

namespace uavnav {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

// Narrow [lo, hi] to the t where f0 + t * df >= 0. Returns false once empty.
bool clip_halfspace(double f0, double df, double& lo, double& hi) {
  if (df == 0.0) return f0 >= 0.0;
  const double t = -f0 / df;
  if (df > 0.0)
    lo = std::max(lo, t);
  else
    hi = std::min(hi, t);
  return lo <= hi;
}

}  // namespace

Vec3 clamp_unit(const Vec3& p) {
  return {std::clamp(p.x, 0.0, 1.0), std::clamp(p.y, 0.0, 1.0), std::clamp(p.z, 0.0, 1.0)};
}

bool in_unit_cube(const Vec3& p) {
  return p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0 && p.z >= 0.0 && p.z <= 1.0;
}

Obstacle::Obstacle(std::vector<Vec2> base, double height) : base_(std::move(base)), height_(height) {
  require(base_.size() >= 3, ErrorCode::InvalidArgument, "obstacle base needs at least 3 vertices");
  require(std::isfinite(height_) && height_ > 0.0 && height_ <= 1.0, ErrorCode::InvalidArgument,
          "obstacle height must lie in (0, 1]");
  const std::size_t n = base_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& v = base_[i];
    require(std::isfinite(v.x) && std::isfinite(v.y) && v.x >= 0.0 && v.x <= 1.0 && v.y >= 0.0 && v.y <= 1.0,
            ErrorCode::InvalidArgument, "obstacle footprint must lie inside the unit square");
    const Vec2& a = base_[(i + 1) % n];
    const Vec2& b = base_[(i + 2) % n];
    const double turn = cross({a.x - v.x, a.y - v.y}, {b.x - a.x, b.y - a.y});
    require(turn > 0.0, ErrorCode::InvalidArgument,
            "obstacle base must be strictly convex and counter-clockwise");
  }
  // Strict left turns everywhere still admit a star polygon winding twice.
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) area2 += cross(base_[i], base_[(i + 1) % n]);
  double angle = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& v = base_[i];
    const Vec2& a = base_[(i + 1) % n];
    const Vec2& b = base_[(i + 2) % n];
    const Vec2 e1{a.x - v.x, a.y - v.y};
    const Vec2 e2{b.x - a.x, b.y - a.y};
    angle += std::atan2(cross(e1, e2), e1.x * e2.x + e1.y * e2.y);
  }
  require(area2 > 0.0 && std::abs(angle - 2.0 * 3.14159265358979323846) < 1e-6, ErrorCode::InvalidArgument,
          "obstacle base must be a simple convex polygon");
}

Obstacle Obstacle::box(double x0, double y0, double x1, double y1, double height) {
  return Obstacle({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, height);
}

bool Obstacle::footprint_contains(double x, double y) const {
  const std::size_t n = base_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = base_[i];
    const Vec2& b = base_[(i + 1) % n];
    if (cross({b.x - a.x, b.y - a.y}, {x - a.x, y - a.y}) < 0.0) return false;
  }
  return true;
}

bool Obstacle::contains(const Vec3& p) const {
  return p.z >= 0.0 && p.z <= height_ && footprint_contains(p.x, p.y);
}

std::optional<Interval> Obstacle::clip(const Vec3& a, const Vec3& b) const {
  double lo = 0.0;
  double hi = 1.0;
  const Vec3 d = b - a;
  // 0 <= z <= height
  if (!clip_halfspace(a.z, d.z, lo, hi)) return std::nullopt;
  if (!clip_halfspace(height_ - a.z, -d.z, lo, hi)) return std::nullopt;
  const std::size_t n = base_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& v = base_[i];
    const Vec2& w = base_[(i + 1) % n];
    const Vec2 e{w.x - v.x, w.y - v.y};
    const double f0 = cross(e, {a.x - v.x, a.y - v.y});
    const double df = cross(e, {d.x, d.y});
    if (!clip_halfspace(f0, df, lo, hi)) return std::nullopt;
  }
  return Interval{lo, hi};
}

SegmentHit trace_segment(const Vec3& from, const Vec3& to, std::span<const Obstacle> obstacles) {
  std::vector<Interval> hits;
  hits.reserve(obstacles.size());
  for (const Obstacle& o : obstacles) {
    if (auto iv = o.clip(from, to)) hits.push_back(*iv);
  }
  SegmentHit result;
  if (hits.empty()) return result;
  std::sort(hits.begin(), hits.end(), [](const Interval& l, const Interval& r) { return l.enter < r.enter; });
  result.first_entry = hits.front().enter;

  double covered = 0.0;
  Interval run = hits.front();
  for (std::size_t i = 1; i < hits.size(); ++i) {
    if (hits[i].enter <= run.exit) {
      run.exit = std::max(run.exit, hits[i].exit);
    } else {
      covered += run.length();
      run = hits[i];
    }
  }
  covered += run.length();
  result.depth = covered * (to - from).norm();
  return result;
}

bool inside_any(const Vec3& p, std::span<const Obstacle> obstacles) {
  return std::any_of(obstacles.begin(), obstacles.end(), [&](const Obstacle& o) { return o.contains(p); });
}

}  // namespace uavnav
