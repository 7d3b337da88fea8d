#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "uavnav/geometry.hpp"

namespace uavnav::oracle {

/// Even-odd ray casting; deliberately not the half-plane test the library uses.
inline bool polygon_contains(const std::vector<Vec2>& poly, double x, double y) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y > y) != (b.y > y) && x < (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x) inside = !inside;
  }
  return inside;
}

inline bool inside_prism(const Obstacle& o, const Vec3& p) {
  return p.z > 0.0 && p.z < o.height() && polygon_contains(o.base(), p.x, p.y);
}

/// Length of from->to inside the union of prisms, by midpoint sampling of
/// the segment parameter.
inline double sampled_crash_depth(const Vec3& from, const Vec3& to, std::span<const Obstacle> obstacles,
                                  int samples = 1'000'000) {
  const Vec3 d = to - from;
  long inside = 0;
  for (int k = 0; k < samples; ++k) {
    const double t = (k + 0.5) / samples;
    const Vec3 p{from.x + t * d.x, from.y + t * d.y, from.z + t * d.z};
    for (const Obstacle& o : obstacles)
      if (inside_prism(o, p)) {
        ++inside;
        break;
      }
  }
  return static_cast<double>(inside) / samples * std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
}

/// Stratified Monte Carlo version: one uniform draw of the segment parameter
/// in each of `samples` equal strata.
template <class Rng>
double jittered_crash_depth(const Vec3& from, const Vec3& to, std::span<const Obstacle> obstacles, int samples,
                            Rng& rng) {
  const Vec3 d = to - from;
  long inside = 0;
  for (int k = 0; k < samples; ++k) {
    const double t = (k + rng.uniform()) / samples;
    const Vec3 p{from.x + t * d.x, from.y + t * d.y, from.z + t * d.z};
    for (const Obstacle& o : obstacles)
      if (inside_prism(o, p)) {
        ++inside;
        break;
      }
  }
  return static_cast<double>(inside) / samples * std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
}

/// Spherical to Cartesian via rotations of the +Z unit vector: tilt by the
/// polar angle about Y, then spin by the azimuth about Z.
inline Vec3 spherical_by_rotation(double rho, double phi, double psi) {
  const Eigen::Vector3d v = Eigen::AngleAxisd(psi, Eigen::Vector3d::UnitZ()) *
                            (Eigen::AngleAxisd(phi, Eigen::Vector3d::UnitY()) * Eigen::Vector3d(0, 0, rho));
  return {v.x(), v.y(), v.z()};
}

/// Central differences of a scalar function with respect to each entry of x.
inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// |a - b| / max(|a|, |b|, floor); the floor keeps near-zero entries from
/// amplifying round-off.
inline double relative_error(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace uavnav::oracle
