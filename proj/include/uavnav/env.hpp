#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "uavnav/geometry.hpp"
#include "uavnav/rng.hpp"

namespace uavnav {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
/// Distance the UAV backs off from the face it collided with.
inline constexpr double kCollisionMargin = 1e-4;
inline constexpr int kMaxRejectionAttempts = 10000;
inline constexpr std::size_t kObservationSize = 6;
inline constexpr std::size_t kActionSize = 3;

enum class TargetMode { Static, Moving };
enum class Outcome { InProgress, Reached, TimedOut, Crashed };

std::string_view to_string(TargetMode mode);
std::string_view to_string(Outcome outcome);
TargetMode parse_target_mode(std::string_view text);

/// One movement step in spherical coordinates: radial length, polar angle
/// measured from +Z, azimuth measured from +X.
struct Action {
  double rho = 0.0;
  double phi = 0.0;
  double psi = 0.0;

  friend bool operator==(const Action&, const Action&) = default;
};

struct WorldSpec {
  std::vector<Obstacle> obstacles;
  TargetMode target_mode = TargetMode::Static;
  double target_speed = 0.1;
  double rho_min = 0.0;
  double rho_max = 0.2;
  double reach_radius = 0.05;
  int max_steps = 100;
  /// End the episode on the first collision instead of stopping the UAV.
  bool terminal_on_crash = false;

  void validate() const;
  bool action_valid(const Action& a) const;
};

/// Random-waypoint generator for a moving destination. Seeded at reset, so
/// the whole path is fixed before the episode starts.
struct TargetTrajectory {
  Rng rng;
  Vec3 waypoint;

  friend bool operator==(const TargetTrajectory&, const TargetTrajectory&) = default;
};

struct EpisodeState {
  Vec3 uav;
  Vec3 target;
  int step_index = 0;
  double last_sigma = 0.0;
  bool done = false;
  Outcome outcome = Outcome::InProgress;
  TargetTrajectory trajectory;

  friend bool operator==(const EpisodeState&, const EpisodeState&) = default;
};

struct StepResult {
  EpisodeState state;
  double sigma = 0.0;
  bool reached = false;
};

using Observation = std::array<double, kObservationSize>;

EpisodeState reset(const WorldSpec& spec, std::uint64_t seed);

Vec3 displacement(const Action& a);

/// Length of from->to inside the union of obstacle volumes.
double crash_depth(const Vec3& from, const Vec3& to, std::span<const Obstacle> obstacles);

/// Throws ContractViolation when `state` is already done.
StepResult step(const EpisodeState& state, const Action& a, const WorldSpec& spec);

/// Advances the destination one step along its trajectory. Updates the
/// trajectory state when a waypoint is consumed.
Vec3 move_target(const Vec3& target, TargetTrajectory& trajectory, const WorldSpec& spec);

double distance(const Vec3& u, const Vec3& d);

Observation observe(const EpisodeState& state);

}  // namespace uavnav
