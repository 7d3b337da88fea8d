#include "uavnav/env.hpp"

#include <cmath>
#include <string>

#include "uavnav/error.hpp"

namespace uavnav {

namespace {

constexpr std::uint64_t kStartStream = 0;
constexpr std::uint64_t kTargetStream = 1;

Vec3 uniform_point(Rng& rng) {
  const double x = rng.uniform();
  const double y = rng.uniform();
  const double z = rng.uniform();
  return {x, y, z};
}

// Uniform point outside every obstacle such that the straight path from
// `from` stays clear. Falls back to `from` when the attempts run out.
Vec3 draw_waypoint(const Vec3& from, Rng& rng, const WorldSpec& spec) {
  for (int attempt = 0; attempt < kMaxRejectionAttempts; ++attempt) {
    const Vec3 p = uniform_point(rng);
    if (inside_any(p, spec.obstacles)) continue;
    if (trace_segment(from, p, spec.obstacles).first_entry) continue;
    return p;
  }
  return from;
}

}  // namespace

std::string_view to_string(TargetMode mode) { return mode == TargetMode::Static ? "static" : "moving"; }

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::InProgress: return "in_progress";
    case Outcome::Reached: return "reached";
    case Outcome::TimedOut: return "timed_out";
    case Outcome::Crashed: return "crashed";
  }
  return "unknown";
}

TargetMode parse_target_mode(std::string_view text) {
  if (text == "static") return TargetMode::Static;
  if (text == "moving") return TargetMode::Moving;
  fail(ErrorCode::Config, "unknown target mode '" + std::string(text) + "'");
}

void WorldSpec::validate() const {
  require(std::isfinite(rho_min) && std::isfinite(rho_max) && rho_min >= 0.0 && rho_min <= rho_max,
          ErrorCode::InvalidArgument, "need 0 <= rho_min <= rho_max");
  require(rho_max <= 1.0, ErrorCode::InvalidArgument, "rho_max must not exceed 1");
  require(std::isfinite(reach_radius) && reach_radius > 0.0, ErrorCode::InvalidArgument, "reach_radius must be > 0");
  require(max_steps >= 1, ErrorCode::InvalidArgument, "max_steps must be >= 1");
  require(std::isfinite(target_speed) && target_speed >= 0.0, ErrorCode::InvalidArgument,
          "target_speed must be >= 0");
}

bool WorldSpec::action_valid(const Action& a) const {
  return a.rho >= rho_min && a.rho <= rho_max && a.phi >= 0.0 && a.phi <= kPi && a.psi >= 0.0 && a.psi <= kTwoPi;
}

EpisodeState reset(const WorldSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(derive_seed(seed, kStartStream));
  EpisodeState state;
  int attempts = 0;
  auto exhausted = [&] {
    if (++attempts > kMaxRejectionAttempts)
      fail(ErrorCode::UnsatisfiableWorld, "no free start/target pair after " +
                                              std::to_string(kMaxRejectionAttempts) + " attempts");
  };
  do {
    exhausted();
    state.uav = uniform_point(rng);
  } while (inside_any(state.uav, spec.obstacles));
  do {
    exhausted();
    state.target = uniform_point(rng);
  } while (inside_any(state.target, spec.obstacles) || distance(state.uav, state.target) <= spec.reach_radius);

  state.trajectory.rng = Rng(derive_seed(seed, kTargetStream));
  state.trajectory.waypoint = state.target;
  if (spec.target_mode == TargetMode::Moving)
    state.trajectory.waypoint = draw_waypoint(state.target, state.trajectory.rng, spec);
  return state;
}

Vec3 displacement(const Action& a) {
  const double s = std::sin(a.phi);
  return {a.rho * s * std::cos(a.psi), a.rho * s * std::sin(a.psi), a.rho * std::cos(a.phi)};
}

double crash_depth(const Vec3& from, const Vec3& to, std::span<const Obstacle> obstacles) {
  return trace_segment(from, to, obstacles).depth;
}

Vec3 move_target(const Vec3& target, TargetTrajectory& trajectory, const WorldSpec& spec) {
  const double speed = spec.target_speed;
  if (speed == 0.0) return target;
  const Vec3 to_waypoint = trajectory.waypoint - target;
  const double gap = to_waypoint.norm();
  if (gap <= speed) {
    const Vec3 arrived = trajectory.waypoint;
    trajectory.waypoint = draw_waypoint(arrived, trajectory.rng, spec);
    return arrived;
  }
  return target + (speed / gap) * to_waypoint;
}

StepResult step(const EpisodeState& state, const Action& a, const WorldSpec& spec) {
  require(!state.done, ErrorCode::ContractViolation, "step called on a finished episode");
  require(spec.action_valid(a), ErrorCode::InvalidArgument, "action outside its ranges");

  StepResult out{state, 0.0, false};
  EpisodeState& next = out.state;

  const Vec3 intended = clamp_unit(state.uav + displacement(a));
  const SegmentHit hit = trace_segment(state.uav, intended, spec.obstacles);
  out.sigma = hit.depth;
  if (hit.first_entry) {
    const Vec3 path = intended - state.uav;
    const double length = path.norm();
    const double t_stop = length > 0.0 ? std::max(0.0, *hit.first_entry - kCollisionMargin / length) : 0.0;
    next.uav = state.uav + t_stop * path;
  } else {
    next.uav = intended;
  }

  if (spec.target_mode == TargetMode::Moving)
    next.target = move_target(state.target, next.trajectory, spec);

  next.step_index = state.step_index + 1;
  next.last_sigma = out.sigma;
  out.reached = distance(next.uav, next.target) <= spec.reach_radius;
  const bool crashed_out = spec.terminal_on_crash && out.sigma > 0.0;
  if (out.reached)
    next.outcome = Outcome::Reached;
  else if (crashed_out)
    next.outcome = Outcome::Crashed;
  else if (next.step_index >= spec.max_steps)
    next.outcome = Outcome::TimedOut;
  next.done = next.outcome != Outcome::InProgress;
  return out;
}

double distance(const Vec3& u, const Vec3& d) { return (u - d).norm(); }

Observation observe(const EpisodeState& state) {
  return {state.uav.x, state.uav.y, state.uav.z, state.target.x, state.target.y, state.target.z};
}

}  // namespace uavnav
