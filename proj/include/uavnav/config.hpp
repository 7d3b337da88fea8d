#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "uavnav/ddpg.hpp"
#include "uavnav/env.hpp"
#include "uavnav/reward.hpp"

namespace uavnav {

/// How a transition that reaches the target enters the Bellman target.
///   Bootstrap: ordinary transition, value continues from the next state.
///   Terminal: y = r.
///   Absorbing: reaching captures the target; the UAV then sits on it and
///              earns reward(0, 0) every step, so y = r + gamma r00 / (1 - gamma).
enum class GoalHandling : std::uint8_t { Bootstrap, Terminal, Absorbing };

std::string_view to_string(GoalHandling g);
GoalHandling parse_goal_handling(std::string_view name);

/// Everything a training or evaluation run needs.
struct RunConfig {
  std::string preset = "desk";
  WorldSpec world;
  RewardParams reward;
  AgentConfig agent;
  int episodes = 3000;  // M
  std::uint64_t seed = 1;
  std::string output_dir = "run";
  std::optional<std::string> init_checkpoint;
  int eval_episodes = 200;
  /// 0 selects max(1, episodes / 20).
  int checkpoint_every = 0;
  int eval_workers = 1;
  GoalHandling goal = GoalHandling::Absorbing;
  /// Clip bootstrap values to the returns the reward can produce,
  /// [min r, max r] / (1 - gamma).
  bool clip_values = true;

  /// Agent settings for a run: `agent` plus the value range when clipping.
  AgentConfig agent_config() const;

  int steps_per_episode() const { return world.max_steps; }  // T
  int checkpoint_interval() const;
  ActionBounds bounds() const { return {world.rho_min, world.rho_max}; }
  /// Transfer runs may fine-tune for zero episodes.
  void validate(bool allow_zero_episodes = false) const;
};

/// Desk-scale defaults: minutes of compute on one core.
RunConfig desk_preset();
/// Hyperparameters exactly as tabulated for the full-scale experiment.
RunConfig paper_preset();
RunConfig preset(std::string_view name);

/// Parses a JSON run configuration. Unknown keys are rejected; relative file
/// references resolve against `base_dir`.
RunConfig parse_run_config(std::string_view text, const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);
std::string to_json(const RunConfig& config);

WorldSpec parse_world(std::string_view text);
WorldSpec load_world(const std::string& path);
std::string to_json(const WorldSpec& world);

}  // namespace uavnav
