#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "uavnav/config.hpp"
#include "uavnav/ddpg.hpp"
#include "uavnav/env.hpp"

namespace uavnav {

struct EpisodeRecord {
  int episode = 0;
  double total_reward = 0.0;
  int steps = 0;
  Outcome outcome = Outcome::InProgress;
  double final_distance = 0.0;
  int crashes = 0;
  double epsilon = 0.0;
};

struct TrajectoryRow {
  int episode = 0;
  int step = 0;
  Vec3 uav;
  Vec3 target;
  Action action;
  double sigma = 0.0;
  double reward = 0.0;
  bool done = false;
  Outcome outcome = Outcome::InProgress;
};

struct Trajectory {
  EpisodeState initial;
  std::vector<TrajectoryRow> rows;
  int crashes = 0;
};

using Policy = std::function<Action(const Observation&)>;

Policy greedy_policy(const Agent& agent);

struct TrainResult {
  Agent agent;
  std::vector<EpisodeRecord> records;
  std::string checkpoint_path;
};

/// Runs the M x T loop. With `init_checkpoint` set the networks start from it.
/// Writes episodes.csv and agent.ckpt under the output directory.
TrainResult train(const RunConfig& config);

/// Like train, but requires `init_checkpoint` and fails on an incompatible one.
TrainResult transfer(const RunConfig& config);

struct EvalReport {
  int episodes = 0;
  int reached = 0;
  int successes = 0;  // reached with no collision
  int crashed_episodes = 0;
  double completion_rate = 0.0;
  double mean_steps = 0.0;  // over successes
  double crash_rate = 0.0;  // fraction of episodes with any collision
};

/// Greedy episodes on independent derived seeds. `workers` > 1 runs them on
/// threads; the report does not depend on the worker count.
EvalReport evaluate(const Policy& policy, const WorldSpec& world, const RewardParams& reward, int episodes,
                    std::uint64_t seed, std::vector<Trajectory>* trajectories = nullptr, int workers = 1);

Trajectory rollout(const Policy& policy, const WorldSpec& world, const RewardParams& reward, std::uint64_t seed,
                   int episode_id = 0);

/// Random world with a box count drawn from [min_obstacles, max_obstacles].
WorldSpec generate_world(std::uint64_t seed, int min_obstacles, int max_obstacles, const WorldSpec& base = {});

inline constexpr const char* kEpisodeLogHeader = "episode,total_reward,steps,outcome,final_distance,crashes,epsilon";
inline constexpr const char* kTrajectoryLogHeader =
    "episode,step,uav_x,uav_y,uav_z,target_x,target_y,target_z,rho,phi,psi,sigma,reward,done,outcome";

std::string format_episode_log(const std::vector<EpisodeRecord>& records);
std::string format_trajectory_log(const std::vector<Trajectory>& trajectories);
std::vector<TrajectoryRow> parse_trajectory_log(const std::string& text);
std::string format_eval_report(const EvalReport& report);

/// Trajectory log plus a `.world.json` sidecar holding the obstacles and the
/// initial positions.
void write_rollout(const std::string& csv_path, const Trajectory& trajectory, const WorldSpec& world);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace uavnav
