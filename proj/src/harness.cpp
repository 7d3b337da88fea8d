#include "uavnav/harness.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "uavnav/error.hpp"
#include "uavnav/reward.hpp"

namespace uavnav {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kTrainEpisodeStream = 2;
constexpr std::uint64_t kEvalEpisodeStream = 3;

// Shortest representation that parses back to the same double.
std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_num(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    fail(ErrorCode::Io, "line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

Outcome parse_outcome(const std::string& s, std::size_t line) {
  for (auto o : {Outcome::InProgress, Outcome::Reached, Outcome::TimedOut, Outcome::Crashed})
    if (to_string(o) == s) return o;
  fail(ErrorCode::Io, "line " + std::to_string(line) + ": unknown outcome '" + s + "'");
}

std::uint64_t episode_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t episode) {
  return derive_seed(derive_seed(seed, stream), episode);
}

}  // namespace

Policy greedy_policy(const Agent& agent) {
  return [actor = agent.actor, codec = agent.codec()](const Observation& s) {
    return policy_action(actor, codec, s);
  };
}

namespace {

TrainResult run_training(const RunConfig& config, bool require_source) {
  config.validate(require_source);
  if (require_source)
    require(config.init_checkpoint.has_value(), ErrorCode::Config, "transfer needs init_checkpoint");

  // Fail on an unsatisfiable world before any work is done.
  (void)reset(config.world, episode_seed(config.seed, kTrainEpisodeStream, 0));

  Agent agent(config.agent_config(), config.bounds(), config.seed);
  if (config.init_checkpoint) transfer_weights(agent, load_agent_file(*config.init_checkpoint));

  fs::create_directories(config.output_dir);
  const std::string ckpt = (fs::path(config.output_dir) / "agent.ckpt").string();
  const std::string log = (fs::path(config.output_dir) / "episodes.csv").string();

  std::vector<EpisodeRecord> records;
  records.reserve(static_cast<std::size_t>(config.episodes));
  const int interval = config.checkpoint_interval();
  try {
    for (int e = 0; e < config.episodes; ++e) {
      const double eps = epsilon_at(e, config.episodes, config.agent.eps_start, config.agent.eps_end);
      EpisodeState state = reset(config.world, episode_seed(config.seed, kTrainEpisodeStream, e));
      EpisodeRecord rec;
      rec.episode = e;
      rec.epsilon = eps;
      while (!state.done) {
        const Observation obs = observe(state);
        const Action a = select_action(agent, obs, eps);
        const StepResult res = step(state, a, config.world);
        const double r = reward(distance(res.state.uav, res.state.target), res.sigma, config.reward);
        Transition t{obs, a, r, observe(res.state), res.state.outcome == Outcome::Crashed};
        if (res.reached && config.goal != GoalHandling::Bootstrap) {
          t.terminal = true;
          // Captured: the UAV holds the target and earns the best reward forever after.
          if (config.goal == GoalHandling::Absorbing)
            t.reward = r + config.agent.gamma * reward(0.0, 0.0, config.reward) / (1.0 - config.agent.gamma);
        }
        train_step(agent, t);
        rec.total_reward += r;
        if (res.sigma > 0.0) ++rec.crashes;
        state = res.state;
      }
      rec.steps = state.step_index;
      rec.outcome = state.outcome;
      rec.final_distance = distance(state.uav, state.target);
      records.push_back(rec);
      if ((e + 1) % interval == 0 && e + 1 < config.episodes) save_agent_file(agent, ckpt);
    }
  } catch (const Error& err) {
    if (err.code() == ErrorCode::Divergence) write_text_file(log, format_episode_log(records));
    throw;
  }
  save_agent_file(agent, ckpt);
  write_text_file(log, format_episode_log(records));
  return TrainResult{std::move(agent), std::move(records), ckpt};
}

}  // namespace

TrainResult train(const RunConfig& config) { return run_training(config, false); }

TrainResult transfer(const RunConfig& config) { return run_training(config, true); }

Trajectory rollout(const Policy& policy, const WorldSpec& world, const RewardParams& rp, std::uint64_t seed,
                   int episode_id) {
  Trajectory traj;
  traj.initial = reset(world, seed);
  EpisodeState state = traj.initial;
  while (!state.done) {
    const Action a = policy(observe(state));
    const StepResult res = step(state, a, world);
    TrajectoryRow row;
    row.episode = episode_id;
    row.step = res.state.step_index;
    row.uav = res.state.uav;
    row.target = res.state.target;
    row.action = a;
    row.sigma = res.sigma;
    row.reward = reward(distance(res.state.uav, res.state.target), res.sigma, rp);
    row.done = res.state.done;
    row.outcome = res.state.outcome;
    traj.rows.push_back(row);
    if (res.sigma > 0.0) ++traj.crashes;
    state = res.state;
  }
  return traj;
}

EvalReport evaluate(const Policy& policy, const WorldSpec& world, const RewardParams& rp, int episodes,
                    std::uint64_t seed, std::vector<Trajectory>* trajectories, int workers) {
  require(episodes >= 1, ErrorCode::InvalidArgument, "evaluate needs at least one episode");
  std::vector<Trajectory> runs(static_cast<std::size_t>(episodes));
  auto run_range = [&](int worker, int stride) {
    for (int i = worker; i < episodes; i += stride)
      runs[static_cast<std::size_t>(i)] = rollout(policy, world, rp, episode_seed(seed, kEvalEpisodeStream, i), i);
  };
  workers = std::clamp(workers, 1, episodes);
  if (workers == 1) {
    run_range(0, 1);
  } else {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    {
      std::vector<std::jthread> pool;
      for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          try {
            run_range(w, workers);
          } catch (...) {
            errors[static_cast<std::size_t>(w)] = std::current_exception();
          }
        });
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  EvalReport report;
  report.episodes = episodes;
  long success_steps = 0;
  for (const Trajectory& t : runs) {
    const Outcome outcome = t.rows.empty() ? Outcome::InProgress : t.rows.back().outcome;
    if (outcome == Outcome::Reached) ++report.reached;
    if (t.crashes > 0) ++report.crashed_episodes;
    if (outcome == Outcome::Reached && t.crashes == 0) {
      ++report.successes;
      success_steps += static_cast<long>(t.rows.size());
    }
  }
  report.completion_rate = static_cast<double>(report.successes) / episodes;
  report.crash_rate = static_cast<double>(report.crashed_episodes) / episodes;
  report.mean_steps = report.successes > 0 ? static_cast<double>(success_steps) / report.successes : 0.0;
  if (trajectories) *trajectories = std::move(runs);
  return report;
}

WorldSpec generate_world(std::uint64_t seed, int min_obstacles, int max_obstacles, const WorldSpec& base) {
  require(min_obstacles >= 0 && min_obstacles <= max_obstacles, ErrorCode::InvalidArgument,
          "need 0 <= min_obstacles <= max_obstacles");
  Rng rng(derive_seed(seed, 7));
  WorldSpec world = base;
  world.obstacles.clear();
  const int count = min_obstacles + static_cast<int>(rng.index(static_cast<std::uint64_t>(max_obstacles - min_obstacles + 1)));
  int attempts = 0;
  while (static_cast<int>(world.obstacles.size()) < count) {
    require(++attempts <= kMaxRejectionAttempts, ErrorCode::UnsatisfiableWorld, "cannot place obstacles");
    const double w = rng.uniform(0.1, 0.2);
    const double d = rng.uniform(0.1, 0.2);
    const double x0 = rng.uniform(0.05, 0.95 - w);
    const double y0 = rng.uniform(0.05, 0.95 - d);
    const double h = rng.uniform(0.3, 1.0);
    // Keep a gap between boxes so every pair of footprints is separable.
    bool overlaps = false;
    for (const Obstacle& o : world.obstacles) {
      const auto& b = o.base();
      const double ox0 = b[0].x, oy0 = b[0].y, ox1 = b[2].x, oy1 = b[2].y;
      if (x0 < ox1 + 0.05 && ox0 < x0 + w + 0.05 && y0 < oy1 + 0.05 && oy0 < y0 + d + 0.05) overlaps = true;
    }
    if (overlaps) continue;
    world.obstacles.push_back(Obstacle::box(x0, y0, x0 + w, y0 + d, h));
  }
  return world;
}

std::string format_episode_log(const std::vector<EpisodeRecord>& records) {
  std::string out = std::string(kEpisodeLogHeader) + "\n";
  for (const auto& r : records) {
    out += std::to_string(r.episode) + ',' + num(r.total_reward) + ',' + std::to_string(r.steps) + ',' +
           std::string(to_string(r.outcome)) + ',' + num(r.final_distance) + ',' + std::to_string(r.crashes) + ',' +
           num(r.epsilon) + '\n';
  }
  return out;
}

std::string format_trajectory_log(const std::vector<Trajectory>& trajectories) {
  std::string out = std::string(kTrajectoryLogHeader) + "\n";
  for (const auto& t : trajectories)
    for (const auto& r : t.rows) {
      out += std::to_string(r.episode) + ',' + std::to_string(r.step) + ',' + num(r.uav.x) + ',' + num(r.uav.y) +
             ',' + num(r.uav.z) + ',' + num(r.target.x) + ',' + num(r.target.y) + ',' + num(r.target.z) + ',' +
             num(r.action.rho) + ',' + num(r.action.phi) + ',' + num(r.action.psi) + ',' + num(r.sigma) + ',' +
             num(r.reward) + ',' + (r.done ? "1" : "0") + ',' + std::string(to_string(r.outcome)) + '\n';
    }
  return out;
}

std::vector<TrajectoryRow> parse_trajectory_log(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && line == kTrajectoryLogHeader, ErrorCode::Io,
          "trajectory log header mismatch");
  std::vector<TrajectoryRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    require(f.size() == 15, ErrorCode::Io, "line " + std::to_string(lineno) + ": expected 15 fields");
    TrajectoryRow r;
    r.episode = static_cast<int>(parse_num(f[0], lineno));
    r.step = static_cast<int>(parse_num(f[1], lineno));
    r.uav = {parse_num(f[2], lineno), parse_num(f[3], lineno), parse_num(f[4], lineno)};
    r.target = {parse_num(f[5], lineno), parse_num(f[6], lineno), parse_num(f[7], lineno)};
    r.action = {parse_num(f[8], lineno), parse_num(f[9], lineno), parse_num(f[10], lineno)};
    r.sigma = parse_num(f[11], lineno);
    r.reward = parse_num(f[12], lineno);
    r.done = f[13] == "1";
    r.outcome = parse_outcome(f[14], lineno);
    rows.push_back(r);
  }
  return rows;
}

std::string format_eval_report(const EvalReport& r) {
  nlohmann::ordered_json j = {{"episodes", r.episodes},
                              {"completion_rate", r.completion_rate},
                              {"mean_steps", r.mean_steps},
                              {"crash_rate", r.crash_rate},
                              {"reached", r.reached},
                              {"successes", r.successes},
                              {"crashed_episodes", r.crashed_episodes}};
  return j.dump(2) + "\n";
}

void write_rollout(const std::string& csv_path, const Trajectory& trajectory, const WorldSpec& world) {
  write_text_file(csv_path, format_trajectory_log({trajectory}));
  const auto& s = trajectory.initial;
  nlohmann::ordered_json side;
  side["world"] = nlohmann::json::parse(to_json(world));
  side["initial"] = {{"uav", {s.uav.x, s.uav.y, s.uav.z}}, {"target", {s.target.x, s.target.y, s.target.z}}};
  write_text_file(csv_path + ".world.json", side.dump(2) + "\n");
}

void write_text_file(const std::string& path, const std::string& content) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + path + " for writing");
  out << content;
  require(static_cast<bool>(out), ErrorCode::Io, "failed writing " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace uavnav
