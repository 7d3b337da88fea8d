#include "uavnav/uavnav.h"

#include <exception>
#include <filesystem>
#include <string>

#include "uavnav/config.hpp"
#include "uavnav/error.hpp"
#include "uavnav/harness.hpp"

struct uavnav_config {
  uavnav::RunConfig value;
};

struct uavnav_world {
  uavnav::WorldSpec value;
};

struct uavnav_agent {
  uavnav::Agent value;
};

struct uavnav_episode {
  uavnav::WorldSpec world;
  uavnav::EpisodeState state;
};

namespace {

thread_local std::string g_last_error;

uavnav_status to_status(uavnav::ErrorCode code) {
  using uavnav::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return UAVNAV_ERR_INVALID_ARGUMENT;
    case ErrorCode::Shape: return UAVNAV_ERR_SHAPE;
    case ErrorCode::UnsatisfiableWorld: return UAVNAV_ERR_UNSATISFIABLE_WORLD;
    case ErrorCode::ContractViolation: return UAVNAV_ERR_CONTRACT;
    case ErrorCode::Divergence: return UAVNAV_ERR_DIVERGENCE;
    case ErrorCode::CorruptCheckpoint:
    case ErrorCode::IncompatibleCheckpoint: return UAVNAV_ERR_CHECKPOINT;
    case ErrorCode::Config: return UAVNAV_ERR_CONFIG;
    case ErrorCode::Io: return UAVNAV_ERR_IO;
  }
  return UAVNAV_ERR_INTERNAL;
}

uavnav_status set_error(uavnav_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
uavnav_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return UAVNAV_OK;
  } catch (const uavnav::Error& e) {
    return set_error(to_status(e.code()), std::string(uavnav::to_string(e.code())) + ": " + e.what());
  } catch (const std::bad_alloc&) {
    return set_error(UAVNAV_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(UAVNAV_ERR_INTERNAL, e.what());
  }
}

#define UAVNAV_REQUIRE_ARG(cond)                                                      \
  do {                                                                                \
    if (!(cond)) return set_error(UAVNAV_ERR_INVALID_ARGUMENT, "null argument: " #cond); \
  } while (0)

uavnav_outcome to_c(uavnav::Outcome o) {
  switch (o) {
    case uavnav::Outcome::InProgress: return UAVNAV_IN_PROGRESS;
    case uavnav::Outcome::Reached: return UAVNAV_REACHED;
    case uavnav::Outcome::TimedOut: return UAVNAV_TIMED_OUT;
    case uavnav::Outcome::Crashed: return UAVNAV_CRASHED;
  }
  return UAVNAV_IN_PROGRESS;
}

uavnav_status train_impl(const uavnav_config* config, uavnav_agent** out, bool transfer) {
  UAVNAV_REQUIRE_ARG(config);
  return guarded([&] {
    uavnav::TrainResult result = transfer ? uavnav::transfer(config->value) : uavnav::train(config->value);
    if (out) *out = new uavnav_agent{std::move(result.agent)};
  });
}

}  // namespace

extern "C" {

const char* uavnav_version(void) { return "0.1.0"; }

const char* uavnav_last_error(void) { return g_last_error.c_str(); }

const char* uavnav_status_string(uavnav_status status) {
  switch (status) {
    case UAVNAV_OK: return "ok";
    case UAVNAV_ERR_INVALID_ARGUMENT: return "invalid argument";
    case UAVNAV_ERR_CONFIG: return "config error";
    case UAVNAV_ERR_DIVERGENCE: return "training divergence";
    case UAVNAV_ERR_CHECKPOINT: return "checkpoint error";
    case UAVNAV_ERR_UNSATISFIABLE_WORLD: return "unsatisfiable world";
    case UAVNAV_ERR_CONTRACT: return "contract violation";
    case UAVNAV_ERR_IO: return "i/o error";
    case UAVNAV_ERR_SHAPE: return "shape error";
    case UAVNAV_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

uavnav_status uavnav_config_load(const char* path, uavnav_config** out) {
  UAVNAV_REQUIRE_ARG(path && out);
  return guarded([&] { *out = new uavnav_config{uavnav::load_run_config(path)}; });
}

uavnav_status uavnav_config_parse(const char* json_text, uavnav_config** out) {
  UAVNAV_REQUIRE_ARG(json_text && out);
  return guarded([&] { *out = new uavnav_config{uavnav::parse_run_config(json_text)}; });
}

uavnav_status uavnav_config_preset(const char* name, uavnav_config** out) {
  UAVNAV_REQUIRE_ARG(name && out);
  return guarded([&] { *out = new uavnav_config{uavnav::preset(name)}; });
}

void uavnav_config_free(uavnav_config* config) { delete config; }

uavnav_status uavnav_config_set_seed(uavnav_config* config, uint64_t seed) {
  UAVNAV_REQUIRE_ARG(config);
  config->value.seed = seed;
  return UAVNAV_OK;
}

uavnav_status uavnav_config_set_output_dir(uavnav_config* config, const char* dir) {
  UAVNAV_REQUIRE_ARG(config && dir);
  config->value.output_dir = dir;
  return UAVNAV_OK;
}

uavnav_status uavnav_config_set_episodes(uavnav_config* config, int episodes) {
  UAVNAV_REQUIRE_ARG(config);
  if (episodes < 0) return set_error(UAVNAV_ERR_CONFIG, "episodes must be >= 0");
  config->value.episodes = episodes;
  return UAVNAV_OK;
}

uavnav_status uavnav_config_set_init_checkpoint(uavnav_config* config, const char* path) {
  UAVNAV_REQUIRE_ARG(config);
  if (!path) {
    config->value.init_checkpoint.reset();
    return UAVNAV_OK;
  }
  if (!std::filesystem::exists(path))
    return set_error(UAVNAV_ERR_CONFIG, std::string("init_checkpoint ") + path + " not found");
  config->value.init_checkpoint = path;
  return UAVNAV_OK;
}

uavnav_status uavnav_config_set_world(uavnav_config* config, const uavnav_world* world) {
  UAVNAV_REQUIRE_ARG(config && world);
  config->value.world = world->value;
  return UAVNAV_OK;
}

int uavnav_config_eval_episodes(const uavnav_config* config) { return config ? config->value.eval_episodes : 0; }

const char* uavnav_config_output_dir(const uavnav_config* config) {
  return config ? config->value.output_dir.c_str() : "";
}

uavnav_status uavnav_config_save(const uavnav_config* config, const char* path) {
  UAVNAV_REQUIRE_ARG(config && path);
  return guarded([&] { uavnav::write_text_file(path, uavnav::to_json(config->value)); });
}

uavnav_status uavnav_world_load(const char* path, uavnav_world** out) {
  UAVNAV_REQUIRE_ARG(path && out);
  return guarded([&] { *out = new uavnav_world{uavnav::load_world(path)}; });
}

uavnav_status uavnav_world_from_config(const uavnav_config* config, uavnav_world** out) {
  UAVNAV_REQUIRE_ARG(config && out);
  return guarded([&] { *out = new uavnav_world{config->value.world}; });
}

uavnav_status uavnav_world_generate(uint64_t seed, int min_obstacles, int max_obstacles, const uavnav_world* base,
                                    uavnav_world** out) {
  UAVNAV_REQUIRE_ARG(out);
  return guarded([&] {
    *out = new uavnav_world{
        uavnav::generate_world(seed, min_obstacles, max_obstacles, base ? base->value : uavnav::WorldSpec{})};
  });
}

uavnav_status uavnav_world_save(const uavnav_world* world, const char* path) {
  UAVNAV_REQUIRE_ARG(world && path);
  return guarded([&] { uavnav::write_text_file(path, uavnav::to_json(world->value)); });
}

int uavnav_world_obstacle_count(const uavnav_world* world) {
  return world ? static_cast<int>(world->value.obstacles.size()) : 0;
}

void uavnav_world_free(uavnav_world* world) { delete world; }

uavnav_status uavnav_episode_reset(const uavnav_world* world, uint64_t seed, uavnav_episode** out) {
  UAVNAV_REQUIRE_ARG(world && out);
  return guarded([&] { *out = new uavnav_episode{world->value, uavnav::reset(world->value, seed)}; });
}

uavnav_status uavnav_episode_step(uavnav_episode* episode, const double action[3], double* sigma, int* reached,
                                  int* done) {
  UAVNAV_REQUIRE_ARG(episode && action);
  return guarded([&] {
    const uavnav::StepResult r = uavnav::step(episode->state, {action[0], action[1], action[2]}, episode->world);
    episode->state = r.state;
    if (sigma) *sigma = r.sigma;
    if (reached) *reached = r.reached ? 1 : 0;
    if (done) *done = r.state.done ? 1 : 0;
  });
}

uavnav_status uavnav_episode_observe(const uavnav_episode* episode, double observation[6]) {
  UAVNAV_REQUIRE_ARG(episode && observation);
  const uavnav::Observation obs = uavnav::observe(episode->state);
  for (std::size_t i = 0; i < obs.size(); ++i) observation[i] = obs[i];
  return UAVNAV_OK;
}

uavnav_outcome uavnav_episode_outcome(const uavnav_episode* episode) {
  return episode ? to_c(episode->state.outcome) : UAVNAV_IN_PROGRESS;
}

int uavnav_episode_step_index(const uavnav_episode* episode) { return episode ? episode->state.step_index : 0; }

void uavnav_episode_free(uavnav_episode* episode) { delete episode; }

double uavnav_reward(const uavnav_config* config, double distance, double sigma) {
  return uavnav::reward(distance, sigma, config ? config->value.reward : uavnav::RewardParams{});
}

uavnav_status uavnav_train(const uavnav_config* config, uavnav_agent** out) { return train_impl(config, out, false); }

uavnav_status uavnav_transfer(const uavnav_config* config, uavnav_agent** out) {
  return train_impl(config, out, true);
}

uavnav_status uavnav_agent_load(const char* path, uavnav_agent** out) {
  UAVNAV_REQUIRE_ARG(path && out);
  return guarded([&] { *out = new uavnav_agent{uavnav::load_agent_file(path)}; });
}

uavnav_status uavnav_agent_save(const uavnav_agent* agent, const char* path) {
  UAVNAV_REQUIRE_ARG(agent && path);
  return guarded([&] { uavnav::save_agent_file(agent->value, path); });
}

uavnav_status uavnav_agent_act(const uavnav_agent* agent, const double observation[6], double action[3]) {
  UAVNAV_REQUIRE_ARG(agent && observation && action);
  return guarded([&] {
    uavnav::Observation obs;
    for (std::size_t i = 0; i < obs.size(); ++i) obs[i] = observation[i];
    const uavnav::Action a = uavnav::policy_action(agent->value.actor, agent->value.codec(), obs);
    action[0] = a.rho;
    action[1] = a.phi;
    action[2] = a.psi;
  });
}

void uavnav_agent_free(uavnav_agent* agent) { delete agent; }

uavnav_status uavnav_evaluate(const uavnav_agent* agent, const uavnav_world* world, const uavnav_config* config,
                              int episodes, uint64_t seed, const char* out_dir, uavnav_eval_report* report) {
  UAVNAV_REQUIRE_ARG(agent && world && config && report);
  return guarded([&] {
    std::vector<uavnav::Trajectory> trajectories;
    const uavnav::EvalReport r =
        uavnav::evaluate(uavnav::greedy_policy(agent->value), world->value, config->value.reward, episodes, seed,
                         out_dir ? &trajectories : nullptr, config->value.eval_workers);
    if (out_dir) {
      const std::filesystem::path dir(out_dir);
      uavnav::write_text_file((dir / "report.json").string(), uavnav::format_eval_report(r));
      uavnav::write_text_file((dir / "trajectories.csv").string(), uavnav::format_trajectory_log(trajectories));
    }
    *report = {r.episodes, r.reached, r.successes, r.crashed_episodes, r.completion_rate, r.mean_steps, r.crash_rate};
  });
}

uavnav_status uavnav_rollout(const uavnav_agent* agent, const uavnav_world* world, const uavnav_config* config,
                             uint64_t seed, const char* csv_path, uavnav_outcome* outcome) {
  UAVNAV_REQUIRE_ARG(agent && world && config && csv_path);
  return guarded([&] {
    const uavnav::Trajectory t =
        uavnav::rollout(uavnav::greedy_policy(agent->value), world->value, config->value.reward, seed);
    uavnav::write_rollout(csv_path, t, world->value);
    if (outcome) *outcome = to_c(t.rows.empty() ? uavnav::Outcome::InProgress : t.rows.back().outcome);
  });
}

}  // extern "C"
