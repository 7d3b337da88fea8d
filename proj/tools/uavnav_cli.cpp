// Command-line front end; talks to the library only through the C API.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "uavnav/uavnav.h"

namespace {

struct ConfigDeleter {
  void operator()(uavnav_config* c) const { uavnav_config_free(c); }
};
struct WorldDeleter {
  void operator()(uavnav_world* w) const { uavnav_world_free(w); }
};
struct AgentDeleter {
  void operator()(uavnav_agent* a) const { uavnav_agent_free(a); }
};
using ConfigPtr = std::unique_ptr<uavnav_config, ConfigDeleter>;
using WorldPtr = std::unique_ptr<uavnav_world, WorldDeleter>;
using AgentPtr = std::unique_ptr<uavnav_agent, AgentDeleter>;

struct Failure {
  uavnav_status status;
};

void check(uavnav_status s) {
  if (s != UAVNAV_OK) throw Failure{s};
}

int exit_code(uavnav_status s) {
  switch (s) {
    case UAVNAV_ERR_CONFIG:
    case UAVNAV_ERR_DIVERGENCE:
    case UAVNAV_ERR_CHECKPOINT: return static_cast<int>(s);
    default: return 1;
  }
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Common& c, bool config_required = true) {
  auto* opt = cmd->add_option("-c,--config", c.config, "Run configuration (JSON)");
  if (config_required) opt->required();
  cmd->add_option("--seed", c.seed, "Override the seed");
  cmd->add_option("--out", c.out, "Override the output location");
}

ConfigPtr load_config(const Common& c) {
  uavnav_config* raw = nullptr;
  if (c.config.empty())
    check(uavnav_config_preset("desk", &raw));
  else
    check(uavnav_config_load(c.config.c_str(), &raw));
  ConfigPtr cfg(raw);
  if (c.seed) check(uavnav_config_set_seed(cfg.get(), *c.seed));
  return cfg;
}

WorldPtr world_for(const uavnav_config* cfg, const std::string& world_path) {
  uavnav_world* raw = nullptr;
  if (world_path.empty())
    check(uavnav_world_from_config(cfg, &raw));
  else
    check(uavnav_world_load(world_path.c_str(), &raw));
  return WorldPtr(raw);
}

AgentPtr load_agent(const std::string& path) {
  uavnav_agent* raw = nullptr;
  check(uavnav_agent_load(path.c_str(), &raw));
  return AgentPtr(raw);
}

std::uint64_t seed_of(const Common& c, std::uint64_t fallback) { return c.seed.value_or(fallback); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV navigation with DDPG: training, transfer, evaluation"};
  app.require_subcommand(1);

  Common train_opts;
  std::optional<int> train_episodes;
  auto* train_cmd = app.add_subcommand("train", "Train an agent from scratch");
  add_common(train_cmd, train_opts);
  train_cmd->add_option("--episodes", train_episodes, "Override M");

  Common transfer_opts;
  std::string transfer_from;
  std::optional<int> transfer_episodes;
  auto* transfer_cmd = app.add_subcommand("transfer", "Fine-tune a trained agent in a new world");
  add_common(transfer_cmd, transfer_opts);
  transfer_cmd->add_option("--from", transfer_from, "Source checkpoint (defaults to init_checkpoint)");
  transfer_cmd->add_option("--episodes", transfer_episodes, "Override M");

  Common eval_opts;
  std::string eval_ckpt, eval_world;
  std::optional<int> eval_episodes;
  auto* eval_cmd = app.add_subcommand("eval", "Greedy evaluation campaign");
  add_common(eval_cmd, eval_opts);
  eval_cmd->add_option("--checkpoint", eval_ckpt, "Agent checkpoint")->required();
  eval_cmd->add_option("--world", eval_world, "World file (defaults to the config's world)");
  eval_cmd->add_option("--episodes", eval_episodes, "Number of episodes (defaults to eval_episodes)");

  Common rollout_opts;
  std::string rollout_ckpt, rollout_world;
  auto* rollout_cmd = app.add_subcommand("rollout", "Log a single greedy trajectory");
  add_common(rollout_cmd, rollout_opts);
  rollout_cmd->add_option("--checkpoint", rollout_ckpt, "Agent checkpoint")->required();
  rollout_cmd->add_option("--world", rollout_world, "World file (defaults to the config's world)");

  Common gen_opts;
  int min_obstacles = 3, max_obstacles = 5;
  auto* gen_cmd = app.add_subcommand("gen-world", "Generate a random box-obstacle world");
  add_common(gen_cmd, gen_opts, false);
  gen_cmd->add_option("--min-obstacles", min_obstacles, "Fewest boxes")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--max-obstacles", max_obstacles, "Most boxes")->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed() || transfer_cmd->parsed()) {
      const bool is_transfer = transfer_cmd->parsed();
      const Common& opts = is_transfer ? transfer_opts : train_opts;
      ConfigPtr cfg = load_config(opts);
      if (opts.out) check(uavnav_config_set_output_dir(cfg.get(), opts.out->c_str()));
      const auto& episodes = is_transfer ? transfer_episodes : train_episodes;
      if (episodes) check(uavnav_config_set_episodes(cfg.get(), *episodes));
      if (is_transfer && !transfer_from.empty())
        check(uavnav_config_set_init_checkpoint(cfg.get(), transfer_from.c_str()));
      check(is_transfer ? uavnav_transfer(cfg.get(), nullptr) : uavnav_train(cfg.get(), nullptr));
      std::printf("wrote %s/agent.ckpt and %s/episodes.csv\n", uavnav_config_output_dir(cfg.get()),
                  uavnav_config_output_dir(cfg.get()));
    } else if (eval_cmd->parsed()) {
      ConfigPtr cfg = load_config(eval_opts);
      WorldPtr world = world_for(cfg.get(), eval_world);
      AgentPtr agent = load_agent(eval_ckpt);
      const std::string out = eval_opts.out.value_or(uavnav_config_output_dir(cfg.get()));
      uavnav_eval_report report{};
      check(uavnav_evaluate(agent.get(), world.get(), cfg.get(), eval_episodes.value_or(uavnav_config_eval_episodes(cfg.get())),
                            seed_of(eval_opts, 0), out.c_str(), &report));
      std::printf("episodes %d  completion_rate %.4f  reached %d  mean_steps %.2f  crash_rate %.4f\n", report.episodes,
                  report.completion_rate, report.reached, report.mean_steps, report.crash_rate);
    } else if (rollout_cmd->parsed()) {
      ConfigPtr cfg = load_config(rollout_opts);
      WorldPtr world = world_for(cfg.get(), rollout_world);
      AgentPtr agent = load_agent(rollout_ckpt);
      const std::string out =
          rollout_opts.out.value_or(std::string(uavnav_config_output_dir(cfg.get())) + "/rollout.csv");
      uavnav_outcome outcome = UAVNAV_IN_PROGRESS;
      check(uavnav_rollout(agent.get(), world.get(), cfg.get(), seed_of(rollout_opts, 0), out.c_str(), &outcome));
      std::printf("wrote %s (outcome %s)\n", out.c_str(), outcome == UAVNAV_REACHED ? "reached" : "not reached");
    } else if (gen_cmd->parsed()) {
      ConfigPtr cfg = load_config(gen_opts);
      WorldPtr base = world_for(cfg.get(), "");
      uavnav_world* raw = nullptr;
      check(uavnav_world_generate(seed_of(gen_opts, 0), min_obstacles, max_obstacles, base.get(), &raw));
      WorldPtr world(raw);
      const std::string out = gen_opts.out.value_or("world.json");
      check(uavnav_world_save(world.get(), out.c_str()));
      std::printf("wrote %s with %d obstacles\n", out.c_str(), uavnav_world_obstacle_count(world.get()));
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", uavnav_last_error());
    return exit_code(f.status);
  }
  return 0;
}
