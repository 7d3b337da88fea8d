#include "uavnav/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "uavnav/error.hpp"

namespace uavnav {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  require(j.is_object(), ErrorCode::Config, where + " must be an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.contains(key)) fail(ErrorCode::Config, "unknown key '" + key + "' in " + where);
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::Config, "bad value for '" + std::string(key) + "' in " + where);
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Config, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(std::string_view text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Config, what + " is not valid JSON: " + e.what());
  }
}

Obstacle parse_obstacle(const json& j) {
  reject_unknown(j, {"vertices", "height"}, "obstacle");
  require(j.contains("vertices") && j.contains("height"), ErrorCode::Config, "obstacle needs vertices and height");
  std::vector<Vec2> base;
  try {
    for (const auto& v : j.at("vertices")) {
      require(v.is_array() && v.size() == 2, ErrorCode::Config, "obstacle vertex must be [x, y]");
      base.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    return Obstacle(std::move(base), j.at("height").get<double>());
  } catch (const json::exception&) {
    fail(ErrorCode::Config, "malformed obstacle");
  } catch (const Error& e) {
    fail(ErrorCode::Config, e.what());
  }
}

void apply_world(const json& j, WorldSpec& w) {
  const std::string where = "world";
  reject_unknown(j, {"obstacles", "target_mode", "target_speed", "rho_min", "rho_max", "reach_radius", "max_steps",
                     "terminal_on_crash"},
                 where);
  if (j.contains("obstacles")) {
    require(j.at("obstacles").is_array(), ErrorCode::Config, "obstacles must be a list");
    w.obstacles.clear();
    for (const auto& o : j.at("obstacles")) w.obstacles.push_back(parse_obstacle(o));
  }
  if (j.contains("target_mode")) {
    require(j.at("target_mode").is_string(), ErrorCode::Config, "target_mode must be a string");
    w.target_mode = parse_target_mode(j.at("target_mode").get<std::string>());
  }
  read(j, "rho_min", w.rho_min, where);
  read(j, "rho_max", w.rho_max, where);
  w.target_speed = 0.5 * w.rho_max;
  read(j, "target_speed", w.target_speed, where);
  read(j, "reach_radius", w.reach_radius, where);
  read(j, "max_steps", w.max_steps, where);
  read(j, "terminal_on_crash", w.terminal_on_crash, where);
  try {
    w.validate();
  } catch (const Error& e) {
    fail(ErrorCode::Config, e.what());
  }
}

void apply_agent(const json& j, AgentConfig& a) {
  const std::string where = "agent";
  reject_unknown(j, {"gamma", "nu", "batch_size", "buffer_capacity", "eps_start", "eps_end", "actor_lr", "critic_lr",
                     "adam_beta1", "adam_beta2", "actor_hidden", "critic_hidden", "actor_activation",
                     "critic_activation", "action_head"},
                 where);
  read(j, "gamma", a.gamma, where);
  read(j, "nu", a.nu, where);
  read(j, "batch_size", a.batch_size, where);
  read(j, "buffer_capacity", a.buffer_capacity, where);
  read(j, "eps_start", a.eps_start, where);
  read(j, "eps_end", a.eps_end, where);
  read(j, "actor_lr", a.actor_lr, where);
  read(j, "critic_lr", a.critic_lr, where);
  read(j, "adam_beta1", a.adam_beta1, where);
  read(j, "adam_beta2", a.adam_beta2, where);
  read(j, "actor_hidden", a.actor_hidden, where);
  read(j, "critic_hidden", a.critic_hidden, where);
  std::string act;
  if (j.contains("actor_activation")) {
    read(j, "actor_activation", act, where);
    a.actor_activation = nn::parse_activation(act);
  }
  if (j.contains("critic_activation")) {
    read(j, "critic_activation", act, where);
    a.critic_activation = nn::parse_activation(act);
  }
  if (j.contains("action_head")) {
    read(j, "action_head", act, where);
    a.action_head = parse_action_head(act);
  }
}

json world_json(const WorldSpec& w) {
  json obstacles = json::array();
  for (const auto& o : w.obstacles) {
    json verts = json::array();
    for (const auto& v : o.base()) verts.push_back({v.x, v.y});
    obstacles.push_back({{"vertices", verts}, {"height", o.height()}});
  }
  return {{"obstacles", obstacles},
          {"target_mode", std::string(to_string(w.target_mode))},
          {"target_speed", w.target_speed},
          {"rho_min", w.rho_min},
          {"rho_max", w.rho_max},
          {"reach_radius", w.reach_radius},
          {"max_steps", w.max_steps},
          {"terminal_on_crash", w.terminal_on_crash}};
}

}  // namespace

std::string_view to_string(GoalHandling g) {
  switch (g) {
    case GoalHandling::Bootstrap: return "bootstrap";
    case GoalHandling::Terminal: return "terminal";
    case GoalHandling::Absorbing: return "absorbing";
  }
  return "?";
}

GoalHandling parse_goal_handling(std::string_view name) {
  for (auto g : {GoalHandling::Bootstrap, GoalHandling::Terminal, GoalHandling::Absorbing})
    if (to_string(g) == name) return g;
  fail(ErrorCode::Config, "unknown goal handling '" + std::string(name) + "'");
}

int RunConfig::checkpoint_interval() const {
  return checkpoint_every > 0 ? checkpoint_every : std::max(1, episodes / 20);
}

void RunConfig::validate(bool allow_zero_episodes) const {
  require(episodes >= (allow_zero_episodes ? 0 : 1), ErrorCode::Config, "episodes (M) must be >= 1");
  require(world.max_steps >= 1, ErrorCode::Config, "max_steps (T) must be >= 1");
  require(eval_episodes >= 1, ErrorCode::Config, "eval_episodes must be >= 1");
  require(eval_workers >= 1, ErrorCode::Config, "eval_workers must be >= 1");
  require(checkpoint_every >= 0, ErrorCode::Config, "checkpoint_every must be >= 0");
  try {
    world.validate();
    reward.validate();
    agent.validate();
  } catch (const Error& e) {
    fail(ErrorCode::Config, e.what());
  }
  require(goal != GoalHandling::Absorbing || agent.gamma < 1.0, ErrorCode::Config,
          "absorbing goal needs gamma < 1");
  require(!clip_values || agent.gamma < 1.0, ErrorCode::Config, "clip_values needs gamma < 1");
  if (init_checkpoint)
    require(fs::exists(*init_checkpoint), ErrorCode::Config, "init_checkpoint " + *init_checkpoint + " not found");
}

AgentConfig RunConfig::agent_config() const {
  AgentConfig a = agent;
  if (clip_values) {
    const RewardRange r = reward_range(reward);
    a.value_min = r.lo / (1.0 - agent.gamma);
    a.value_max = r.hi / (1.0 - agent.gamma);
  }
  return a;
}

RunConfig desk_preset() {
  RunConfig c;
  c.preset = "desk";
  // Smaller batches keep a 3000-episode run to about a minute, and a slow
  // target blend is what lets the critic settle at this budget.
  c.agent.batch_size = 64;
  c.agent.nu = 0.01;
  // Hovering next to the target earns almost the capture value unless the
  // guidance peak is sharp; a short horizon drains overestimated values
  // from states the UAV cannot leave (walls, obstacle faces) quickly.
  c.reward.gui_scale = 100.0;
  c.agent.gamma = 0.8;
  // Keeps most of a run in memory, so late updates still see the early,
  // exploratory episodes and fine-tuning does not forget open-space moves.
  c.agent.buffer_capacity = 100000;
  return c;
}

RunConfig paper_preset() {
  RunConfig c;
  c.preset = "paper";
  c.episodes = 40000;
  c.world.max_steps = 100;
  c.world.rho_max = 0.2;
  c.world.target_speed = 0.1;
  c.reward.beta = 4.0;
  c.agent.nu = 0.99;
  c.agent.buffer_capacity = 10000;
  c.agent.batch_size = 256;
  c.agent.eps_start = 0.9;
  c.agent.eps_end = 0.1;
  c.eval_episodes = 1000;
  return c;
}

RunConfig preset(std::string_view name) {
  if (name == "desk") return desk_preset();
  if (name == "paper") return paper_preset();
  fail(ErrorCode::Config, "unknown preset '" + std::string(name) + "'");
}

RunConfig parse_run_config(std::string_view text, const std::string& base_dir) {
  const json j = parse_json(text, "config");
  const std::string where = "config";
  reject_unknown(j,
                 {"preset", "world", "world_file", "reward", "agent", "episodes", "seed", "output_dir",
                  "init_checkpoint", "eval_episodes", "checkpoint_every", "eval_workers", "goal",
                  "clip_values"},
                 where);
  std::string name = "desk";
  read(j, "preset", name, where);
  RunConfig c = preset(name);

  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? p : (fs::path(base_dir) / p).string(); };

  require(!(j.contains("world") && j.contains("world_file")), ErrorCode::Config,
          "give either world or world_file, not both");
  if (j.contains("world_file")) {
    std::string path;
    read(j, "world_file", path, where);
    c.world = load_world(resolve(path));
  } else if (j.contains("world")) {
    apply_world(j.at("world"), c.world);
  }
  if (j.contains("reward")) {
    const json& r = j.at("reward");
    reject_unknown(r, {"beta", "gui_scale", "obp_scale"}, "reward");
    read(r, "beta", c.reward.beta, "reward");
    read(r, "gui_scale", c.reward.gui_scale, "reward");
    read(r, "obp_scale", c.reward.obp_scale, "reward");
  }
  if (j.contains("agent")) apply_agent(j.at("agent"), c.agent);
  read(j, "episodes", c.episodes, where);
  read(j, "seed", c.seed, where);
  read(j, "output_dir", c.output_dir, where);
  if (j.contains("init_checkpoint") && !j.at("init_checkpoint").is_null()) {
    std::string path;
    read(j, "init_checkpoint", path, where);
    c.init_checkpoint = resolve(path);
  }
  read(j, "eval_episodes", c.eval_episodes, where);
  read(j, "checkpoint_every", c.checkpoint_every, where);
  read(j, "eval_workers", c.eval_workers, where);
  if (j.contains("goal")) {
    std::string g;
    read(j, "goal", g, where);
    c.goal = parse_goal_handling(g);
  }
  read(j, "clip_values", c.clip_values, where);
  c.validate(c.init_checkpoint.has_value());
  return c;
}

RunConfig load_run_config(const std::string& path) {
  const std::string text = slurp(path);
  return parse_run_config(text, fs::path(path).parent_path().string().empty()
                                    ? std::string(".")
                                    : fs::path(path).parent_path().string());
}

std::string to_json(const RunConfig& c) {
  const AgentConfig& a = c.agent;
  json j = {{"preset", c.preset},
            {"world", world_json(c.world)},
            {"reward", {{"beta", c.reward.beta}, {"gui_scale", c.reward.gui_scale}, {"obp_scale", c.reward.obp_scale}}},
            {"agent",
             {{"gamma", a.gamma},
              {"nu", a.nu},
              {"batch_size", a.batch_size},
              {"buffer_capacity", a.buffer_capacity},
              {"eps_start", a.eps_start},
              {"eps_end", a.eps_end},
              {"actor_lr", a.actor_lr},
              {"critic_lr", a.critic_lr},
              {"adam_beta1", a.adam_beta1},
              {"adam_beta2", a.adam_beta2},
              {"actor_hidden", a.actor_hidden},
              {"critic_hidden", a.critic_hidden},
              {"actor_activation", std::string(nn::to_string(a.actor_activation))},
              {"critic_activation", std::string(nn::to_string(a.critic_activation))},
              {"action_head", std::string(to_string(a.action_head))}}},
            {"episodes", c.episodes},
            {"seed", c.seed},
            {"output_dir", c.output_dir},
            {"eval_episodes", c.eval_episodes},
            {"checkpoint_every", c.checkpoint_every},
            {"eval_workers", c.eval_workers},
            {"goal", std::string(to_string(c.goal))},
            {"clip_values", c.clip_values}};
  if (c.init_checkpoint) j["init_checkpoint"] = *c.init_checkpoint;
  return j.dump(2) + "\n";
}

WorldSpec parse_world(std::string_view text) {
  WorldSpec w;
  apply_world(parse_json(text, "world file"), w);
  return w;
}

WorldSpec load_world(const std::string& path) { return parse_world(slurp(path)); }

std::string to_json(const WorldSpec& world) { return world_json(world).dump(2) + "\n"; }

}  // namespace uavnav
