#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "uavnav/env.hpp"
#include "uavnav/nn.hpp"
#include "uavnav/rng.hpp"

namespace uavnav {

struct Transition {
  Observation state{};
  Action action;
  double reward = 0.0;
  Observation next_state{};
  bool terminal = false;
};

/// Fixed-capacity FIFO ring of transitions.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);
  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool full() const { return storage_.size() == capacity_; }

  /// i-th oldest stored transition.
  const Transition& operator[](std::size_t i) const;

  /// n indices drawn uniformly with replacement, in logical (oldest-first) order.
  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;
  std::vector<Transition> sample(std::size_t n, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // oldest element once full
  std::vector<Transition> storage_;
};

/// Step-length range, with the affine map between actions and the unit box.
struct ActionBounds {
  double rho_min = 0.0;
  double rho_max = 0.2;

  Eigen::Vector3d span() const { return {rho_max - rho_min, kPi, kTwoPi}; }
  Action from_unit(const Eigen::Vector3d& u) const;
  Eigen::Vector3d to_unit(const Action& a) const;
};

/// How the actor's three outputs encode a move.
///   Spherical: Sigmoid outputs in [0,1]^3 mapped affinely onto (rho, phi, psi).
///   Cartesian: linear outputs v squashed radially into the unit ball,
///              f = tanh(|v|) v / |v|; the move goes along f with
///              rho = |f| rho_max clamped to the range.
/// Spherical features are the unit-box action. Cartesian features are f, the
/// displacement in units of rho_max. They stay smooth at rho = 0 and across
/// psi = 0, and the direction never saturates.
enum class ActionHead : std::uint8_t { Spherical, Cartesian };
std::string_view to_string(ActionHead h);
ActionHead parse_action_head(std::string_view name);

/// Actor outputs to actions, and actions to the critic's action features.
struct ActionCodec {
  ActionHead head = ActionHead::Cartesian;
  ActionBounds bounds;

  nn::Activation output_activation() const;
  Action decode(const Eigen::Vector3d& out) const;
  Eigen::Vector3d features(const Action& a) const;
  /// Features of decode(out), optionally with d features / d out.
  Eigen::Vector3d output_features(const Eigen::Vector3d& out, Eigen::Matrix3d* jacobian = nullptr) const;
  /// Column-wise output_features.
  Eigen::MatrixXd output_features(const Eigen::MatrixXd& outs) const;
};

struct AgentConfig {
  double gamma = 0.99;
  double nu = 0.99;
  int batch_size = 256;
  int buffer_capacity = 10000;
  double eps_start = 0.9;
  double eps_end = 0.1;
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  std::vector<int> actor_hidden{64, 64};
  std::vector<int> critic_hidden{64, 64};
  nn::Activation actor_activation = nn::Activation::Tanh;
  nn::Activation critic_activation = nn::Activation::ReLU;
  ActionHead action_head = ActionHead::Cartesian;
  /// Bootstrap values Q'(s', mu'(s')) are clipped to this range.
  double value_min = -std::numeric_limits<double>::infinity();
  double value_max = std::numeric_limits<double>::infinity();

  void validate() const;
};

struct AgentCounters {
  std::int64_t critic_updates = 0;
  std::int64_t actor_updates = 0;
  std::int64_t soft_updates = 0;
};

/// Actor/critic pair with target copies, replay memory and exploration state.
/// The critic sees the state followed by the codec's action features.
struct Agent {
  Agent(const AgentConfig& config, const ActionBounds& bounds, std::uint64_t seed);

  ActionCodec codec() const { return {config.action_head, bounds}; }

  AgentConfig config;
  ActionBounds bounds;
  nn::DenseNetwork actor;
  nn::DenseNetwork critic;
  nn::DenseNetwork actor_target;
  nn::DenseNetwork critic_target;
  nn::AdamState actor_opt;
  nn::AdamState critic_opt;
  ReplayBuffer buffer;
  Rng rng;
  AgentCounters counters;
};

struct TrainDiagnostics {
  double critic_loss = 0.0;
  double mean_q = 0.0;
};

double epsilon_at(int episode, int total_episodes, double eps_start, double eps_end);

/// Greedy action of `actor` for one observation.
Action policy_action(const nn::DenseNetwork& actor, const ActionCodec& codec, const Observation& s);

Action random_action(const ActionBounds& bounds, Rng& rng);

Action select_action(Agent& agent, const Observation& s, double epsilon);

double bellman_target(double r, const Observation& next_state, bool terminal, const Agent& agent);

/// One critic descent step on the batch; returns the loss before the step.
double critic_update(Agent& agent, std::span<const Transition> batch);

/// Q values and dQ/d(action features) for a batch. Columns are samples.
using CriticProbe = std::function<Eigen::RowVectorXd(const Eigen::MatrixXd& states, const Eigen::MatrixXd& features,
                                                     Eigen::MatrixXd& dq_dfeatures)>;

CriticProbe critic_probe(const nn::DenseNetwork& critic);

/// Gradient of -mean(Q(s, mu(s))) with respect to the actor parameters.
nn::Gradients actor_gradient(const nn::DenseNetwork& actor, const ActionCodec& codec, const Eigen::MatrixXd& states,
                             const CriticProbe& probe, double* mean_q = nullptr);

/// One deterministic-policy-gradient ascent step; returns mean Q before it.
double actor_update(Agent& agent, std::span<const Transition> batch);
double actor_update(nn::DenseNetwork& actor, nn::AdamState& opt, const ActionCodec& codec,
                    const Eigen::MatrixXd& states, const CriticProbe& probe);

/// Store, then (once the buffer holds a batch) critic step, actor step and
/// target soft updates.
std::optional<TrainDiagnostics> train_step(Agent& agent, const Transition& transition);

Eigen::MatrixXd stack_states(std::span<const Transition> batch, bool next);

std::vector<std::uint8_t> save_agent(const Agent& agent);
Agent load_agent(std::span<const std::uint8_t> bytes);

void save_agent_file(const Agent& agent, const std::string& path);
Agent load_agent_file(const std::string& path);

/// Copies actor and critic from `source` into both online and target
/// networks of `agent`, keeping agent's fresh optimizer state.
void transfer_weights(Agent& agent, const Agent& source);

}  // namespace uavnav
