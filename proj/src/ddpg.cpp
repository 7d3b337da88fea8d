#include "uavnav/ddpg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include "binary_io.hpp"
#include "uavnav/error.hpp"

namespace uavnav {

namespace {

constexpr std::string_view kAgentMagic{"UAVAGNT\0", 8};
constexpr std::uint32_t kAgentVersion = 2;
constexpr std::uint64_t kInitStream = 100;
constexpr std::uint64_t kActStream = 101;

std::vector<int> layer_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

Eigen::MatrixXd critic_input(const Eigen::MatrixXd& states, const Eigen::MatrixXd& features) {
  Eigen::MatrixXd x(states.rows() + features.rows(), states.cols());
  x << states, features;
  return x;
}

Eigen::VectorXd to_vector(const Observation& s) { return Eigen::Map<const Eigen::VectorXd>(s.data(), s.size()); }

Eigen::RowVectorXd target_values(const Agent& agent, const Eigen::MatrixXd& next_states) {
  const Eigen::MatrixXd next_features = agent.codec().output_features(agent.actor_target.forward_batch(next_states));
  const Eigen::RowVectorXd q = agent.critic_target.forward_batch(critic_input(next_states, next_features));
  return q.cwiseMax(agent.config.value_min).cwiseMin(agent.config.value_max);
}

void write_ints(detail::ByteWriter& w, const std::vector<int>& v) {
  w.u32(static_cast<std::uint32_t>(v.size()));
  for (int x : v) w.u32(static_cast<std::uint32_t>(x));
}

std::vector<int> read_ints(detail::ByteReader& r) {
  const std::uint32_t n = r.u32();
  require(n <= 64, ErrorCode::CorruptCheckpoint, "implausible hidden layer count");
  std::vector<int> v(n);
  for (auto& x : v) x = static_cast<int>(r.u32());
  return v;
}

}  // namespace

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  require(capacity > 0, ErrorCode::InvalidArgument, "replay capacity must be positive");
  storage_.reserve(capacity);
}

void ReplayBuffer::push(const Transition& t) {
  if (storage_.size() < capacity_) {
    storage_.push_back(t);
    return;
  }
  storage_[head_] = t;
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::operator[](std::size_t i) const {
  require(i < storage_.size(), ErrorCode::InvalidArgument, "replay index out of range");
  return storage_[(head_ + i) % storage_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, Rng& rng) const {
  require(!storage_.empty(), ErrorCode::InvalidArgument, "sampling from an empty replay buffer");
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = rng.index(storage_.size());
  return idx;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  std::vector<Transition> out;
  out.reserve(n);
  for (std::size_t i : sample_indices(n, rng)) out.push_back((*this)[i]);
  return out;
}

Action ActionBounds::from_unit(const Eigen::Vector3d& u) const {
  return {std::clamp(rho_min + (rho_max - rho_min) * u[0], rho_min, rho_max), std::clamp(kPi * u[1], 0.0, kPi),
          std::clamp(kTwoPi * u[2], 0.0, kTwoPi)};
}

Eigen::Vector3d ActionBounds::to_unit(const Action& a) const {
  const double range = rho_max - rho_min;
  return {range > 0.0 ? (a.rho - rho_min) / range : 0.0, a.phi / kPi, a.psi / kTwoPi};
}

std::string_view to_string(ActionHead h) { return h == ActionHead::Spherical ? "spherical" : "cartesian"; }

ActionHead parse_action_head(std::string_view name) {
  for (auto h : {ActionHead::Spherical, ActionHead::Cartesian})
    if (to_string(h) == name) return h;
  fail(ErrorCode::Config, "unknown action head '" + std::string(name) + "'");
}

nn::Activation ActionCodec::output_activation() const {
  return head == ActionHead::Spherical ? nn::Activation::Sigmoid : nn::Activation::Identity;
}

Action ActionCodec::decode(const Eigen::Vector3d& out) const {
  if (head == ActionHead::Spherical) return bounds.from_unit(out);
  const Eigen::Vector3d f = output_features(out);
  const double r = f.norm();
  const double rho = std::clamp(r * bounds.rho_max, bounds.rho_min, bounds.rho_max);
  if (r == 0.0) return {rho, 0.0, 0.0};
  const double phi = std::acos(std::clamp(f[2] / r, -1.0, 1.0));
  double psi = std::atan2(f[1], f[0]);
  if (psi < 0.0) psi += kTwoPi;
  return {rho, phi, std::clamp(psi, 0.0, kTwoPi)};
}

Eigen::Vector3d ActionCodec::features(const Action& a) const {
  if (head == ActionHead::Spherical) return bounds.to_unit(a);
  if (bounds.rho_max <= 0.0) return Eigen::Vector3d::Zero();
  const double s = a.rho / bounds.rho_max;
  return {s * std::sin(a.phi) * std::cos(a.psi), s * std::sin(a.phi) * std::sin(a.psi), s * std::cos(a.phi)};
}

Eigen::Vector3d ActionCodec::output_features(const Eigen::Vector3d& out, Eigen::Matrix3d* jacobian) const {
  if (head == ActionHead::Spherical) {
    if (jacobian) jacobian->setIdentity();
    return out;
  }
  if (bounds.rho_max <= 0.0) {
    if (jacobian) jacobian->setZero();
    return Eigen::Vector3d::Zero();
  }
  const double r = out.norm();
  const double lo = bounds.rho_min / bounds.rho_max;
  const double t = std::tanh(r);
  if (t < lo) {
    // Below the shortest move: only the direction matters.
    if (r == 0.0) {
      if (jacobian) jacobian->setZero();
      return {0.0, 0.0, lo};
    }
    const Eigen::Vector3d n = out / r;
    if (jacobian) *jacobian = (lo / r) * (Eigen::Matrix3d::Identity() - n * n.transpose());
    return lo * n;
  }
  // f = g(r) v with g = tanh(r) / r, so df/dv = g I + (g'(r) / r) v v^T.
  double g = 1.0;
  double dg_over_r = -2.0 / 3.0;
  if (r < 1e-3) {
    g = 1.0 - r * r / 3.0;
    dg_over_r += 8.0 * r * r / 15.0;
  } else {
    g = t / r;
    dg_over_r = ((1.0 - t * t) - g) / (r * r);
  }
  if (jacobian) *jacobian = g * Eigen::Matrix3d::Identity() + dg_over_r * out * out.transpose();
  return g * out;
}

Eigen::MatrixXd ActionCodec::output_features(const Eigen::MatrixXd& outs) const {
  if (head == ActionHead::Spherical) return outs;
  Eigen::MatrixXd f(outs.rows(), outs.cols());
  for (Eigen::Index j = 0; j < outs.cols(); ++j) f.col(j) = output_features(Eigen::Vector3d(outs.col(j)));
  return f;
}

void AgentConfig::validate() const {
  require(gamma >= 0.0 && gamma <= 1.0, ErrorCode::Config, "gamma must lie in [0, 1]");
  require(nu >= 0.0 && nu <= 1.0, ErrorCode::Config, "nu must lie in [0, 1]");
  require(batch_size >= 1, ErrorCode::Config, "batch_size must be >= 1");
  require(buffer_capacity >= 1, ErrorCode::Config, "buffer_capacity must be >= 1");
  require(eps_start >= 0.0 && eps_start <= 1.0 && eps_end >= 0.0 && eps_end <= 1.0, ErrorCode::Config,
          "epsilon endpoints must lie in [0, 1]");
  require(actor_lr > 0.0 && critic_lr > 0.0, ErrorCode::Config, "learning rates must be positive");
  require(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0, ErrorCode::Config,
          "moment decay rates must lie in [0, 1)");
  for (int h : actor_hidden) require(h > 0, ErrorCode::Config, "hidden widths must be positive");
  for (int h : critic_hidden) require(h > 0, ErrorCode::Config, "hidden widths must be positive");
  require(value_min <= value_max, ErrorCode::Config, "value range must satisfy value_min <= value_max");
}

Agent::Agent(const AgentConfig& cfg, const ActionBounds& b, std::uint64_t seed)
    : config(cfg), bounds(b), buffer(static_cast<std::size_t>(std::max(cfg.buffer_capacity, 1))),
      rng(derive_seed(seed, kActStream)) {
  config.validate();
  Rng init(derive_seed(seed, kInitStream));
  const auto actor_sizes = layer_sizes(kObservationSize, config.actor_hidden, kActionSize);
  const auto critic_sizes = layer_sizes(kObservationSize + kActionSize, config.critic_hidden, 1);
  actor = nn::DenseNetwork::random(actor_sizes, config.actor_activation, codec().output_activation(), init);
  critic = nn::DenseNetwork::random(critic_sizes, config.critic_activation, nn::Activation::Identity, init);
  actor_target = actor;
  critic_target = critic;
  actor_opt = nn::AdamState(actor, {config.actor_lr, config.adam_beta1, config.adam_beta2, 1e-8});
  critic_opt = nn::AdamState(critic, {config.critic_lr, config.adam_beta1, config.adam_beta2, 1e-8});
}

double epsilon_at(int episode, int total_episodes, double eps_start, double eps_end) {
  require(total_episodes >= 1 && episode >= 0 && episode <= total_episodes, ErrorCode::InvalidArgument,
          "episode outside [0, M]");
  return eps_start + (eps_end - eps_start) * static_cast<double>(episode) / static_cast<double>(total_episodes);
}

Action policy_action(const nn::DenseNetwork& actor, const ActionCodec& codec, const Observation& s) {
  const Eigen::VectorXd out = actor.forward(to_vector(s));
  return codec.decode(out.head<3>());
}

Action random_action(const ActionBounds& bounds, Rng& rng) {
  const double rho = rng.uniform(bounds.rho_min, bounds.rho_max);
  const double phi = rng.uniform(0.0, kPi);
  const double psi = rng.uniform(0.0, kTwoPi);
  return {rho, phi, psi};
}

Action select_action(Agent& agent, const Observation& s, double epsilon) {
  if (agent.rng.bernoulli(epsilon)) return random_action(agent.bounds, agent.rng);
  return policy_action(agent.actor, agent.codec(), s);
}

double bellman_target(double r, const Observation& next_state, bool terminal, const Agent& agent) {
  if (terminal) return r;
  return r + agent.config.gamma * target_values(agent, to_vector(next_state))[0];
}

Eigen::MatrixXd stack_states(std::span<const Transition> batch, bool next) {
  Eigen::MatrixXd m(kObservationSize, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const Observation& s = next ? batch[j].next_state : batch[j].state;
    for (std::size_t i = 0; i < kObservationSize; ++i) m(i, j) = s[i];
  }
  return m;
}

double critic_update(Agent& agent, std::span<const Transition> batch) {
  require(!batch.empty(), ErrorCode::InvalidArgument, "critic update needs a nonempty batch");
  const auto n = static_cast<Eigen::Index>(batch.size());
  const Eigen::MatrixXd states = stack_states(batch, false);
  Eigen::MatrixXd actions(kActionSize, n);
  Eigen::RowVectorXd targets(n);
  const Eigen::RowVectorXd bootstrap = target_values(agent, stack_states(batch, true));
  const ActionCodec codec = agent.codec();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Transition& t = batch[j];
    actions.col(j) = codec.features(t.action);
    targets[j] = t.terminal ? t.reward : t.reward + agent.config.gamma * bootstrap[j];
  }

  const nn::ForwardCache cache = nn::forward_cached(agent.critic, critic_input(states, actions));
  const Eigen::RowVectorXd residual = cache.output().row(0) - targets;
  const double loss = residual.squaredNorm() / static_cast<double>(n);
  if (!std::isfinite(loss)) fail(ErrorCode::Divergence, "critic loss is not finite");

  const Eigen::MatrixXd upstream = (2.0 / static_cast<double>(n)) * residual;
  nn::optimizer_step(agent.critic, nn::backward(agent.critic, cache, upstream).grads, agent.critic_opt);
  ++agent.counters.critic_updates;
  return loss;
}

CriticProbe critic_probe(const nn::DenseNetwork& critic) {
  return [&critic](const Eigen::MatrixXd& states, const Eigen::MatrixXd& features, Eigen::MatrixXd& dq_dfeatures) {
    const nn::ForwardCache cache = nn::forward_cached(critic, critic_input(states, features));
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(1, states.cols());
    const nn::Backprop bp = nn::backward(critic, cache, ones);
    dq_dfeatures = bp.input_gradient.bottomRows(kActionSize);
    return Eigen::RowVectorXd(cache.output().row(0));
  };
}

nn::Gradients actor_gradient(const nn::DenseNetwork& actor, const ActionCodec& codec, const Eigen::MatrixXd& states,
                             const CriticProbe& probe, double* mean_q) {
  const nn::ForwardCache cache = nn::forward_cached(actor, states);
  const Eigen::MatrixXd& outs = cache.output();
  Eigen::MatrixXd features(kActionSize, outs.cols());
  std::vector<Eigen::Matrix3d> jacobians(static_cast<std::size_t>(outs.cols()));
  for (Eigen::Index j = 0; j < outs.cols(); ++j)
    features.col(j) = codec.output_features(Eigen::Vector3d(outs.col(j)), &jacobians[static_cast<std::size_t>(j)]);
  Eigen::MatrixXd dq_dfeatures;
  const Eigen::RowVectorXd q = probe(states, features, dq_dfeatures);
  require(dq_dfeatures.rows() == static_cast<Eigen::Index>(kActionSize) && dq_dfeatures.cols() == states.cols(),
          ErrorCode::Shape, "critic probe returned a malformed action gradient");
  if (mean_q) *mean_q = q.mean();
  Eigen::MatrixXd upstream(kActionSize, outs.cols());
  const double scale = -1.0 / static_cast<double>(states.cols());
  for (Eigen::Index j = 0; j < outs.cols(); ++j)
    upstream.col(j) = scale * (jacobians[static_cast<std::size_t>(j)].transpose() * dq_dfeatures.col(j));
  return nn::backward(actor, cache, upstream).grads;
}

double actor_update(nn::DenseNetwork& actor, nn::AdamState& opt, const ActionCodec& codec,
                    const Eigen::MatrixXd& states, const CriticProbe& probe) {
  double mean_q = 0.0;
  const nn::Gradients grads = actor_gradient(actor, codec, states, probe, &mean_q);
  if (!std::isfinite(mean_q)) fail(ErrorCode::Divergence, "actor objective is not finite");
  nn::optimizer_step(actor, grads, opt);
  return mean_q;
}

double actor_update(Agent& agent, std::span<const Transition> batch) {
  require(!batch.empty(), ErrorCode::InvalidArgument, "actor update needs a nonempty batch");
  const double mean_q = actor_update(agent.actor, agent.actor_opt, agent.codec(), stack_states(batch, false),
                                     critic_probe(agent.critic));
  ++agent.counters.actor_updates;
  return mean_q;
}

std::optional<TrainDiagnostics> train_step(Agent& agent, const Transition& transition) {
  agent.buffer.push(transition);
  const auto n = static_cast<std::size_t>(agent.config.batch_size);
  if (agent.buffer.size() < n) return std::nullopt;

  const std::vector<Transition> batch = agent.buffer.sample(n, agent.rng);
  TrainDiagnostics diag;
  diag.critic_loss = critic_update(agent, batch);
  diag.mean_q = actor_update(agent, batch);
  nn::soft_update(agent.critic_target, agent.critic, agent.config.nu);
  nn::soft_update(agent.actor_target, agent.actor, agent.config.nu);
  agent.counters.soft_updates += 2;
  return diag;
}

std::vector<std::uint8_t> save_agent(const Agent& agent) {
  const AgentConfig& c = agent.config;
  detail::ByteWriter w;
  w.magic(kAgentMagic);
  w.u32(kAgentVersion);
  w.f64(c.gamma);
  w.f64(c.nu);
  w.u32(static_cast<std::uint32_t>(c.batch_size));
  w.u32(static_cast<std::uint32_t>(c.buffer_capacity));
  w.f64(c.eps_start);
  w.f64(c.eps_end);
  w.f64(c.actor_lr);
  w.f64(c.critic_lr);
  w.f64(c.adam_beta1);
  w.f64(c.adam_beta2);
  write_ints(w, c.actor_hidden);
  write_ints(w, c.critic_hidden);
  w.u8(static_cast<std::uint8_t>(c.actor_activation));
  w.u8(static_cast<std::uint8_t>(c.critic_activation));
  w.u8(static_cast<std::uint8_t>(c.action_head));
  w.f64(c.value_min);
  w.f64(c.value_max);
  w.f64(agent.bounds.rho_min);
  w.f64(agent.bounds.rho_max);
  for (const nn::DenseNetwork* net : {&agent.actor, &agent.critic, &agent.actor_target, &agent.critic_target})
    w.blob(nn::save(*net));
  w.blob(nn::save(agent.actor_opt));
  w.blob(nn::save(agent.critic_opt));
  return w.take();
}

Agent load_agent(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.expect_magic(kAgentMagic);
  const std::uint32_t version = r.u32();
  require(version == kAgentVersion, ErrorCode::CorruptCheckpoint,
          "unsupported agent checkpoint version " + std::to_string(version));
  AgentConfig c;
  c.gamma = r.f64();
  c.nu = r.f64();
  c.batch_size = static_cast<int>(r.u32());
  c.buffer_capacity = static_cast<int>(r.u32());
  c.eps_start = r.f64();
  c.eps_end = r.f64();
  c.actor_lr = r.f64();
  c.critic_lr = r.f64();
  c.adam_beta1 = r.f64();
  c.adam_beta2 = r.f64();
  c.actor_hidden = read_ints(r);
  c.critic_hidden = read_ints(r);
  const std::uint8_t actor_act = r.u8();
  const std::uint8_t critic_act = r.u8();
  require(actor_act <= 3 && critic_act <= 3, ErrorCode::CorruptCheckpoint, "unknown activation tag");
  c.actor_activation = static_cast<nn::Activation>(actor_act);
  c.critic_activation = static_cast<nn::Activation>(critic_act);
  const std::uint8_t head = r.u8();
  require(head <= 1, ErrorCode::CorruptCheckpoint, "unknown action head tag");
  c.action_head = static_cast<ActionHead>(head);
  c.value_min = r.f64();
  c.value_max = r.f64();
  ActionBounds b;
  b.rho_min = r.f64();
  b.rho_max = r.f64();

  auto next_net = [&] { return nn::load(r.blob()); };
  nn::DenseNetwork actor = next_net();
  nn::DenseNetwork critic = next_net();
  nn::DenseNetwork actor_target = next_net();
  nn::DenseNetwork critic_target = next_net();
  const auto actor_opt_bytes = r.blob();
  const auto critic_opt_bytes = r.blob();
  require(r.at_end(), ErrorCode::CorruptCheckpoint, "trailing bytes after agent checkpoint");

  Agent agent = [&] {
    try {
      return Agent(c, b, 0);
    } catch (const Error& e) {
      fail(ErrorCode::CorruptCheckpoint, std::string("invalid agent settings: ") + e.what());
    }
  }();
  require(actor.same_architecture(agent.actor) && actor_target.same_architecture(agent.actor) &&
              critic.same_architecture(agent.critic) && critic_target.same_architecture(agent.critic),
          ErrorCode::CorruptCheckpoint, "network shapes disagree with the stored configuration");
  agent.actor = std::move(actor);
  agent.critic = std::move(critic);
  agent.actor_target = std::move(actor_target);
  agent.critic_target = std::move(critic_target);
  agent.actor_opt = nn::load_adam(actor_opt_bytes, agent.actor);
  agent.critic_opt = nn::load_adam(critic_opt_bytes, agent.critic);
  return agent;
}

void save_agent_file(const Agent& agent, const std::string& path) {
  const auto bytes = save_agent(agent);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + tmp + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    require(static_cast<bool>(out), ErrorCode::Io, "failed writing " + tmp);
  }
  require(std::rename(tmp.c_str(), path.c_str()) == 0, ErrorCode::Io, "cannot move checkpoint into " + path);
}

Agent load_agent_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::CorruptCheckpoint, "cannot open checkpoint " + path);
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return load_agent(bytes);
}

void transfer_weights(Agent& agent, const Agent& source) {
  require(agent.actor.same_architecture(source.actor) && agent.critic.same_architecture(source.critic),
          ErrorCode::IncompatibleCheckpoint, "source checkpoint architecture differs from the configured one");
  require(agent.bounds.rho_min == source.bounds.rho_min && agent.bounds.rho_max == source.bounds.rho_max,
          ErrorCode::IncompatibleCheckpoint, "source checkpoint was trained with different action ranges");
  require(agent.config.action_head == source.config.action_head, ErrorCode::IncompatibleCheckpoint,
          "source checkpoint uses a different action head");
  agent.actor = source.actor;
  agent.actor_target = source.actor;
  agent.critic = source.critic;
  agent.critic_target = source.critic;
}

}  // namespace uavnav
