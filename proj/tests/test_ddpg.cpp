#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "net_util.hpp"
#include "oracles.hpp"
#include "uavnav/ddpg.hpp"
#include "uavnav/error.hpp"

using namespace uavnav;
using namespace uavnav::testutil;

namespace {

AgentConfig small_config() {
  AgentConfig c;
  c.batch_size = 8;
  c.buffer_capacity = 100;
  c.actor_hidden = {8};
  c.critic_hidden = {8};
  return c;
}

Observation random_observation(Rng& rng) {
  Observation s;
  for (auto& v : s) v = rng.uniform(-1.0, 1.0);
  return s;
}

Transition random_transition(Rng& rng, const ActionBounds& b) {
  return {random_observation(rng), random_action(b, rng), rng.uniform(-1.0, 1.0), random_observation(rng),
          rng.bernoulli(0.1)};
}

Transition tagged(double id) {
  Transition t;
  t.reward = id;
  return t;
}

bool inside_ranges(const Action& a, const ActionBounds& b) {
  return a.rho >= b.rho_min && a.rho <= b.rho_max && a.phi >= 0.0 && a.phi <= kPi && a.psi >= 0.0 &&
         a.psi <= kTwoPi;
}

}  // namespace

TEST(Epsilon, LinearSchedule) {
  EXPECT_DOUBLE_EQ(epsilon_at(0, 3000, 0.9, 0.1), 0.9);
  EXPECT_DOUBLE_EQ(epsilon_at(3000, 3000, 0.9, 0.1), 0.1);
  EXPECT_DOUBLE_EQ(epsilon_at(1500, 3000, 0.9, 0.1), 0.5);
  EXPECT_THROW(epsilon_at(3001, 3000, 0.9, 0.1), Error);
  EXPECT_THROW(epsilon_at(0, 0, 0.9, 0.1), Error);
}

TEST(SelectAction, GreedyIsDeterministic) {
  Agent agent(small_config(), {}, 1);
  Rng rng(2);
  const Observation s = random_observation(rng);
  const Action a = select_action(agent, s, 0.0);
  const Action b = select_action(agent, s, 0.0);
  EXPECT_EQ(a.rho, b.rho);
  EXPECT_EQ(a.phi, b.phi);
  EXPECT_EQ(a.psi, b.psi);
}

TEST(SelectAction, RandomActionsAreUniform) {
  Agent agent(small_config(), {0.0, 0.2}, 3);
  const Observation s{};
  const int n = 10000;
  double sum[3] = {0, 0, 0};
  for (int i = 0; i < n; ++i) {
    const Action a = select_action(agent, s, 1.0);
    sum[0] += a.rho;
    sum[1] += a.phi;
    sum[2] += a.psi;
  }
  const double width[3] = {0.2, kPi, kTwoPi};
  for (int k = 0; k < 3; ++k) {
    const double se = width[k] / std::sqrt(12.0 * n);
    EXPECT_NEAR(sum[k] / n, width[k] / 2, 3 * se) << k;
  }
}

TEST(SelectAction, AlwaysFeasible) {
  const ActionBounds b{0.02, 0.15};
  Agent agent(small_config(), b, 4);
  Rng rng(5);
  for (int i = 0; i < 5000; ++i) {
    Observation s = random_observation(rng);
    for (auto& v : s) v *= 100.0;  // drive the output layer into saturation
    ASSERT_TRUE(inside_ranges(select_action(agent, s, rng.uniform()), b));
  }
}

TEST(ActionBounds, UnitRoundTrip) {
  const ActionBounds b{0.05, 0.2};
  const Action a{0.1, 1.0, 4.0};
  const Action back = b.from_unit(b.to_unit(a));
  EXPECT_NEAR(back.rho, a.rho, 1e-15);
  EXPECT_NEAR(back.phi, a.phi, 1e-15);
  EXPECT_NEAR(back.psi, a.psi, 1e-15);
  const Action lo = b.from_unit({-1, -1, -1});
  EXPECT_EQ(lo.rho, 0.05);
  EXPECT_EQ(lo.phi, 0.0);
}

TEST(ActionCodec, CartesianDecodeMatchesFeatures) {
  Rng rng(40);
  for (const ActionBounds b : {ActionBounds{0.0, 0.2}, ActionBounds{0.05, 0.2}}) {
    const ActionCodec codec{ActionHead::Cartesian, b};
    for (int i = 0; i < 1000; ++i) {
      const Eigen::Vector3d out = random_vector(rng, 3, 3.0);
      const Action a = codec.decode(out);
      ASSERT_TRUE(inside_ranges(a, b));
      const Eigen::Vector3d f = codec.output_features(out);
      EXPECT_LT((codec.features(a) - f).norm(), 1e-12);
      EXPECT_NEAR(f.norm() * b.rho_max, a.rho, 1e-12);
      // The move points along the output vector.
      EXPECT_GT(f.dot(out), 0.0);
    }
  }
}

TEST(ActionCodec, CartesianSquashesRadially) {
  const ActionCodec codec{ActionHead::Cartesian, {0.0, 0.2}};
  const Eigen::Vector3d out{3.0, -4.0, 0.0};
  const Eigen::Vector3d f = codec.output_features(out);
  EXPECT_NEAR(f.norm(), std::tanh(5.0), 1e-15);
  EXPECT_NEAR(f.normalized().dot(out.normalized()), 1.0, 1e-15);
  Eigen::Matrix3d jac;
  EXPECT_EQ(codec.output_features(Eigen::Vector3d::Zero(), &jac), Eigen::Vector3d::Zero());
  EXPECT_EQ(jac, Eigen::Matrix3d::Identity());
  const Action still = codec.decode(Eigen::Vector3d::Zero());
  EXPECT_EQ(still.rho, 0.0);
  EXPECT_EQ(codec.features(still), Eigen::Vector3d::Zero());
  // Far out along a diagonal the direction still responds.
  codec.output_features(Eigen::Vector3d{20.0, 20.0, 20.0}, &jac);
  EXPECT_GT(jac.norm(), 1e-3);
}

TEST(ActionCodec, CartesianJacobianMatchesFiniteDifferences) {
  Rng rng(41);
  for (int i = 0; i < 200; ++i) {
    // Tiny outputs exercise the series branch, the rest also the shortest-move clamp.
    const ActionCodec codec{ActionHead::Cartesian, {i < 50 ? 0.0 : 0.05, 0.2}};
    const Eigen::Vector3d out = random_vector(rng, 3, i < 50 ? 2e-3 : 3.0);
    Eigen::Matrix3d jac;
    codec.output_features(out, &jac);
    for (int k = 0; k < 3; ++k) {
      auto fk = [&](const Eigen::VectorXd& v) { return codec.output_features(Eigen::Vector3d(v))[k]; };
      const Eigen::VectorXd numeric = oracle::central_difference(fk, Eigen::VectorXd(out));
      for (int m = 0; m < 3; ++m) EXPECT_NEAR(jac(k, m), numeric[m], 1e-6) << i;
    }
  }
}

TEST(ActionCodec, SphericalIsUnitBox) {
  const ActionBounds b{0.05, 0.2};
  const ActionCodec codec{ActionHead::Spherical, b};
  const Action a{0.1, 1.0, 4.0};
  EXPECT_EQ(codec.features(a), b.to_unit(a));
  const Eigen::Vector3d u{0.2, 0.4, 0.9};
  Eigen::Matrix3d jac;
  EXPECT_EQ(codec.output_features(u, &jac), u);
  EXPECT_EQ(jac, Eigen::Matrix3d::Identity());
  EXPECT_EQ(codec.decode(u).phi, b.from_unit(u).phi);
}

TEST(Bellman, TerminalMasksBootstrap) {
  Agent agent(small_config(), {}, 6);
  Rng rng(7);
  EXPECT_EQ(bellman_target(1.0, random_observation(rng), true, agent), 1.0);
}

TEST(Bellman, ZeroDiscount) {
  AgentConfig c = small_config();
  c.gamma = 0.0;
  Agent agent(c, {}, 8);
  Rng rng(9);
  EXPECT_EQ(bellman_target(0.37, random_observation(rng), false, agent), 0.37);
}

TEST(Bellman, StubbedTargetCritic) {
  Agent agent(small_config(), {}, 10);
  auto& last = agent.critic_target.layers().back();
  last.weight.setZero();
  last.bias.setConstant(2.0);
  Rng rng(11);
  EXPECT_NEAR(bellman_target(1.0, random_observation(rng), false, agent), 2.98, 1e-12);
}

TEST(CriticUpdate, ZeroLossLeavesParameters) {
  AgentConfig c = small_config();
  c.gamma = 0.0;
  Agent agent(c, {}, 12);
  Rng rng(13);
  std::vector<Transition> batch;
  for (int i = 0; i < 4; ++i) {
    Transition t = random_transition(rng, agent.bounds);
    Eigen::VectorXd x(9);
    for (int k = 0; k < 6; ++k) x[k] = t.state[k];
    x.tail<3>() = agent.codec().features(t.action);
    t.reward = agent.critic.forward(x)[0];
    batch.push_back(t);
  }
  const nn::DenseNetwork before = agent.critic;
  EXPECT_NEAR(critic_update(agent, batch), 0.0, 1e-28);
  EXPECT_LT((flatten(agent.critic) - flatten(before)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(CriticUpdate, SingleSampleLossIsSquaredResidual) {
  Agent agent(small_config(), {}, 14);
  Rng rng(15);
  const Transition t = random_transition(rng, agent.bounds);
  Eigen::VectorXd x(9);
  for (int k = 0; k < 6; ++k) x[k] = t.state[k];
  x.tail<3>() = agent.codec().features(t.action);
  const double q = agent.critic.forward(x)[0];
  const double y = bellman_target(t.reward, t.next_state, t.terminal, agent);
  EXPECT_NEAR(critic_update(agent, std::span(&t, 1)), (y - q) * (y - q), 1e-14);
}

TEST(CriticUpdate, OverfitsFrozenBatch) {
  AgentConfig c = small_config();
  c.critic_hidden = {32, 32};
  Agent agent(c, {}, 16);
  Rng rng(17);
  std::vector<Transition> batch;
  for (int i = 0; i < 16; ++i) {
    Transition t = random_transition(rng, agent.bounds);
    t.terminal = true;  // fixed targets
    batch.push_back(t);
  }
  double previous = critic_update(agent, batch);
  for (int i = 0; i < 50; ++i) {
    const double loss = critic_update(agent, batch);
    EXPECT_LT(loss, previous) << i;
    previous = loss;
  }
}

TEST(CriticUpdate, TouchesOnlyOnlineCritic) {
  Agent agent(small_config(), {}, 18);
  Rng rng(19);
  std::vector<Transition> batch;
  for (int i = 0; i < 8; ++i) batch.push_back(random_transition(rng, agent.bounds));
  const Agent before = agent;
  critic_update(agent, batch);
  EXPECT_EQ(agent.actor, before.actor);
  EXPECT_EQ(agent.actor_target, before.actor_target);
  EXPECT_EQ(agent.critic_target, before.critic_target);
  EXPECT_FALSE(agent.critic == before.critic);
  EXPECT_EQ(agent.counters.critic_updates, 1);
}

TEST(CriticUpdate, NonFiniteRewardIsDivergence) {
  Agent agent(small_config(), {}, 20);
  Transition t;
  t.reward = std::nan("");
  t.terminal = true;
  try {
    critic_update(agent, std::span(&t, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Divergence);
  }
}

TEST(ActorUpdate, ConstantCriticGivesZeroGradient) {
  Agent agent(small_config(), {}, 21);
  auto& last = agent.critic.layers().back();
  last.weight.setZero();
  last.bias.setConstant(0.7);
  Rng rng(22);
  std::vector<Transition> batch;
  for (int i = 0; i < 8; ++i) batch.push_back(random_transition(rng, agent.bounds));
  const nn::DenseNetwork before = agent.actor;
  EXPECT_NEAR(actor_update(agent, batch), 0.7, 1e-15);
  EXPECT_EQ(agent.actor, before);
}

TEST(ActorUpdate, TouchesOnlyOnlineActor) {
  Agent agent(small_config(), {}, 23);
  Rng rng(24);
  std::vector<Transition> batch;
  for (int i = 0; i < 8; ++i) batch.push_back(random_transition(rng, agent.bounds));
  const Agent before = agent;
  actor_update(agent, batch);
  EXPECT_EQ(agent.critic, before.critic);
  EXPECT_EQ(agent.actor_target, before.actor_target);
  EXPECT_EQ(agent.critic_target, before.critic_target);
  EXPECT_FALSE(agent.actor == before.actor);
}

TEST(ActorUpdate, ClimbsToKnownOptimum) {
  // Q(s, a) = -(rho - 0.15)^2 has its maximum at rho = 0.15 for every state.
  const ActionBounds b{0.0, 0.2};
  for (const ActionHead head : {ActionHead::Spherical, ActionHead::Cartesian}) {
    AgentConfig c = small_config();
    c.action_head = head;
    Agent agent(c, b, 25);
    agent.actor_opt.params.learning_rate = 1e-2;
    const CriticProbe probe = [&](const Eigen::MatrixXd&, const Eigen::MatrixXd& f, Eigen::MatrixXd& dq) {
      Eigen::RowVectorXd rho(f.cols());
      dq = Eigen::MatrixXd::Zero(3, f.cols());
      for (Eigen::Index j = 0; j < f.cols(); ++j) {
        if (head == ActionHead::Spherical) {
          rho[j] = b.rho_min + (b.rho_max - b.rho_min) * f(0, j);
          dq(0, j) = -2.0 * (rho[j] - 0.15) * (b.rho_max - b.rho_min);
        } else {
          const double norm = f.col(j).norm();
          rho[j] = b.rho_max * norm;
          if (norm > 0.0) dq.col(j) = (-2.0 * (rho[j] - 0.15) * b.rho_max / norm) * f.col(j);
        }
      }
      return Eigen::RowVectorXd(-(rho.array() - 0.15).square().matrix());
    };
    Rng rng(26);
    Eigen::MatrixXd states(6, 32);
    for (int j = 0; j < 32; ++j) states.col(j) = random_vector(rng, 6);
    for (int i = 0; i < 1000; ++i) actor_update(agent.actor, agent.actor_opt, agent.codec(), states, probe);
    double mean_rho = 0.0;
    for (int j = 0; j < 32; ++j) {
      Observation s;
      for (int k = 0; k < 6; ++k) s[k] = states(k, j);
      mean_rho += policy_action(agent.actor, agent.codec(), s).rho / 32;
    }
    EXPECT_NEAR(mean_rho, 0.15, 1e-3) << to_string(head);
  }
}

TEST(ActorUpdate, GradientMatchesFiniteDifferences) {
  AgentConfig c = small_config();
  c.actor_hidden = {5};
  c.critic_hidden = {6};
  Rng rng(27);
  for (int trial = 0; trial < 6; ++trial) {
    c.action_head = trial % 2 == 0 ? ActionHead::Cartesian : ActionHead::Spherical;
    const ActionBounds b{trial < 3 ? 0.0 : 0.05, 0.2};
    Agent agent(c, b, 28 + trial);
    Eigen::MatrixXd states(6, 4);
    for (int j = 0; j < 4; ++j) states.col(j) = random_vector(rng, 6);
    const CriticProbe probe = critic_probe(agent.critic);
    const Eigen::VectorXd analytic = flatten(actor_gradient(agent.actor, agent.codec(), states, probe));

    nn::DenseNetwork actor = agent.actor;
    auto objective = [&](const Eigen::VectorXd& theta) {
      unflatten(actor, theta);
      Eigen::MatrixXd x(9, 4);
      x << states, agent.codec().output_features(actor.forward_batch(states));
      return -agent.critic.forward_batch(x).mean();
    };
    const Eigen::VectorXd numeric = oracle::central_difference(objective, flatten(agent.actor));
    for (Eigen::Index i = 0; i < numeric.size(); ++i)
      EXPECT_LT(oracle::relative_error(analytic[i], numeric[i]), 1e-3) << trial << " " << i;
  }
}

TEST(TrainStep, WarmUpOnlyStores) {
  Agent agent(small_config(), {}, 30);
  Rng rng(31);
  const Agent before = agent;
  for (int i = 0; i < 7; ++i) EXPECT_FALSE(train_step(agent, random_transition(rng, agent.bounds)).has_value());
  EXPECT_EQ(agent.buffer.size(), 7u);
  EXPECT_EQ(agent.actor, before.actor);
  EXPECT_EQ(agent.critic, before.critic);
  EXPECT_EQ(agent.counters.critic_updates, 0);
}

TEST(TrainStep, CallAccounting) {
  Agent agent(small_config(), {}, 32);
  Rng rng(33);
  for (int i = 0; i < 7; ++i) train_step(agent, random_transition(rng, agent.bounds));
  EXPECT_TRUE(train_step(agent, random_transition(rng, agent.bounds)).has_value());
  EXPECT_EQ(agent.counters.critic_updates, 1);
  EXPECT_EQ(agent.counters.actor_updates, 1);
  EXPECT_EQ(agent.counters.soft_updates, 2);
  train_step(agent, random_transition(rng, agent.bounds));
  EXPECT_EQ(agent.counters.critic_updates, 2);
  EXPECT_EQ(agent.counters.soft_updates, 4);
}

TEST(TrainStep, ReproducibleSampling) {
  auto run = [] {
    Agent agent(small_config(), {}, 34);
    Rng rng(35);
    std::vector<std::size_t> indices;
    for (int i = 0; i < 40; ++i) {
      train_step(agent, random_transition(rng, agent.bounds));
      Rng probe = agent.rng;
      const auto idx = agent.buffer.sample_indices(8, probe);
      indices.insert(indices.end(), idx.begin(), idx.end());
    }
    return std::make_pair(indices, save_agent(agent));
  };
  EXPECT_EQ(run(), run());
}

TEST(TrainStep, TargetLagIsExactBlend) {
  AgentConfig c = small_config();
  c.nu = 0.3;
  Agent agent(c, {}, 36);
  Rng rng(37);
  for (int i = 0; i < 30; ++i) {
    const Eigen::VectorXd actor_prev = flatten(agent.actor_target);
    const Eigen::VectorXd critic_prev = flatten(agent.critic_target);
    const bool updated = train_step(agent, random_transition(rng, agent.bounds)).has_value();
    const Eigen::VectorXd actor_expect = updated ? Eigen::VectorXd(0.3 * flatten(agent.actor) + 0.7 * actor_prev)
                                                 : actor_prev;
    const Eigen::VectorXd critic_expect =
        updated ? Eigen::VectorXd(0.3 * flatten(agent.critic) + 0.7 * critic_prev) : critic_prev;
    EXPECT_TRUE(flatten(agent.actor_target).isApprox(actor_expect, 1e-15));
    EXPECT_TRUE(flatten(agent.critic_target).isApprox(critic_expect, 1e-15));
  }
}

TEST(TrainStep, TargetsStartAsExactCopies) {
  const Agent agent(small_config(), {}, 38);
  EXPECT_EQ(agent.actor_target, agent.actor);
  EXPECT_EQ(agent.critic_target, agent.critic);
  EXPECT_EQ(agent.actor.input_dim(), 6);
  EXPECT_EQ(agent.actor.output_dim(), 3);
  EXPECT_EQ(agent.critic.input_dim(), 9);
  EXPECT_EQ(agent.critic.output_dim(), 1);
}

TEST(Replay, FifoAtPaperCapacity) {
  const std::size_t cap = 10000;
  for (std::size_t extra : {std::size_t{1}, std::size_t{2500}, std::size_t{10000}, std::size_t{23457}}) {
    ReplayBuffer buffer(cap);
    for (std::size_t i = 0; i < cap + extra; ++i) {
      buffer.push(tagged(static_cast<double>(i)));
      ASSERT_LE(buffer.size(), cap);
    }
    ASSERT_EQ(buffer.size(), cap);
    for (std::size_t i = 0; i < cap; ++i) ASSERT_EQ(buffer[i].reward, static_cast<double>(extra + i)) << extra;
  }
}

TEST(Replay, PartialFillKeepsInsertionOrder) {
  ReplayBuffer buffer(5);
  for (int i = 0; i < 3; ++i) buffer.push(tagged(i));
  EXPECT_EQ(buffer.size(), 3u);
  EXPECT_FALSE(buffer.full());
  for (int i = 0; i < 3; ++i) EXPECT_EQ(buffer[i].reward, i);
  EXPECT_THROW(buffer[3], Error);
}

TEST(Replay, EmptyBufferCannotSample) {
  ReplayBuffer buffer(4);
  Rng rng(39);
  EXPECT_THROW(buffer.sample_indices(1, rng), Error);
  EXPECT_THROW(ReplayBuffer(0), Error);
}

// 1e5 draws from a full buffer of 1e4. With 1e4 indices a few dozen will
// individually fall outside 3 standard errors by chance, so the checks are
// on aggregate statistics, each held to a 3-standard-error band.
TEST(Replay, SamplingIsUniform) {
  const std::size_t cap = 10000;
  const std::size_t draws = 100000;
  ReplayBuffer buffer(cap);
  for (std::size_t i = 0; i < cap + 123; ++i) buffer.push(tagged(static_cast<double>(i)));
  Rng rng(40);
  std::vector<double> counts(cap, 0.0);
  for (std::size_t i : buffer.sample_indices(draws, rng)) counts[i] += 1.0;

  const double p = 1.0 / cap;
  const double expect = draws * p;
  const double se = std::sqrt(draws * p * (1 - p));

  double mean_index = 0.0;
  double chi2 = 0.0;
  int outside = 0;
  for (std::size_t i = 0; i < cap; ++i) {
    mean_index += counts[i] * static_cast<double>(i) / draws;
    chi2 += (counts[i] - expect) * (counts[i] - expect) / expect;
    if (std::abs(counts[i] - expect) > 3 * se) ++outside;
  }
  const double index_se = std::sqrt((static_cast<double>(cap) * cap - 1) / 12.0 / draws);
  EXPECT_NEAR(mean_index, (cap - 1) / 2.0, 3 * index_se);
  const double dof = cap - 1.0;
  EXPECT_NEAR(chi2, dof, 3 * std::sqrt(2 * dof));
  // Fraction of per-index excursions beyond 3 SE versus its normal-approximation
  // rate; the counts are discrete so the band is generous on the low side.
  const double q = std::erfc(3.0 / std::sqrt(2.0));
  EXPECT_LT(outside, cap * q + 3 * std::sqrt(cap * q * (1 - q)));
}

TEST(Checkpoint, AgentRoundTrip) {
  Agent agent(small_config(), {0.01, 0.18}, 41);
  Rng rng(42);
  for (int i = 0; i < 20; ++i) train_step(agent, random_transition(rng, agent.bounds));
  const auto bytes = save_agent(agent);
  const Agent back = load_agent(bytes);
  EXPECT_EQ(back.actor, agent.actor);
  EXPECT_EQ(back.critic, agent.critic);
  EXPECT_EQ(back.actor_target, agent.actor_target);
  EXPECT_EQ(back.critic_target, agent.critic_target);
  EXPECT_EQ(back.critic_opt.step_count, agent.critic_opt.step_count);
  EXPECT_EQ(back.bounds.rho_min, 0.01);
  EXPECT_EQ(back.config.critic_hidden, agent.config.critic_hidden);
  EXPECT_EQ(back.buffer.size(), 0u);
  EXPECT_EQ(save_agent(back), bytes);
}

TEST(Checkpoint, AgentCorruption) {
  const Agent agent(small_config(), {}, 43);
  auto bytes = save_agent(agent);
  bytes.pop_back();
  EXPECT_THROW(load_agent(bytes), Error);
  bytes = save_agent(agent);
  bytes[0] = 'X';
  try {
    load_agent(bytes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CorruptCheckpoint);
  }
}

TEST(Transfer, CopiesOnlineIntoBothCopies) {
  const Agent source(small_config(), {}, 44);
  Agent agent(small_config(), {}, 45);
  transfer_weights(agent, source);
  EXPECT_EQ(agent.actor, source.actor);
  EXPECT_EQ(agent.actor_target, source.actor);
  EXPECT_EQ(agent.critic_target, source.critic);
  EXPECT_EQ(agent.actor_opt.step_count, 0);
}

TEST(Transfer, RejectsMismatch) {
  const Agent source(small_config(), {}, 46);
  AgentConfig wider = small_config();
  wider.actor_hidden = {9};
  Agent other(wider, {}, 47);
  try {
    transfer_weights(other, source);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IncompatibleCheckpoint);
  }
  Agent rescaled(small_config(), {0.0, 0.3}, 48);
  EXPECT_THROW(transfer_weights(rescaled, source), Error);
  AgentConfig spherical = small_config();
  spherical.action_head = ActionHead::Spherical;
  Agent other_head(spherical, {}, 49);
  EXPECT_THROW(transfer_weights(other_head, source), Error);
}
