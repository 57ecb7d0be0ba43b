#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "erl2/environments.hpp"

using namespace erl2;

TEST_CASE("pointmass: the origin is a rewarded terminal fixed point") {
  PointMass2D env;
  env.set_state({0.0, 0.0}, {0.0, 0.0});
  const StepResult r = env.step(Eigen::VectorXd::Zero(2));
  CHECK(r.terminal);
  CHECK(r.reward == doctest::Approx(10.0).epsilon(1e-15));
  CHECK_THROWS_AS(env.step(Eigen::VectorXd::Zero(2)), std::logic_error);
}

TEST_CASE("pointmass: 100-step trajectory matches an independent simulation") {
  PointMass2D env;
  Rng rng(2024);
  Eigen::VectorXd s = env.reset(rng);

  // Re-implementation of the two update lines, kept separate from the
  // environment code.
  double px = s(0), py = s(1), vx = 0.0, vy = 0.0;
  Rng action_rng(55);
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd a(2);
    a << action_rng.uniform(-1, 1), action_rng.uniform(-1, 1);
    const StepResult r = env.step(a);

    vx = std::clamp(vx + 0.1 * a(0), -1.0, 1.0);
    vy = std::clamp(vy + 0.1 * a(1), -1.0, 1.0);
    px = std::clamp(px + 0.1 * vx, -1.0, 1.0);
    py = std::clamp(py + 0.1 * vy, -1.0, 1.0);
    double reward = -std::sqrt(px * px + py * py);
    bool terminal = std::sqrt(px * px + py * py) < 0.05;
    if (terminal) reward += 10.0;

    CHECK(std::abs(r.next_state(0) - px) < 1e-12);
    CHECK(std::abs(r.next_state(1) - py) < 1e-12);
    CHECK(std::abs(r.next_state(2) - vx) < 1e-12);
    CHECK(std::abs(r.next_state(3) - vy) < 1e-12);
    CHECK(std::abs(r.reward - reward) < 1e-12);
    CHECK(r.terminal == terminal);
    if (r.terminal) break;
  }
}

TEST_CASE("pointmass rewards stay within the documented bounds") {
  PointMass2D env;
  Rng rng(77);
  for (int ep = 0; ep < 5; ++ep) {
    env.reset(rng);
    for (int t = 0; t < 100; ++t) {
      Eigen::VectorXd a(2);
      a << rng.uniform(-1, 1), rng.uniform(-1, 1);
      const StepResult r = env.step(a);
      CHECK(r.reward >= -2.0 * std::sqrt(2.0));
      CHECK(r.reward <= 10.0);
      if (r.terminal) break;
    }
  }
}

TEST_CASE("pendulum: hanging at rest costs pi^2") {
  Pendulum env;
  env.set_state(3.14159265358979323846, 0.0);
  const StepResult r = env.step(Eigen::VectorXd::Zero(1));
  CHECK(r.reward == doctest::Approx(-3.14159265358979323846 * 3.14159265358979323846)
                        .epsilon(1e-12));
  CHECK_FALSE(r.terminal);
}

TEST_CASE("pendulum: dynamics match the stated difference equations") {
  Pendulum env;
  env.set_state(0.3, -0.2);
  Eigen::VectorXd a(1);
  a << 1.7;
  const StepResult r = env.step(a);

  double theta = 0.3, theta_dot = -0.2;
  const double expected_reward = -(theta * theta + 0.1 * theta_dot * theta_dot + 0.001 * 1.7 * 1.7);
  theta_dot += (1.5 * 10.0 * std::sin(theta) + 3.0 * 1.7) * 0.05;
  theta_dot = std::clamp(theta_dot, -8.0, 8.0);
  theta += theta_dot * 0.05;

  CHECK(std::abs(r.reward - expected_reward) < 1e-12);
  CHECK(std::abs(r.next_state(0) - std::cos(theta)) < 1e-12);
  CHECK(std::abs(r.next_state(1) - std::sin(theta)) < 1e-12);
  CHECK(std::abs(r.next_state(2) - theta_dot) < 1e-12);
}

TEST_CASE("pendulum rewards stay within the documented bounds") {
  Pendulum env;
  Rng rng(91);
  env.reset(rng);
  const double bound = 3.14159265358979323846 * 3.14159265358979323846 + 0.1 * 64.0 + 0.001 * 4.0;
  for (int t = 0; t < 200; ++t) {
    Eigen::VectorXd a(1);
    a << rng.uniform(-2, 2);
    const StepResult r = env.step(a);
    CHECK(r.reward <= 0.0);
    CHECK(r.reward >= -bound);
  }
}

TEST_CASE("tabular chain follows its embedded tables") {
  TabularChain env;
  Rng rng(1);
  Eigen::VectorXd s = env.reset(rng);
  CHECK(s(0) == 1.0);
  int state = 0;
  for (int t = 0; t < 25; ++t) {
    const int ai = t % 2;
    const StepResult r = env.step(TabularChain::action_vector(ai));
    CHECK(r.reward == TabularChain::kReward[state][ai]);
    state = TabularChain::kNext[state][ai];
    CHECK(r.next_state(state) == 1.0);
    CHECK(r.next_state.sum() == 1.0);
    CHECK_FALSE(r.terminal);
  }
}

TEST_CASE("make_env resolves names and rejects unknowns") {
  CHECK(make_env("pointmass")->spec().state_width == 4);
  CHECK(make_env("pendulum")->spec().state_width == 3);
  CHECK(make_env("tabular-chain")->spec().state_width == 3);
  CHECK_THROWS_AS(make_env("mujoco"), std::invalid_argument);
}

TEST_CASE("rollout is deterministic and sums rewards exactly") {
  Rng init(3);
  const SharedRepresentation z = make_shared_representation(4, {6, 5}, init);
  PolicyRepresentation w = make_policy_representation(5, 2, init);
  auto env1 = make_env("pointmass");
  auto env2 = make_env("pointmass");
  Rng r1(42), r2(42);
  const RolloutResult a = rollout(z, w, env1->spec().action_spec, *env1, 100, 0.0, r1);
  const RolloutResult b = rollout(z, w, env2->spec().action_spec, *env2, 100, 0.0, r2);

  REQUIRE(a.steps == b.steps);
  for (int i = 0; i < a.steps; ++i) {
    CHECK(a.transitions[i].state == b.transitions[i].state);
    CHECK(a.transitions[i].action == b.transitions[i].action);
    CHECK(a.transitions[i].reward == b.transitions[i].reward);
  }
  double sum = 0.0;
  for (const auto& t : a.transitions) sum += t.reward;
  CHECK(sum == a.undiscounted_return);
}

TEST_CASE("rollout honors max_steps and flags truncation correctly") {
  Rng init(4);
  const SharedRepresentation z = make_shared_representation(3, {5, 4}, init);
  PolicyRepresentation w = make_policy_representation(4, 1, init);
  auto env = make_env("pendulum");
  Rng rng(5);
  const RolloutResult one = rollout(z, w, env->spec().action_spec, *env, 1, 0.0, rng);
  CHECK(one.steps == 1);
  CHECK(one.transitions.size() == 1);
  CHECK_FALSE(one.ended);

  // A full-horizon rollout is truncation, never termination.
  Rng rng2(6);
  const RolloutResult full = rollout(z, w, env->spec().action_spec, *env, 10000, 0.0, rng2);
  CHECK(full.steps == 200);
  CHECK(full.ended);
  CHECK_FALSE(full.transitions.back().terminal);
}

TEST_CASE("replay buffer evicts oldest-first and preserves order") {
  ReplayBuffer buf(3);
  auto make_t = [](double r) {
    Transition t;
    t.state = Eigen::VectorXd::Constant(1, r);
    t.action = Eigen::VectorXd::Constant(1, 0.0);
    t.reward = r;
    t.next_state = Eigen::VectorXd::Constant(1, r);
    return t;
  };
  for (int i = 1; i <= 4; ++i) buf.push(make_t(i));
  CHECK(buf.size() == 3);
  CHECK(buf.at(0).reward == 2.0);
  CHECK(buf.at(1).reward == 3.0);
  CHECK(buf.at(2).reward == 4.0);
}

TEST_CASE("replay buffer samples uniformly") {
  ReplayBuffer buf(16);
  for (int i = 0; i < 10; ++i) {
    Transition t;
    t.state = Eigen::VectorXd::Constant(1, i);
    t.action = Eigen::VectorXd::Zero(1);
    t.reward = i;
    t.next_state = Eigen::VectorXd::Zero(1);
    buf.push(t);
  }
  Rng rng(123);
  std::map<int, long> counts;
  const long draws = 100000;
  const Batch b = buf.sample(1, rng);
  (void)b;
  for (long i = 0; i < draws; ++i) {
    const Batch s = buf.sample(1, rng);
    counts[static_cast<int>(s.rewards(0))] += 1;
  }
  for (int i = 0; i < 10; ++i) {
    const double freq = static_cast<double>(counts[i]) / draws;
    CHECK(freq > 0.095);
    CHECK(freq < 0.105);
  }
}

TEST_CASE("replay buffer rejects oversized and empty samples") {
  ReplayBuffer buf(8);
  Rng rng(1);
  CHECK_THROWS_AS(buf.sample(1, rng), std::runtime_error);
  Transition t;
  t.state = Eigen::VectorXd::Zero(1);
  t.action = Eigen::VectorXd::Zero(1);
  t.next_state = Eigen::VectorXd::Zero(1);
  buf.push(t);
  CHECK_THROWS_AS(buf.sample(2, rng), std::invalid_argument);
  CHECK(buf.sample(1, rng).size() == 1);
}

TEST_CASE("out-of-bounds actions are clamped and counted") {
  PointMass2D env;
  Rng rng(9);
  env.reset(rng);
  Eigen::VectorXd a(2);
  a << 5.0, -5.0;
  env.step(a);
  CHECK(env.clamp_count() == 1);
}
