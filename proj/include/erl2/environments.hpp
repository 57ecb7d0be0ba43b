#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>
#include <vector>

#include "erl2/policy.hpp"
#include "erl2/rng.hpp"

namespace erl2 {

// One environment interaction. `terminal` is true only for genuine MDP
// termination; horizon truncation keeps it false so TD targets bootstrap.
struct Transition {
  Eigen::VectorXd state;
  Eigen::VectorXd action;
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool terminal = false;
};

struct EnvSpec {
  int state_width = 0;
  ActionSpec action_spec;
  int horizon = 1;
  double gamma_default = 0.99;
};

struct StepResult {
  Eigen::VectorXd next_state;
  double reward = 0.0;
  bool terminal = false;
};

class Environment {
 public:
  virtual ~Environment() = default;
  virtual const EnvSpec& spec() const = 0;
  virtual Eigen::VectorXd reset(Rng& rng) = 0;
  // Steps with the given action (clamped to bounds if outside; clamps are
  // counted). Throws if called after a terminal step without reset.
  virtual StepResult step(const Eigen::VectorXd& action) = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;
  virtual long clamp_count() const = 0;
};

// Velocity-integrator navigation task. State (px, py, vx, vy); reaching
// the origin ball ends the episode with a bonus.
class PointMass2D final : public Environment {
 public:
  PointMass2D();
  const EnvSpec& spec() const override { return spec_; }
  Eigen::VectorXd reset(Rng& rng) override;
  StepResult step(const Eigen::VectorXd& action) override;
  std::unique_ptr<Environment> clone() const override;
  long clamp_count() const override { return clamps_; }

  static constexpr double kGoalRadius = 0.05;
  static constexpr double kGoalBonus = 10.0;

  // Diagnostic hook: places the mass at an exact state.
  void set_state(const Eigen::Vector2d& pos, const Eigen::Vector2d& vel);

 private:
  EnvSpec spec_;
  Eigen::Vector2d pos_;
  Eigen::Vector2d vel_;
  bool done_ = true;
  long clamps_ = 0;
};

// Torque-limited pendulum swing-up, never terminal.
class Pendulum final : public Environment {
 public:
  Pendulum();
  const EnvSpec& spec() const override { return spec_; }
  Eigen::VectorXd reset(Rng& rng) override;
  StepResult step(const Eigen::VectorXd& action) override;
  std::unique_ptr<Environment> clone() const override;
  long clamp_count() const override { return clamps_; }

  // Diagnostic hook: places the pole at an exact angle and velocity.
  void set_state(double theta, double theta_dot);

 private:
  Eigen::VectorXd observation() const;
  EnvSpec spec_;
  double theta_ = 0.0;
  double theta_dot_ = 0.0;
  bool started_ = false;
  long clamps_ = 0;
};

// Three-state, two-action chain with deterministic tables, used by the
// value-learning oracles. States are one-hot; the scalar action in [-1, 1]
// selects action 1 when >= 0, else action 0. Always starts in state 0.
class TabularChain final : public Environment {
 public:
  TabularChain();
  const EnvSpec& spec() const override { return spec_; }
  Eigen::VectorXd reset(Rng& rng) override;
  StepResult step(const Eigen::VectorXd& action) override;
  std::unique_ptr<Environment> clone() const override;
  long clamp_count() const override { return clamps_; }

  static constexpr int kStates = 3;
  static constexpr int kActions = 2;
  // next_state[s][a], reward[s][a]
  static const int kNext[kStates][kActions];
  static const double kReward[kStates][kActions];

  static int discrete_action(const Eigen::VectorXd& action) { return action(0) >= 0.0 ? 1 : 0; }
  static Eigen::VectorXd one_hot(int s);
  static Eigen::VectorXd action_vector(int a);  // {-1, +1}

 private:
  EnvSpec spec_;
  int state_ = 0;
  bool started_ = false;
  long clamps_ = 0;
};

// Environment names accepted by config/CLI: pointmass, pendulum,
// tabular-chain (tests only).
std::unique_ptr<Environment> make_env(const std::string& name);

struct Batch {
  Eigen::MatrixXd states;       // S x B
  Eigen::MatrixXd actions;      // A x B
  Eigen::VectorXd rewards;      // B
  Eigen::MatrixXd next_states;  // S x B
  Eigen::VectorXd terminal;     // B, 1.0 if terminal else 0.0

  Eigen::Index size() const { return rewards.size(); }
};

// Bounded FIFO store shared by all agents; uniform sampling with
// replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);
  void push(const std::vector<Transition>& ts);
  Batch sample(int batch_size, Rng& rng) const;

  std::size_t size() const { return store_.size(); }
  std::size_t capacity() const { return capacity_; }
  // Oldest-first iteration order.
  const Transition& at(std::size_t i) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // next overwrite position once full
  std::vector<Transition> store_;
};

struct RolloutResult {
  std::vector<Transition> transitions;
  double undiscounted_return = 0.0;
  int steps = 0;
  bool ended = false;  // terminal reached or env horizon exhausted
};

// Resets the environment, then follows the two-scale policy for at most
// min(max_steps, horizon) steps. Gaussian exploration noise with std
// sigma * half-range is added per dimension and clamped to bounds;
// sigma = 0 for population members and evaluation.
RolloutResult rollout(const SharedRepresentation& z, const PolicyRepresentation& w,
                      const ActionSpec& spec, Environment& env, int max_steps, double noise_sigma,
                      Rng& rng);

}  // namespace erl2
