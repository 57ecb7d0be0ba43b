#include "erl2/environments.hpp"

#include <cmath>
#include <stdexcept>

namespace erl2 {
namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_angle(double theta) {
  // Wrap to [-pi, pi].
  double w = std::fmod(theta + kPi, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  return w - kPi;
}

Eigen::VectorXd clamp_to(const ActionSpec& spec, const Eigen::VectorXd& a, long& clamp_counter) {
  if (a.size() != spec.dim()) {
    throw std::invalid_argument("env step: action width mismatch");
  }
  Eigen::VectorXd out = spec.clamp(a);
  if ((out.array() != a.array()).any()) ++clamp_counter;
  return out;
}

}  // namespace

PointMass2D::PointMass2D() {
  spec_.state_width = 4;
  spec_.action_spec = ActionSpec::symmetric(2, 1.0);
  spec_.horizon = 100;
  spec_.gamma_default = 0.99;
}

Eigen::VectorXd PointMass2D::reset(Rng& rng) {
  pos_ = Eigen::Vector2d(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  vel_.setZero();
  done_ = false;
  Eigen::VectorXd s(4);
  s << pos_(0), pos_(1), vel_(0), vel_(1);
  return s;
}

StepResult PointMass2D::step(const Eigen::VectorXd& action) {
  if (done_) throw std::logic_error("PointMass2D: step after terminal state");
  const Eigen::VectorXd a = clamp_to(spec_.action_spec, action, clamps_);
  vel_ = (vel_ + 0.1 * Eigen::Vector2d(a(0), a(1))).cwiseMax(-1.0).cwiseMin(1.0);
  pos_ = (pos_ + 0.1 * vel_).cwiseMax(-1.0).cwiseMin(1.0);
  StepResult r;
  const double dist = pos_.norm();
  r.reward = -dist;
  r.terminal = dist < kGoalRadius;
  if (r.terminal) {
    r.reward += kGoalBonus;
    done_ = true;
  }
  r.next_state.resize(4);
  r.next_state << pos_(0), pos_(1), vel_(0), vel_(1);
  return r;
}

std::unique_ptr<Environment> PointMass2D::clone() const {
  return std::make_unique<PointMass2D>(*this);
}

void PointMass2D::set_state(const Eigen::Vector2d& pos, const Eigen::Vector2d& vel) {
  pos_ = pos;
  vel_ = vel;
  done_ = false;
}

Pendulum::Pendulum() {
  spec_.state_width = 3;
  spec_.action_spec = ActionSpec::symmetric(1, 2.0);
  spec_.horizon = 200;
  spec_.gamma_default = 0.99;
}

Eigen::VectorXd Pendulum::observation() const {
  Eigen::VectorXd s(3);
  s << std::cos(theta_), std::sin(theta_), theta_dot_;
  return s;
}

Eigen::VectorXd Pendulum::reset(Rng& rng) {
  theta_ = rng.uniform(-kPi, kPi);
  theta_dot_ = rng.uniform(-1.0, 1.0);
  started_ = true;
  return observation();
}

StepResult Pendulum::step(const Eigen::VectorXd& action) {
  if (!started_) throw std::logic_error("Pendulum: step before reset");
  const Eigen::VectorXd a = clamp_to(spec_.action_spec, action, clamps_);
  const double torque = a(0);
  constexpr double g = 10.0, m = 1.0, l = 1.0, dt = 0.05;

  StepResult r;
  const double angle = wrap_angle(theta_);
  r.reward = -(angle * angle + 0.1 * theta_dot_ * theta_dot_ + 0.001 * torque * torque);

  theta_dot_ += (1.5 * g / l * std::sin(theta_) + 3.0 / (m * l * l) * torque) * dt;
  theta_dot_ = std::clamp(theta_dot_, -8.0, 8.0);
  theta_ += theta_dot_ * dt;

  r.terminal = false;
  r.next_state = observation();
  return r;
}

std::unique_ptr<Environment> Pendulum::clone() const { return std::make_unique<Pendulum>(*this); }

void Pendulum::set_state(double theta, double theta_dot) {
  theta_ = theta;
  theta_dot_ = theta_dot;
  started_ = true;
}

const int TabularChain::kNext[TabularChain::kStates][TabularChain::kActions] = {
    {0, 1}, {0, 2}, {1, 2}};
const double TabularChain::kReward[TabularChain::kStates][TabularChain::kActions] = {
    {0.05, -0.10}, {0.30, 0.10}, {-0.15, 1.00}};

TabularChain::TabularChain() {
  spec_.state_width = kStates;
  spec_.action_spec = ActionSpec::symmetric(1, 1.0);
  spec_.horizon = 25;
  spec_.gamma_default = 0.9;
}

Eigen::VectorXd TabularChain::one_hot(int s) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(kStates);
  v(s) = 1.0;
  return v;
}

Eigen::VectorXd TabularChain::action_vector(int a) {
  Eigen::VectorXd v(1);
  v(0) = a == 1 ? 1.0 : -1.0;
  return v;
}

Eigen::VectorXd TabularChain::reset(Rng& rng) {
  (void)rng;
  state_ = 0;
  started_ = true;
  return one_hot(state_);
}

StepResult TabularChain::step(const Eigen::VectorXd& action) {
  if (!started_) throw std::logic_error("TabularChain: step before reset");
  const Eigen::VectorXd a = clamp_to(spec_.action_spec, action, clamps_);
  const int ai = discrete_action(a);
  StepResult r;
  r.reward = kReward[state_][ai];
  state_ = kNext[state_][ai];
  r.terminal = false;
  r.next_state = one_hot(state_);
  return r;
}

std::unique_ptr<Environment> TabularChain::clone() const {
  return std::make_unique<TabularChain>(*this);
}

std::unique_ptr<Environment> make_env(const std::string& name) {
  if (name == "pointmass") return std::make_unique<PointMass2D>();
  if (name == "pendulum") return std::make_unique<Pendulum>();
  if (name == "tabular-chain") return std::make_unique<TabularChain>();
  throw std::invalid_argument("unknown environment: " + name);
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  store_.reserve(std::min<std::size_t>(capacity, 1u << 16));
}

void ReplayBuffer::push(const Transition& t) {
  if (!std::isfinite(t.reward)) {
    throw std::runtime_error("ReplayBuffer: non-finite reward");
  }
  if (store_.size() < capacity_) {
    store_.push_back(t);
  } else {
    store_[head_] = t;
    head_ = (head_ + 1) % capacity_;
  }
}

void ReplayBuffer::push(const std::vector<Transition>& ts) {
  for (const auto& t : ts) push(t);
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= store_.size()) throw std::out_of_range("ReplayBuffer: index out of range");
  return store_[(head_ + i) % store_.size()];
}

Batch ReplayBuffer::sample(int batch_size, Rng& rng) const {
  if (store_.empty()) throw std::runtime_error("ReplayBuffer: sample from empty buffer");
  if (batch_size <= 0 || static_cast<std::size_t>(batch_size) > store_.size()) {
    throw std::invalid_argument("ReplayBuffer: batch size exceeds current contents");
  }
  const auto& first = store_.front();
  Batch b;
  b.states.resize(first.state.size(), batch_size);
  b.actions.resize(first.action.size(), batch_size);
  b.rewards.resize(batch_size);
  b.next_states.resize(first.next_state.size(), batch_size);
  b.terminal.resize(batch_size);
  for (int i = 0; i < batch_size; ++i) {
    const Transition& t = store_[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(store_.size())))];
    b.states.col(i) = t.state;
    b.actions.col(i) = t.action;
    b.rewards(i) = t.reward;
    b.next_states.col(i) = t.next_state;
    b.terminal(i) = t.terminal ? 1.0 : 0.0;
  }
  return b;
}

RolloutResult rollout(const SharedRepresentation& z, const PolicyRepresentation& w,
                      const ActionSpec& spec, Environment& env, int max_steps, double noise_sigma,
                      Rng& rng) {
  if (max_steps < 1) throw std::invalid_argument("rollout: max_steps must be >= 1");
  RolloutResult result;
  const int limit = std::min(max_steps, env.spec().horizon);
  Eigen::VectorXd state = env.reset(rng);
  const Eigen::VectorXd half = spec.half_range();
  for (int t = 0; t < limit; ++t) {
    Eigen::VectorXd action = policy_forward(z, w, spec, state);
    if (noise_sigma > 0.0) {
      for (Eigen::Index i = 0; i < action.size(); ++i) {
        action(i) += rng.normal(0.0, noise_sigma * half(i));
      }
      action = spec.clamp(action);
    }
    StepResult sr = env.step(action);
    result.transitions.push_back({state, action, sr.reward, sr.next_state, sr.terminal});
    result.undiscounted_return += sr.reward;
    result.steps += 1;
    state = sr.next_state;
    if (sr.terminal) {
      result.ended = true;
      break;
    }
  }
  if (result.steps >= env.spec().horizon) result.ended = true;
  return result;
}

}  // namespace erl2
