#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "erl2/reinforcement.hpp"
#include "erl2/serialize.hpp"
#include "erl2/value_functions.hpp"

using namespace erl2;

namespace {

// Single-layer head computing a constant (zero weights, bias c).
MlpParams constant_head(int in_width, double c) {
  MlpParams p;
  Layer l;
  l.weight = Eigen::MatrixXd::Zero(1, in_width);
  l.bias = Eigen::VectorXd::Constant(1, c);
  l.activation = Activation::Identity;
  p.layers.push_back(l);
  return p;
}

// Single-layer head summing its inputs.
MlpParams sum_head(int in_width) {
  MlpParams p;
  Layer l;
  l.weight = Eigen::MatrixXd::Ones(1, in_width);
  l.bias = Eigen::VectorXd::Zero(1);
  l.activation = Activation::Identity;
  p.layers.push_back(l);
  return p;
}

}  // namespace

TEST_CASE("pevfa_encode: one action dimension equals its own column encoding") {
  Rng rng(1);
  PeVFAParams pevfa = make_pevfa(3, 1, 4, 8, {6}, 2, rng);
  PolicyRepresentation w = make_policy_representation(4, 1, rng);
  const Eigen::VectorXd e = pevfa_encode(pevfa, w);
  const Eigen::VectorXd column = mlp_forward(pevfa.column_encoder, w.mat).col(0);
  CHECK(e == column);
}

TEST_CASE("pevfa_encode: identical columns collapse to one encoding") {
  Rng rng(2);
  PeVFAParams pevfa = make_pevfa(3, 3, 4, 8, {6}, 2, rng);
  PolicyRepresentation w = make_policy_representation(4, 3, rng);
  w.mat.col(1) = w.mat.col(0);
  w.mat.col(2) = w.mat.col(0);
  const Eigen::VectorXd e = pevfa_encode(pevfa, w);
  PolicyRepresentation single{w.mat.col(0)};
  const Eigen::VectorXd column = mlp_forward(pevfa.column_encoder, single.mat).col(0);
  CHECK((e - column).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("pevfa_encode is exactly invariant to column permutations") {
  Rng rng(3);
  PeVFAParams pevfa = make_pevfa(4, 4, 5, 8, {6}, 2, rng);
  PolicyRepresentation w = make_policy_representation(5, 4, rng);
  const Eigen::VectorXd base = pevfa_encode(pevfa, w);

  const int perms[][4] = {{1, 0, 2, 3}, {3, 2, 1, 0}, {2, 3, 0, 1}, {1, 2, 3, 0}};
  for (const auto& perm : perms) {
    PolicyRepresentation permuted = w;
    for (int j = 0; j < 4; ++j) permuted.mat.col(j) = w.mat.col(perm[j]);
    CHECK(pevfa_encode(pevfa, permuted) == base);
  }
}

TEST_CASE("pevfa_eval is invariant to column permutations end to end") {
  Rng rng(4);
  PeVFAParams pevfa = make_pevfa(3, 2, 4, 8, {6, 5}, 2, rng);
  PolicyRepresentation w = make_policy_representation(4, 2, rng);
  Eigen::VectorXd s(3), a(2);
  s << 0.1, -0.7, 0.4;
  a << 0.5, -0.5;
  const double base = pevfa_eval(pevfa, s, a, w, QMode::Min);
  PolicyRepresentation permuted = w;
  permuted.mat.col(0) = w.mat.col(1);
  permuted.mat.col(1) = w.mat.col(0);
  CHECK(pevfa_eval(pevfa, s, a, permuted, QMode::Min) == base);
}

TEST_CASE("critic_eval: identical twins agree in every mode") {
  Rng rng(5);
  CriticParams critic = make_critic(3, 2, {6, 4}, 2, rng);
  critic.heads[1] = critic.heads[0];
  Eigen::VectorXd s(3), a(2);
  s << 0.2, 0.3, -0.1;
  a << 0.0, 0.9;
  const double q1 = critic_eval(critic, s, a, QMode::Q1);
  CHECK(critic_eval(critic, s, a, QMode::Q2) == q1);
  CHECK(critic_eval(critic, s, a, QMode::Min) == q1);
}

TEST_CASE("critic_eval: min of stubbed heads") {
  CriticParams critic;
  critic.heads.push_back(constant_head(5, 3.0));
  critic.heads.push_back(constant_head(5, 2.5));
  Eigen::VectorXd s(3), a(2);
  s.setZero();
  a.setZero();
  CHECK(critic_eval(critic, s, a, QMode::Min) == 2.5);
  CHECK(critic_eval(critic, s, a, QMode::Q1) == 3.0);
  CHECK(critic_eval(critic, s, a, QMode::Q2) == 2.5);
}

TEST_CASE("critic_eval: a single head behaves as q1 in every mode") {
  CriticParams critic;
  critic.heads.push_back(constant_head(4, -1.25));
  Eigen::VectorXd s(2), a(2);
  s.setZero();
  a.setZero();
  CHECK(critic_eval(critic, s, a, QMode::Min) == -1.25);
  CHECK(critic_eval(critic, s, a, QMode::Q1) == -1.25);
  CHECK_THROWS_AS(critic_eval(critic, s, a, QMode::Q2), std::invalid_argument);
}

TEST_CASE("pevfa_eval with a summing stub is hand-computable") {
  // Zero encoder: leaky_relu(0) = 0 everywhere, so the embedding is 0 and
  // the sum head sees only state and action.
  PeVFAParams pevfa;
  Layer enc;
  enc.weight = Eigen::MatrixXd::Zero(4, 5);
  enc.bias = Eigen::VectorXd::Zero(4);
  enc.activation = Activation::LeakyRelu;
  pevfa.column_encoder.layers = {enc};
  pevfa.heads.push_back(sum_head(3 + 2 + 4));

  PolicyRepresentation w = PolicyRepresentation{Eigen::MatrixXd::Ones(5, 2)};
  Eigen::VectorXd s(3), a(2);
  s << 0.5, 1.0, -0.25;
  a << 0.75, -0.5;
  CHECK(pevfa_eval(pevfa, s, a, w, QMode::Min) ==
        doctest::Approx(s.sum() + a.sum()).epsilon(1e-15));
}

TEST_CASE("pevfa TD-loss gradients match finite differences") {
  Rng rng(6);
  PeVFAParams pevfa = make_pevfa(3, 2, 4, 6, {8}, 2, rng);
  PeVFAParams target = make_pevfa(3, 2, 4, 6, {8}, 2, rng);
  const SharedRepresentation z = make_shared_representation(3, {5, 4}, rng);
  PolicyRepresentation w = make_policy_representation(4, 2, rng);
  const ActionSpec spec = ActionSpec::symmetric(2, 1.0);

  Batch batch;
  const int b = 5;
  batch.states = Eigen::MatrixXd::Random(3, b);
  batch.actions = Eigen::MatrixXd::Random(2, b);
  batch.rewards = Eigen::VectorXd::Random(b);
  batch.next_states = Eigen::MatrixXd::Random(3, b);
  batch.terminal = Eigen::VectorXd::Zero(b);
  batch.terminal(1) = 1.0;

  UpdateConfig cfg;
  cfg.gamma = 0.9;

  const PevfaLossGrads lg = pevfa_td_loss(pevfa, target, w, z, spec, batch, cfg);

  auto loss_at = [&](const PeVFAParams& p) {
    return pevfa_td_loss(p, target, w, z, spec, batch, cfg).loss;
  };
  const double h = 1e-5;
  auto check_block = [&](MlpParams& live, const MlpParams& analytic) {
    for (std::size_t k = 0; k < live.layers.size(); ++k) {
      for (int i = 0; i < live.layers[k].weight.size(); ++i) {
        double* entry = live.layers[k].weight.data() + i;
        const double saved = *entry;
        *entry = saved + h;
        const double up = loss_at(pevfa);
        *entry = saved - h;
        const double down = loss_at(pevfa);
        *entry = saved;
        const double fd = (up - down) / (2 * h);
        const double an = analytic.layers[k].weight.data()[i];
        const double denom = std::max({std::abs(fd), std::abs(an), 1e-3});
        CHECK(std::abs(fd - an) / denom < 1e-5);
      }
    }
  };
  check_block(pevfa.column_encoder, lg.encoder_grads);
  check_block(pevfa.heads[0], lg.head_grads[0]);
  check_block(pevfa.heads[1], lg.head_grads[1]);
}

TEST_CASE("twin heads diverge after one update on random data") {
  Rng rng(7);
  PeVFAParams pevfa = make_pevfa(3, 2, 4, 6, {8}, 2, rng);
  const PeVFAParams target = pevfa;
  const SharedRepresentation z = make_shared_representation(3, {5, 4}, rng);
  Population pop = make_population(3, 4, 2, rng);
  const ActionSpec spec = ActionSpec::symmetric(2, 1.0);

  Batch batch;
  const int b = 16;
  batch.states = Eigen::MatrixXd::Random(3, b);
  batch.actions = Eigen::MatrixXd::Random(2, b);
  batch.rewards = Eigen::VectorXd::Random(b);
  batch.next_states = Eigen::MatrixXd::Random(3, b);
  batch.terminal = Eigen::VectorXd::Zero(b);

  PevfaAdam adam = PevfaAdam::init(pevfa, AdamHyper{1e-3}, AdamHyper{1e-3});
  UpdateConfig cfg;
  pevfa_td_update(pevfa, adam, target, pop, z, spec, batch, cfg, rng);
  CHECK(checksum(pevfa.heads[0]) != checksum(pevfa.heads[1]));
}

TEST_CASE("value functions reject shape mismatches") {
  Rng rng(8);
  CriticParams critic = make_critic(3, 2, {6}, 2, rng);
  CHECK_THROWS_AS(
      critic_eval(critic, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2), QMode::Min),
      std::invalid_argument);
  PeVFAParams pevfa = make_pevfa(3, 2, 4, 6, {8}, 2, rng);
  PolicyRepresentation bad = make_policy_representation(7, 2, rng);
  CHECK_THROWS_AS(pevfa_encode(pevfa, bad), std::invalid_argument);
}
