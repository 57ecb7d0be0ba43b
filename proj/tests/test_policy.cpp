#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "erl2/policy.hpp"
#include "erl2/serialize.hpp"

using namespace erl2;

namespace {

SharedRepresentation zero_encoder(int state_width, int d) {
  SharedRepresentation z;
  Layer l1, l2;
  l1.weight = Eigen::MatrixXd::Zero(d, state_width);
  l1.bias = Eigen::VectorXd::Zero(d);
  l1.activation = Activation::Tanh;
  l2.weight = Eigen::MatrixXd::Zero(d, d);
  l2.bias = Eigen::VectorXd::Zero(d);
  l2.activation = Activation::Tanh;
  z.encoder.layers = {l1, l2};
  return z;
}

Eigen::MatrixXd random_states(int width, int count, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd s(width, count);
  for (int i = 0; i < s.size(); ++i) s.data()[i] = rng.uniform(-1.5, 1.5);
  return s;
}

}  // namespace

TEST_CASE("encode_state of a zero encoder is the zero feature vector") {
  const SharedRepresentation z = zero_encoder(4, 6);
  Eigen::VectorXd s(4);
  s << 1.0, -0.5, 2.0, 0.25;
  CHECK(encode_state(z, s).isZero(0.0));
}

TEST_CASE("encode_state is deterministic and bounded") {
  Rng rng(5);
  const SharedRepresentation z = make_shared_representation(4, {8, 5}, rng);
  const Eigen::VectorXd s = random_states(4, 1, 9).col(0);
  const Eigen::VectorXd z1 = encode_state(z, s);
  const Eigen::VectorXd z2 = encode_state(z, s);
  CHECK(z1 == z2);
  CHECK((z1.array().abs() <= 1.0).all());
  CHECK(z1.size() == 5);
}

TEST_CASE("encode_state matches a hand composition of tanh layers") {
  Rng rng(6);
  const SharedRepresentation z = make_shared_representation(3, {4, 4}, rng);
  const Eigen::VectorXd s = random_states(3, 1, 10).col(0);
  Eigen::VectorXd h = (z.encoder.layers[0].weight * s + z.encoder.layers[0].bias)
                          .unaryExpr([](double v) { return std::tanh(v); });
  Eigen::VectorXd expect = (z.encoder.layers[1].weight * h + z.encoder.layers[1].bias)
                               .unaryExpr([](double v) { return std::tanh(v); });
  CHECK(encode_state(z, s).isApprox(expect, 1e-12));
}

TEST_CASE("act: zero representation emits the midpoint of the bounds") {
  ActionSpec spec;
  spec.low = Eigen::VectorXd(2);
  spec.high = Eigen::VectorXd(2);
  spec.low << -1.0, 2.0;
  spec.high << 3.0, 6.0;
  PolicyRepresentation w{Eigen::MatrixXd::Zero(5, 2)};
  Eigen::VectorXd z = Eigen::VectorXd::Constant(4, 0.7);
  const Eigen::VectorXd a = act(z, w, spec);
  CHECK(a(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(a(1) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("act: a saturated bias drives the action to the upper bound") {
  const ActionSpec spec = ActionSpec::symmetric(2, 1.0);
  PolicyRepresentation w{Eigen::MatrixXd::Zero(4, 2)};
  w.mat(3, 1) = 100.0;  // bias row
  const Eigen::VectorXd a = act(Eigen::VectorXd::Zero(3), w, spec);
  CHECK(a(0) == 0.0);
  CHECK(std::abs(a(1) - 1.0) < 1e-8);
}

TEST_CASE("act matches a naive loop-based oracle") {
  const ActionSpec spec = ActionSpec::symmetric(3, 2.0);
  Rng rng(11);
  PolicyRepresentation w = make_policy_representation(6, 3, rng);
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::VectorXd z(6);
    for (int i = 0; i < 6; ++i) z(i) = rng.uniform(-1, 1);
    const Eigen::VectorXd got = act(z, w, spec);
    for (int j = 0; j < 3; ++j) {
      double u = w.mat(6, j);
      for (int i = 0; i < 6; ++i) u += z(i) * w.mat(i, j);
      const double want = spec.low(j) + (std::tanh(u) + 1.0) / 2.0 * (spec.high(j) - spec.low(j));
      CHECK(std::abs(got(j) - want) < 1e-12);
    }
  }
}

TEST_CASE("policy_forward equals act composed with encode_state") {
  Rng rng(13);
  const SharedRepresentation z = make_shared_representation(4, {6, 5}, rng);
  PolicyRepresentation w = make_policy_representation(5, 2, rng);
  const ActionSpec spec = ActionSpec::symmetric(2, 1.0);
  const Eigen::MatrixXd states = random_states(4, 10, 17);
  for (int c = 0; c < states.cols(); ++c) {
    const Eigen::VectorXd direct = policy_forward(z, w, spec, states.col(c));
    const Eigen::VectorXd composed = act(encode_state(z, states.col(c)), w, spec);
    CHECK(direct == composed);
  }
}

TEST_CASE("agents sharing Z and W produce identical actions") {
  Rng rng(19);
  const SharedRepresentation z = make_shared_representation(3, {5, 4}, rng);
  PolicyRepresentation w = make_policy_representation(4, 2, rng);
  PolicyRepresentation w_copy = w;
  const ActionSpec spec = ActionSpec::symmetric(2, 1.0);
  const Eigen::MatrixXd states = random_states(3, 32, 23);
  CHECK(policy_forward_batch(z, w, spec, states) == policy_forward_batch(z, w_copy, spec, states));
}

TEST_CASE("per-dimension locality: editing one column leaves the others intact") {
  Rng rng(29);
  const SharedRepresentation z = make_shared_representation(4, {8, 6}, rng);
  const ActionSpec spec = ActionSpec::symmetric(3, 1.0);
  PolicyRepresentation w = make_policy_representation(6, 3, rng);
  const Eigen::MatrixXd states = random_states(4, 256, 31);
  const Eigen::MatrixXd base = policy_forward_batch(z, w, spec, states);

  for (int j = 0; j < 3; ++j) {
    PolicyRepresentation edited = w;
    for (int i = 0; i < edited.mat.rows(); ++i) edited.mat(i, j) += rng.uniform(-0.5, 0.5);
    const Eigen::MatrixXd out = policy_forward_batch(z, edited, spec, states);
    for (int dim = 0; dim < 3; ++dim) {
      if (dim == j) continue;
      CHECK(out.row(dim) == base.row(dim));  // machine equality
    }
  }
}

TEST_CASE("actions always respect the bounds") {
  Rng rng(37);
  const SharedRepresentation z = make_shared_representation(4, {6, 5}, rng);
  ActionSpec spec;
  spec.low = Eigen::VectorXd(2);
  spec.high = Eigen::VectorXd(2);
  spec.low << -0.25, 1.0;
  spec.high << 0.5, 9.0;
  for (int trial = 0; trial < 50; ++trial) {
    PolicyRepresentation w = make_policy_representation(5, 2, rng);
    w.mat *= rng.uniform(0.0, 40.0);  // include near-saturated policies
    const Eigen::MatrixXd a = policy_forward_batch(z, w, spec, random_states(4, 16, rng.next_u64()));
    for (int i = 0; i < a.rows(); ++i) {
      CHECK((a.row(i).array() >= spec.low(i)).all());
      CHECK((a.row(i).array() <= spec.high(i)).all());
    }
  }
}

TEST_CASE("serialized (Z, W) reproduces actions bitwise") {
  Rng rng(41);
  const SharedRepresentation z = make_shared_representation(4, {7, 4}, rng);
  PolicyRepresentation w = make_policy_representation(4, 2, rng);
  const ActionSpec spec = ActionSpec::symmetric(2, 1.0);

  std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
  write_mlp(ss, z.encoder);
  write_matrix(ss, w.mat);
  ss.seekg(0);
  SharedRepresentation z2;
  z2.encoder = read_mlp(ss);
  PolicyRepresentation w2{read_matrix(ss)};

  const Eigen::MatrixXd states = random_states(4, 64, 43);
  CHECK(policy_forward_batch(z, w, spec, states) == policy_forward_batch(z2, w2, spec, states));
}

TEST_CASE("act_backward gradients match finite differences") {
  Rng rng(47);
  const ActionSpec spec = ActionSpec::symmetric(2, 1.5);
  PolicyRepresentation w = make_policy_representation(5, 2, rng);
  Eigen::MatrixXd zvals(5, 3);
  for (int i = 0; i < zvals.size(); ++i) zvals.data()[i] = rng.uniform(-1, 1);
  Eigen::MatrixXd g(2, 3);
  for (int i = 0; i < g.size(); ++i) g.data()[i] = rng.uniform(-1, 1);

  const FeatureBatch features{zvals};
  const Eigen::MatrixXd u = presquash(features, w);
  const Eigen::MatrixXd grad_w = act_backward_policy(features, u, spec, g);
  const Eigen::MatrixXd grad_z = act_backward_features(w, u, spec, g);

  const double h = 1e-6;
  auto loss_with_w = [&](const PolicyRepresentation& wp) {
    return (g.array() * act_batch(features, wp, spec).array()).sum();
  };
  for (int i = 0; i < w.mat.size(); ++i) {
    PolicyRepresentation wp = w;
    wp.mat.data()[i] += h;
    const double up = loss_with_w(wp);
    wp.mat.data()[i] -= 2 * h;
    const double down = loss_with_w(wp);
    const double fd = (up - down) / (2 * h);
    CHECK(std::abs(fd - grad_w.data()[i]) < 1e-6 * std::max(1.0, std::abs(fd)));
  }
  for (int i = 0; i < zvals.size(); ++i) {
    Eigen::MatrixXd zp = zvals;
    zp.data()[i] += h;
    const double up = (g.array() * act_batch(FeatureBatch{zp}, w, spec).array()).sum();
    zp.data()[i] -= 2 * h;
    const double down = (g.array() * act_batch(FeatureBatch{zp}, w, spec).array()).sum();
    const double fd = (up - down) / (2 * h);
    CHECK(std::abs(fd - grad_z.data()[i]) < 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("shape violations are rejected") {
  Rng rng(53);
  const SharedRepresentation z = make_shared_representation(4, {6, 5}, rng);
  PolicyRepresentation w = make_policy_representation(5, 2, rng);
  const ActionSpec spec = ActionSpec::symmetric(2, 1.0);
  CHECK_THROWS_AS(policy_forward(z, w, spec, Eigen::VectorXd::Zero(3)), std::invalid_argument);
  PolicyRepresentation bad = make_policy_representation(7, 2, rng);
  CHECK_THROWS_AS(act(Eigen::VectorXd::Zero(5), bad, spec), std::invalid_argument);
  ActionSpec bad_spec;
  bad_spec.low = Eigen::VectorXd::Constant(2, 1.0);
  bad_spec.high = Eigen::VectorXd::Constant(2, 1.0);
  CHECK_THROWS_AS(bad_spec.validate(), std::invalid_argument);
}
