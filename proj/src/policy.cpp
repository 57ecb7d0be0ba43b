#include "erl2/policy.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace erl2 {

void ActionSpec::validate() const {
  if (low.size() == 0 || low.size() != high.size()) {
    throw std::invalid_argument("ActionSpec: bounds size mismatch");
  }
  for (Eigen::Index i = 0; i < low.size(); ++i) {
    if (!(low(i) < high(i))) {
      std::ostringstream os;
      os << "ActionSpec: low >= high on dimension " << i;
      throw std::invalid_argument(os.str());
    }
  }
}

Eigen::VectorXd ActionSpec::clamp(const Eigen::VectorXd& a) const {
  return a.cwiseMax(low).cwiseMin(high);
}

ActionSpec ActionSpec::symmetric(int dim, double bound) {
  ActionSpec spec;
  spec.low = Eigen::VectorXd::Constant(dim, -bound);
  spec.high = Eigen::VectorXd::Constant(dim, bound);
  return spec;
}

void SharedRepresentation::validate() const {
  encoder.check_consistent();
  if (encoder.layers.back().activation != Activation::Tanh) {
    throw std::invalid_argument("SharedRepresentation: final activation must be tanh");
  }
}

SharedRepresentation make_shared_representation(int state_width,
                                                const std::vector<int>& hidden_widths, Rng& rng) {
  if (hidden_widths.empty()) {
    throw std::invalid_argument("make_shared_representation: need at least one hidden layer");
  }
  std::vector<Activation> acts(hidden_widths.size(), Activation::Tanh);
  SharedRepresentation z;
  z.encoder = make_mlp(state_width, hidden_widths, acts, rng);
  return z;
}

double policy_init_bound(int feature_dim) {
  return 1.0 / std::sqrt(static_cast<double>(feature_dim) + 1.0);
}

PolicyRepresentation make_policy_representation(int feature_dim, int action_dim, Rng& rng) {
  PolicyRepresentation w;
  const double bound = policy_init_bound(feature_dim);
  w.mat.resize(feature_dim + 1, action_dim);
  for (Eigen::Index i = 0; i < w.mat.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.mat.cols(); ++j) w.mat(i, j) = rng.uniform(-bound, bound);
  }
  return w;
}

FeatureBatch encode_states(const SharedRepresentation& z, const Eigen::MatrixXd& states) {
  return FeatureBatch{mlp_forward(z.encoder, states)};
}

Eigen::VectorXd encode_state(const SharedRepresentation& z, const Eigen::VectorXd& state) {
  return mlp_forward(z.encoder, state).col(0);
}

Eigen::MatrixXd presquash(const FeatureBatch& z, const PolicyRepresentation& w) {
  const Eigen::Index d = z.values.rows();
  if (d + 1 != w.mat.rows()) {
    throw std::invalid_argument("presquash: feature width does not match policy representation");
  }
  // u = W[1:d]^T z + bias row, evaluated per sample column.
  Eigen::MatrixXd u(w.mat.cols(), z.values.cols());
  for (Eigen::Index c = 0; c < z.values.cols(); ++c) {
    u.col(c).noalias() = w.mat.topRows(d).transpose() * z.values.col(c);
    u.col(c) += w.mat.row(d).transpose();
  }
  return u;
}

Eigen::MatrixXd squash(const Eigen::MatrixXd& u, const ActionSpec& spec) {
  if (u.rows() != spec.dim()) {
    throw std::invalid_argument("squash: action width mismatch");
  }
  Eigen::MatrixXd a(u.rows(), u.cols());
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const double lo = spec.low(i);
    const double half = 0.5 * (spec.high(i) - spec.low(i));
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
      a(i, c) = lo + (std::tanh(u(i, c)) + 1.0) * half;
    }
  }
  return a;
}

Eigen::VectorXd act(const Eigen::VectorXd& features, const PolicyRepresentation& w,
                    const ActionSpec& spec) {
  FeatureBatch z{features};
  return act_batch(z, w, spec).col(0);
}

Eigen::MatrixXd act_batch(const FeatureBatch& z, const PolicyRepresentation& w,
                          const ActionSpec& spec) {
  if (w.action_dim() != spec.dim()) {
    throw std::invalid_argument("act: policy representation width does not match action spec");
  }
  return squash(presquash(z, w), spec);
}

Eigen::VectorXd policy_forward(const SharedRepresentation& z, const PolicyRepresentation& w,
                               const ActionSpec& spec, const Eigen::VectorXd& state) {
  return act(encode_state(z, state), w, spec);
}

Eigen::MatrixXd policy_forward_batch(const SharedRepresentation& z, const PolicyRepresentation& w,
                                     const ActionSpec& spec, const Eigen::MatrixXd& states) {
  return act_batch(encode_states(z, states), w, spec);
}

namespace {

// dL/du from dL/da: da_i/du_i = (1 - tanh(u_i)^2) * (high_i - low_i)/2.
Eigen::MatrixXd grad_presquash(const Eigen::MatrixXd& u, const ActionSpec& spec,
                               const Eigen::MatrixXd& grad_action) {
  if (grad_action.rows() != u.rows() || grad_action.cols() != u.cols()) {
    throw std::invalid_argument("act_backward: grad_action shape mismatch");
  }
  Eigen::MatrixXd g(u.rows(), u.cols());
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const double half = 0.5 * (spec.high(i) - spec.low(i));
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
      const double t = std::tanh(u(i, c));
      g(i, c) = grad_action(i, c) * (1.0 - t * t) * half;
    }
  }
  return g;
}

}  // namespace

Eigen::MatrixXd act_backward_policy(const FeatureBatch& z, const Eigen::MatrixXd& u,
                                    const ActionSpec& spec, const Eigen::MatrixXd& grad_action) {
  const Eigen::MatrixXd gu = grad_presquash(u, spec, grad_action);
  Eigen::MatrixXd grad_w(z.values.rows() + 1, gu.rows());
  grad_w.topRows(z.values.rows()).noalias() = z.values * gu.transpose();
  grad_w.row(z.values.rows()) = gu.rowwise().sum().transpose();
  return grad_w;
}

Eigen::MatrixXd act_backward_features(const PolicyRepresentation& w, const Eigen::MatrixXd& u,
                                      const ActionSpec& spec, const Eigen::MatrixXd& grad_action) {
  const Eigen::MatrixXd gu = grad_presquash(u, spec, grad_action);
  const Eigen::Index d = w.mat.rows() - 1;
  Eigen::MatrixXd grad_z(d, gu.cols());
  grad_z.noalias() = w.mat.topRows(d) * gu;
  return grad_z;
}

}  // namespace erl2
