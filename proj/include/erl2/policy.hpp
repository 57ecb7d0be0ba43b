#pragma once

#include <Eigen/Core>

#include "erl2/mlp.hpp"
#include "erl2/rng.hpp"

namespace erl2 {

// Per-dimension action bounds. Policies squash with tanh and map affinely
// into [low, high].
struct ActionSpec {
  Eigen::VectorXd low;
  Eigen::VectorXd high;

  int dim() const { return static_cast<int>(low.size()); }
  void validate() const;
  Eigen::VectorXd half_range() const { return 0.5 * (high - low); }
  Eigen::VectorXd midpoint() const { return 0.5 * (high + low); }
  Eigen::VectorXd clamp(const Eigen::VectorXd& a) const;

  static ActionSpec symmetric(int dim, double bound);
};

// Nonlinear state encoder shared by every agent. The final activation is
// tanh, so features live in [-1, 1]^d.
struct SharedRepresentation {
  MlpParams encoder;

  int state_width() const { return encoder.in_width(); }
  int feature_dim() const { return encoder.out_width(); }
  void validate() const;  // checks the tanh output contract
};

SharedRepresentation make_shared_representation(int state_width,
                                                const std::vector<int>& hidden_widths, Rng& rng);

// Feature vectors get their own type so they cannot be fed where a raw
// state is required (the value functions take raw states only).
struct FeatureBatch {
  Eigen::MatrixXd values;  // d x batch
};

// One agent's linear policy: rows 1..d weigh features, row d+1 is the bias.
// Column j fully determines action dimension j.
struct PolicyRepresentation {
  Eigen::MatrixXd mat;  // (d+1) x |A|

  int feature_dim() const { return static_cast<int>(mat.rows()) - 1; }
  int action_dim() const { return static_cast<int>(mat.cols()); }
  bool all_finite() const { return mat.allFinite(); }
};

// Init bound used for fresh policy representations and mutation resets.
double policy_init_bound(int feature_dim);
PolicyRepresentation make_policy_representation(int feature_dim, int action_dim, Rng& rng);

FeatureBatch encode_states(const SharedRepresentation& z, const Eigen::MatrixXd& states);
Eigen::VectorXd encode_state(const SharedRepresentation& z, const Eigen::VectorXd& state);

// Pre-squash linear outputs u = W[1:d]^T z + W[d+1], one column per sample.
Eigen::MatrixXd presquash(const FeatureBatch& z, const PolicyRepresentation& w);

// a_i = low_i + (tanh(u_i) + 1)/2 * (high_i - low_i)
Eigen::MatrixXd squash(const Eigen::MatrixXd& presquash_u, const ActionSpec& spec);

Eigen::VectorXd act(const Eigen::VectorXd& features, const PolicyRepresentation& w,
                    const ActionSpec& spec);
Eigen::MatrixXd act_batch(const FeatureBatch& z, const PolicyRepresentation& w,
                          const ActionSpec& spec);

Eigen::VectorXd policy_forward(const SharedRepresentation& z, const PolicyRepresentation& w,
                               const ActionSpec& spec, const Eigen::VectorXd& state);
Eigen::MatrixXd policy_forward_batch(const SharedRepresentation& z, const PolicyRepresentation& w,
                                     const ActionSpec& spec, const Eigen::MatrixXd& states);

// Gradient helpers for the reinforcement losses. Both take dL/da and the
// cached pre-squash values of the same forward pass.
// Returns dL/dW, shape (d+1) x |A|.
Eigen::MatrixXd act_backward_policy(const FeatureBatch& z, const Eigen::MatrixXd& presquash_u,
                                    const ActionSpec& spec, const Eigen::MatrixXd& grad_action);
// Returns dL/dz, shape d x batch.
Eigen::MatrixXd act_backward_features(const PolicyRepresentation& w,
                                      const Eigen::MatrixXd& presquash_u, const ActionSpec& spec,
                                      const Eigen::MatrixXd& grad_action);

}  // namespace erl2
