#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "erl2/environments.hpp"
#include "erl2/evolution.hpp"
#include "erl2/mlp.hpp"
#include "erl2/policy.hpp"
#include "erl2/value_functions.hpp"

namespace erl2 {

enum class RlMode { Td3, Ddpg };

struct UpdateConfig {
  double gamma = 0.99;
  double tau = 0.005;
  int batch_size = 64;
  int k_policies = 1;  // policies drawn per shared-representation update
  RlMode mode = RlMode::Td3;
  double target_noise_sigma = 0.2;  // scaled by action half-range
  double target_noise_clip = 0.4;
  int policy_delay = 2;
  bool per_transition_policy_sample = false;
  bool normalize_pevfa_terms = false;
};

struct RlAgent {
  PolicyRepresentation w;
  PolicyRepresentation w_target;
  double explore_sigma = 0.1;
};

struct CriticAdam {
  std::vector<AdamState> heads;
  static CriticAdam init(const CriticParams& critic, AdamHyper hyper);
};

struct PevfaAdam {
  AdamState encoder;
  std::vector<AdamState> heads;
  static PevfaAdam init(const PeVFAParams& pevfa, AdamHyper encoder_hyper, AdamHyper head_hyper);
};

// ---- Pure loss/gradient kernels (used by the updates and by the
// finite-difference test suite). None of them mutate their inputs.

struct CriticLossGrads {
  std::vector<MlpParams> head_grads;
  double loss = 0.0;
};

// Clipped double-Q TD loss. Targets use the target shared representation
// and target policy representation; td3 mode adds clipped smoothing noise
// to the target action. No gradient flows into the encoder or any policy.
CriticLossGrads critic_td_loss(const CriticParams& critic, const CriticParams& critic_target,
                               const PolicyRepresentation& w_rl_target,
                               const SharedRepresentation& z_target, const ActionSpec& spec,
                               const Batch& batch, const UpdateConfig& cfg, Rng& rng);

struct PevfaLossGrads {
  MlpParams encoder_grads;
  std::vector<MlpParams> head_grads;
  double loss = 0.0;
};

// One-step TD loss for the policy-extended value function against a
// single policy representation.
PevfaLossGrads pevfa_td_loss(const PeVFAParams& pevfa, const PeVFAParams& pevfa_target,
                             const PolicyRepresentation& w, const SharedRepresentation& z_target,
                             const ActionSpec& spec, const Batch& batch, const UpdateConfig& cfg);

struct ActorLossGrads {
  Eigen::MatrixXd w_grads;  // (d+1) x |A|
  double loss = 0.0;
};

// -mean Q_1(s, pi_rl(s)); the gradient reaches only the policy
// representation, the encoder is treated as a constant here.
ActorLossGrads actor_loss(const PolicyRepresentation& w_rl, const CriticParams& critic,
                          const SharedRepresentation& z, const ActionSpec& spec,
                          const Eigen::MatrixXd& states);

struct SharedRepLossGrads {
  MlpParams encoder_grads;
  double loss = 0.0;
};

// -mean[ Q(s, pi_rl(s)) + sum_j QQ(s, pi_j(s), W_j) ]; the gradient
// reaches only the encoder. Either value-function term may be absent.
SharedRepLossGrads shared_rep_loss(const SharedRepresentation& z, const CriticParams* critic,
                                   const PolicyRepresentation* w_rl, const PeVFAParams* pevfa,
                                   const std::vector<const PolicyRepresentation*>& sampled,
                                   const ActionSpec& spec, const Eigen::MatrixXd& states,
                                   const UpdateConfig& cfg);

// ---- Update steps (loss kernel + one Adam step).

double critic_td_update(CriticParams& critic, CriticAdam& adam, const CriticParams& critic_target,
                        const PolicyRepresentation& w_rl_target,
                        const SharedRepresentation& z_target, const ActionSpec& spec,
                        const Batch& batch, const UpdateConfig& cfg, Rng& rng);

// Samples one population member per minibatch (or one per transition when
// cfg.per_transition_policy_sample is set).
double pevfa_td_update(PeVFAParams& pevfa, PevfaAdam& adam, const PeVFAParams& pevfa_target,
                       const Population& pop, const SharedRepresentation& z_target,
                       const ActionSpec& spec, const Batch& batch, const UpdateConfig& cfg,
                       Rng& rng);

double actor_update(PolicyRepresentation& w_rl, MatrixAdamState& adam, const CriticParams& critic,
                    const SharedRepresentation& z, const ActionSpec& spec,
                    const Eigen::MatrixXd& states);

// Samples K population members without replacement.
double shared_rep_update(SharedRepresentation& z, AdamState& adam, const CriticParams* critic,
                         const PolicyRepresentation* w_rl, const PeVFAParams* pevfa,
                         const Population* pop, const ActionSpec& spec,
                         const Eigen::MatrixXd& states, const UpdateConfig& cfg, Rng& rng);

// Copies w_rl over the lowest-fitness non-elite member (unevaluated
// members count as lowest). Returns the replaced index, or -1.
int rl_inject(Population& pop, const PolicyRepresentation& w_rl, const std::vector<int>& elites);

}  // namespace erl2
