#include "erl2/reinforcement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace erl2 {
namespace {

Eigen::MatrixXd concat_rows(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd x(a.rows() + b.rows(), a.cols());
  x.topRows(a.rows()) = a;
  x.bottomRows(b.rows()) = b;
  return x;
}

Eigen::MatrixXd concat_rows(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                            const Eigen::VectorXd& broadcast) {
  Eigen::MatrixXd x(a.rows() + b.rows() + broadcast.size(), a.cols());
  x.topRows(a.rows()) = a;
  x.middleRows(a.rows(), b.rows()) = b;
  x.bottomRows(broadcast.size()).colwise() = broadcast;
  return x;
}

Eigen::VectorXd min_over_heads(const std::vector<MlpParams>& heads, const Eigen::MatrixXd& input) {
  Eigen::VectorXd q = mlp_forward(heads[0], input).row(0).transpose();
  for (std::size_t h = 1; h < heads.size(); ++h) {
    q = q.cwiseMin(mlp_forward(heads[h], input).row(0).transpose());
  }
  return q;
}

void check_finite_loss(double loss, const char* what) {
  if (!std::isfinite(loss)) {
    throw std::runtime_error(std::string(what) + ": non-finite loss");
  }
}

}  // namespace

CriticAdam CriticAdam::init(const CriticParams& critic, AdamHyper hyper) {
  CriticAdam a;
  for (const auto& head : critic.heads) a.heads.push_back(AdamState::init(head, hyper));
  return a;
}

PevfaAdam PevfaAdam::init(const PeVFAParams& pevfa, AdamHyper encoder_hyper, AdamHyper head_hyper) {
  PevfaAdam a;
  a.encoder = AdamState::init(pevfa.column_encoder, encoder_hyper);
  for (const auto& head : pevfa.heads) a.heads.push_back(AdamState::init(head, head_hyper));
  return a;
}

CriticLossGrads critic_td_loss(const CriticParams& critic, const CriticParams& critic_target,
                               const PolicyRepresentation& w_rl_target,
                               const SharedRepresentation& z_target, const ActionSpec& spec,
                               const Batch& batch, const UpdateConfig& cfg, Rng& rng) {
  const Eigen::Index b = batch.size();

  // Target action from the target networks; smoothing noise in td3 mode.
  const FeatureBatch z_next = encode_states(z_target, batch.next_states);
  Eigen::MatrixXd next_actions = squash(presquash(z_next, w_rl_target), spec);
  if (cfg.mode == RlMode::Td3) {
    const Eigen::VectorXd half = spec.half_range();
    for (Eigen::Index i = 0; i < next_actions.rows(); ++i) {
      const double clip = cfg.target_noise_clip * half(i);
      for (Eigen::Index c = 0; c < b; ++c) {
        const double noise =
            std::clamp(rng.normal(0.0, cfg.target_noise_sigma * half(i)), -clip, clip);
        next_actions(i, c) =
            std::clamp(next_actions(i, c) + noise, spec.low(i), spec.high(i));
      }
    }
  }
  const Eigen::VectorXd q_next =
      min_over_heads(critic_target.heads, concat_rows(batch.next_states, next_actions));
  const Eigen::VectorXd y =
      batch.rewards.array() +
      cfg.gamma * (1.0 - batch.terminal.array()) * q_next.array();

  const Eigen::MatrixXd x = concat_rows(batch.states, batch.actions);
  CriticLossGrads out;
  for (const auto& head : critic.heads) {
    ForwardCache cache;
    const Eigen::VectorXd q = mlp_forward(head, x, &cache).row(0).transpose();
    const Eigen::VectorXd resid = q - y;
    out.loss += resid.squaredNorm() / static_cast<double>(b);
    const Eigen::MatrixXd grad_out = (2.0 / static_cast<double>(b)) * resid.transpose();
    out.head_grads.push_back(mlp_backward(head, cache, grad_out).grads);
  }
  out.loss /= static_cast<double>(critic.heads.size());
  return out;
}

PevfaLossGrads pevfa_td_loss(const PeVFAParams& pevfa, const PeVFAParams& pevfa_target,
                             const PolicyRepresentation& w, const SharedRepresentation& z_target,
                             const ActionSpec& spec, const Batch& batch, const UpdateConfig& cfg) {
  const Eigen::Index b = batch.size();
  const int embed = pevfa.embed_dim();
  const int action_dims = w.action_dim();

  // Target value at the member's own next action (no smoothing noise).
  const FeatureBatch z_next = encode_states(z_target, batch.next_states);
  const Eigen::MatrixXd next_actions = squash(presquash(z_next, w), spec);
  const Eigen::VectorXd e_target = pevfa_encode(pevfa_target, w);
  const Eigen::VectorXd q_next = min_over_heads(
      pevfa_target.heads, concat_rows(batch.next_states, next_actions, e_target));
  const Eigen::VectorXd y =
      batch.rewards.array() + cfg.gamma * (1.0 - batch.terminal.array()) * q_next.array();

  // Current side; the policy embedding participates in the gradient.
  ForwardCache enc_cache;
  const Eigen::MatrixXd embeddings = mlp_forward(pevfa.column_encoder, w.mat, &enc_cache);
  const Eigen::VectorXd e = embeddings.rowwise().mean();
  const Eigen::MatrixXd x = concat_rows(batch.states, batch.actions, e);

  PevfaLossGrads out;
  Eigen::VectorXd grad_e = Eigen::VectorXd::Zero(embed);
  for (const auto& head : pevfa.heads) {
    ForwardCache cache;
    const Eigen::VectorXd q = mlp_forward(head, x, &cache).row(0).transpose();
    const Eigen::VectorXd resid = q - y;
    out.loss += resid.squaredNorm() / static_cast<double>(b);
    const Eigen::MatrixXd grad_out = (2.0 / static_cast<double>(b)) * resid.transpose();
    BackwardResult bw = mlp_backward(head, cache, grad_out);
    out.head_grads.push_back(std::move(bw.grads));
    grad_e += bw.grad_input.bottomRows(embed).rowwise().sum();
  }
  out.loss /= static_cast<double>(pevfa.heads.size());

  // e is the mean over action-dimension columns.
  Eigen::MatrixXd grad_embeddings(embed, action_dims);
  grad_embeddings.colwise() = Eigen::VectorXd(grad_e / static_cast<double>(action_dims));
  out.encoder_grads = mlp_backward(pevfa.column_encoder, enc_cache, grad_embeddings).grads;
  return out;
}

ActorLossGrads actor_loss(const PolicyRepresentation& w_rl, const CriticParams& critic,
                          const SharedRepresentation& z, const ActionSpec& spec,
                          const Eigen::MatrixXd& states) {
  const Eigen::Index b = states.cols();
  const FeatureBatch features = encode_states(z, states);
  const Eigen::MatrixXd u = presquash(features, w_rl);
  const Eigen::MatrixXd actions = squash(u, spec);

  ForwardCache cache;
  const Eigen::VectorXd q =
      mlp_forward(critic.heads[0], concat_rows(states, actions), &cache).row(0).transpose();

  ActorLossGrads out;
  out.loss = -q.mean();
  const Eigen::MatrixXd grad_out =
      Eigen::MatrixXd::Constant(1, b, -1.0 / static_cast<double>(b));
  const BackwardResult bw = mlp_backward(critic.heads[0], cache, grad_out);
  const Eigen::MatrixXd grad_actions = bw.grad_input.bottomRows(actions.rows());
  out.w_grads = act_backward_policy(features, u, spec, grad_actions);
  return out;
}

SharedRepLossGrads shared_rep_loss(const SharedRepresentation& z, const CriticParams* critic,
                                   const PolicyRepresentation* w_rl, const PeVFAParams* pevfa,
                                   const std::vector<const PolicyRepresentation*>& sampled,
                                   const ActionSpec& spec, const Eigen::MatrixXd& states,
                                   const UpdateConfig& cfg) {
  if ((critic == nullptr) != (w_rl == nullptr)) {
    throw std::invalid_argument("shared_rep_loss: critic term needs both critic and w_rl");
  }
  if (!sampled.empty() && pevfa == nullptr) {
    throw std::invalid_argument("shared_rep_loss: sampled policies need a pevfa");
  }
  const Eigen::Index b = states.cols();

  ForwardCache enc_cache;
  const FeatureBatch features{mlp_forward(z.encoder, states, &enc_cache)};
  Eigen::MatrixXd grad_features =
      Eigen::MatrixXd::Zero(features.values.rows(), features.values.cols());

  SharedRepLossGrads out;
  if (critic != nullptr) {
    const Eigen::MatrixXd u = presquash(features, *w_rl);
    const Eigen::MatrixXd actions = squash(u, spec);
    ForwardCache cache;
    const Eigen::VectorXd q =
        mlp_forward(critic->heads[0], concat_rows(states, actions), &cache).row(0).transpose();
    out.loss += -q.mean();
    const Eigen::MatrixXd grad_out =
        Eigen::MatrixXd::Constant(1, b, -1.0 / static_cast<double>(b));
    const BackwardResult bw = mlp_backward(critic->heads[0], cache, grad_out);
    grad_features += act_backward_features(*w_rl, u, spec, bw.grad_input.bottomRows(actions.rows()));
  }

  const double term_scale =
      (cfg.normalize_pevfa_terms && !sampled.empty()) ? 1.0 / static_cast<double>(sampled.size())
                                                      : 1.0;
  for (const PolicyRepresentation* wj : sampled) {
    const Eigen::VectorXd e = pevfa_encode(*pevfa, *wj);
    const Eigen::MatrixXd u = presquash(features, *wj);
    const Eigen::MatrixXd actions = squash(u, spec);
    ForwardCache cache;
    const Eigen::VectorXd q =
        mlp_forward(pevfa->heads[0], concat_rows(states, actions, e), &cache).row(0).transpose();
    out.loss += -q.mean() * term_scale;
    const Eigen::MatrixXd grad_out =
        Eigen::MatrixXd::Constant(1, b, -term_scale / static_cast<double>(b));
    const BackwardResult bw = mlp_backward(pevfa->heads[0], cache, grad_out);
    const Eigen::MatrixXd grad_actions =
        bw.grad_input.middleRows(states.rows(), actions.rows());
    grad_features += act_backward_features(*wj, u, spec, grad_actions);
  }

  out.encoder_grads = mlp_backward(z.encoder, enc_cache, grad_features).grads;
  return out;
}

double critic_td_update(CriticParams& critic, CriticAdam& adam, const CriticParams& critic_target,
                        const PolicyRepresentation& w_rl_target,
                        const SharedRepresentation& z_target, const ActionSpec& spec,
                        const Batch& batch, const UpdateConfig& cfg, Rng& rng) {
  CriticLossGrads lg =
      critic_td_loss(critic, critic_target, w_rl_target, z_target, spec, batch, cfg, rng);
  check_finite_loss(lg.loss, "critic_td_update");
  for (std::size_t h = 0; h < critic.heads.size(); ++h) {
    adam_step(adam.heads[h], critic.heads[h], lg.head_grads[h]);
  }
  return lg.loss;
}

double pevfa_td_update(PeVFAParams& pevfa, PevfaAdam& adam, const PeVFAParams& pevfa_target,
                       const Population& pop, const SharedRepresentation& z_target,
                       const ActionSpec& spec, const Batch& batch, const UpdateConfig& cfg,
                       Rng& rng) {
  if (pop.members.empty()) {
    throw std::invalid_argument("pevfa_td_update: empty population");
  }
  double loss = 0.0;
  if (!cfg.per_transition_policy_sample) {
    const PolicyRepresentation& w = pop.members[rng.uniform_int(pop.size())];
    PevfaLossGrads lg = pevfa_td_loss(pevfa, pevfa_target, w, z_target, spec, batch, cfg);
    check_finite_loss(lg.loss, "pevfa_td_update");
    adam_step(adam.encoder, pevfa.column_encoder, lg.encoder_grads);
    for (std::size_t h = 0; h < pevfa.heads.size(); ++h) {
      adam_step(adam.heads[h], pevfa.heads[h], lg.head_grads[h]);
    }
    return lg.loss;
  }

  // Per-transition sampling: group transitions by drawn member and
  // accumulate gradients weighted by group size.
  const Eigen::Index b = batch.size();
  std::vector<std::vector<int>> groups(pop.size());
  for (Eigen::Index i = 0; i < b; ++i) groups[rng.uniform_int(pop.size())].push_back(i);

  MlpParams enc_grads = zeros_like(pevfa.column_encoder);
  std::vector<MlpParams> head_grads;
  for (const auto& head : pevfa.heads) head_grads.push_back(zeros_like(head));

  for (int m = 0; m < pop.size(); ++m) {
    if (groups[m].empty()) continue;
    Batch sub;
    const int g = static_cast<int>(groups[m].size());
    sub.states.resize(batch.states.rows(), g);
    sub.actions.resize(batch.actions.rows(), g);
    sub.rewards.resize(g);
    sub.next_states.resize(batch.next_states.rows(), g);
    sub.terminal.resize(g);
    for (int i = 0; i < g; ++i) {
      const int src = groups[m][i];
      sub.states.col(i) = batch.states.col(src);
      sub.actions.col(i) = batch.actions.col(src);
      sub.rewards(i) = batch.rewards(src);
      sub.next_states.col(i) = batch.next_states.col(src);
      sub.terminal(i) = batch.terminal(src);
    }
    PevfaLossGrads lg =
        pevfa_td_loss(pevfa, pevfa_target, pop.members[m], z_target, spec, sub, cfg);
    const double weight = static_cast<double>(g) / static_cast<double>(b);
    loss += lg.loss * weight;
    for (std::size_t k = 0; k < enc_grads.layers.size(); ++k) {
      enc_grads.layers[k].weight += weight * lg.encoder_grads.layers[k].weight;
      enc_grads.layers[k].bias += weight * lg.encoder_grads.layers[k].bias;
    }
    for (std::size_t h = 0; h < pevfa.heads.size(); ++h) {
      for (std::size_t k = 0; k < head_grads[h].layers.size(); ++k) {
        head_grads[h].layers[k].weight += weight * lg.head_grads[h].layers[k].weight;
        head_grads[h].layers[k].bias += weight * lg.head_grads[h].layers[k].bias;
      }
    }
  }
  check_finite_loss(loss, "pevfa_td_update");
  adam_step(adam.encoder, pevfa.column_encoder, enc_grads);
  for (std::size_t h = 0; h < pevfa.heads.size(); ++h) {
    adam_step(adam.heads[h], pevfa.heads[h], head_grads[h]);
  }
  return loss;
}

double actor_update(PolicyRepresentation& w_rl, MatrixAdamState& adam, const CriticParams& critic,
                    const SharedRepresentation& z, const ActionSpec& spec,
                    const Eigen::MatrixXd& states) {
  ActorLossGrads lg = actor_loss(w_rl, critic, z, spec, states);
  check_finite_loss(lg.loss, "actor_update");
  adam_step(adam, w_rl.mat, lg.w_grads);
  return lg.loss;
}

double shared_rep_update(SharedRepresentation& z, AdamState& adam, const CriticParams* critic,
                         const PolicyRepresentation* w_rl, const PeVFAParams* pevfa,
                         const Population* pop, const ActionSpec& spec,
                         const Eigen::MatrixXd& states, const UpdateConfig& cfg, Rng& rng) {
  std::vector<const PolicyRepresentation*> sampled;
  if (pevfa != nullptr && pop != nullptr && cfg.k_policies > 0) {
    if (cfg.k_policies > pop->size()) {
      throw std::invalid_argument("shared_rep_update: K exceeds population size");
    }
    // Without replacement, resampled fresh each call.
    std::vector<int> idx(pop->size());
    std::iota(idx.begin(), idx.end(), 0);
    for (int k = 0; k < cfg.k_policies; ++k) {
      const int pick = k + rng.uniform_int(static_cast<int>(idx.size()) - k);
      std::swap(idx[k], idx[pick]);
      sampled.push_back(&pop->members[idx[k]]);
    }
  }
  SharedRepLossGrads lg = shared_rep_loss(z, critic, w_rl, pevfa, sampled, spec, states, cfg);
  check_finite_loss(lg.loss, "shared_rep_update");
  adam_step(adam, z.encoder, lg.encoder_grads);
  return lg.loss;
}

int rl_inject(Population& pop, const PolicyRepresentation& w_rl, const std::vector<int>& elites) {
  int worst = -1;
  for (int i = 0; i < pop.size(); ++i) {
    if (std::find(elites.begin(), elites.end(), i) != elites.end()) continue;
    if (worst < 0) {
      worst = i;
      continue;
    }
    const double fi = pop.fitness[i];
    const double fw = pop.fitness[worst];
    const bool i_worse = std::isnan(fi) ? !std::isnan(fw) : (!std::isnan(fw) && fi < fw);
    if (i_worse) worst = i;
  }
  if (worst >= 0) {
    pop.members[worst] = w_rl;  // value copy, independently mutable
    pop.fitness[worst] = std::numeric_limits<double>::quiet_NaN();
  }
  return worst;
}

}  // namespace erl2
