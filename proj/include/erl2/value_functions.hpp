#pragma once

#include <Eigen/Core>
#include <vector>

#include "erl2/mlp.hpp"
#include "erl2/policy.hpp"
#include "erl2/rng.hpp"

namespace erl2 {

enum class QMode { Min, Q1, Q2 };

// Twin state-action value heads for the RL agent. One head in ddpg mode,
// two in td3 mode; both take the raw state, never encoded features.
struct CriticParams {
  std::vector<MlpParams> heads;  // each maps concat(s, a) -> scalar

  int head_count() const { return static_cast<int>(heads.size()); }
  int input_width() const { return heads.front().in_width(); }
};

CriticParams make_critic(int state_width, int action_dim, const std::vector<int>& hidden_widths,
                         int head_count, Rng& rng);

double critic_eval(const CriticParams& critic, const Eigen::VectorXd& state,
                   const Eigen::VectorXd& action, QMode mode);
// Batched evaluation, one value per column.
Eigen::VectorXd critic_eval_batch(const CriticParams& critic, const Eigen::MatrixXd& states,
                                  const Eigen::MatrixXd& actions, QMode mode);

// Policy-extended value function: value heads over concat(s, a, e) where
// e embeds the policy representation. Each (d+1)-length column of W is
// encoded independently and the embedding is the mean over action
// dimensions, so it is invariant to column permutation.
struct PeVFAParams {
  MlpParams column_encoder;      // (d+1) -> embed, 3 layers
  std::vector<MlpParams> heads;  // concat(s, a, embed) -> scalar

  int embed_dim() const { return column_encoder.out_width(); }
  int head_count() const { return static_cast<int>(heads.size()); }
};

PeVFAParams make_pevfa(int state_width, int action_dim, int feature_dim, int embed_dim,
                       const std::vector<int>& hidden_widths, int head_count, Rng& rng);

// Row-wise mean that accumulates each row's entries in value order, so the
// result is bitwise independent of column order.
Eigen::VectorXd order_free_row_mean(const Eigen::MatrixXd& m);

Eigen::VectorXd pevfa_encode(const PeVFAParams& pevfa, const PolicyRepresentation& w);

double pevfa_eval(const PeVFAParams& pevfa, const Eigen::VectorXd& state,
                  const Eigen::VectorXd& action, const PolicyRepresentation& w, QMode mode);
Eigen::VectorXd pevfa_eval_batch(const PeVFAParams& pevfa, const Eigen::MatrixXd& states,
                                 const Eigen::MatrixXd& actions, const PolicyRepresentation& w,
                                 QMode mode);

// Abstract per-policy value estimate, the bootstrap source for surrogate
// fitness. Tests substitute exact solvers through this interface.
class PolicyValueFn {
 public:
  virtual ~PolicyValueFn() = default;
  virtual double value(const Eigen::VectorXd& state, const Eigen::VectorXd& action,
                       const PolicyRepresentation& w) const = 0;
};

class PevfaValueFn final : public PolicyValueFn {
 public:
  PevfaValueFn(const PeVFAParams& pevfa, QMode mode) : pevfa_(&pevfa), mode_(mode) {}
  double value(const Eigen::VectorXd& state, const Eigen::VectorXd& action,
               const PolicyRepresentation& w) const override {
    return pevfa_eval(*pevfa_, state, action, w, mode_);
  }

 private:
  const PeVFAParams* pevfa_;
  QMode mode_;
};

}  // namespace erl2
