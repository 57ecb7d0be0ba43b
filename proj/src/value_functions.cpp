#include "erl2/value_functions.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace erl2 {
namespace {

std::vector<Activation> hidden_then_identity(std::size_t hidden_count) {
  std::vector<Activation> acts(hidden_count, Activation::LeakyRelu);
  acts.push_back(Activation::Identity);
  return acts;
}

Eigen::MatrixXd stack_sa(const Eigen::MatrixXd& states, const Eigen::MatrixXd& actions) {
  if (states.cols() != actions.cols()) {
    throw std::invalid_argument("value function: state/action batch size mismatch");
  }
  Eigen::MatrixXd x(states.rows() + actions.rows(), states.cols());
  x.topRows(states.rows()) = states;
  x.bottomRows(actions.rows()) = actions;
  return x;
}

Eigen::VectorXd heads_eval(const std::vector<MlpParams>& heads, const Eigen::MatrixXd& input,
                           QMode mode) {
  if (heads.empty()) throw std::invalid_argument("value function: no heads");
  if (mode == QMode::Q2 && heads.size() < 2) {
    throw std::invalid_argument("value function: q2 requested from a single-head configuration");
  }
  if (mode == QMode::Q1 || heads.size() == 1) {
    return mlp_forward(heads[0], input).row(0).transpose();
  }
  if (mode == QMode::Q2) {
    return mlp_forward(heads[1], input).row(0).transpose();
  }
  Eigen::VectorXd q = mlp_forward(heads[0], input).row(0).transpose();
  for (std::size_t h = 1; h < heads.size(); ++h) {
    q = q.cwiseMin(mlp_forward(heads[h], input).row(0).transpose());
  }
  return q;
}

}  // namespace

CriticParams make_critic(int state_width, int action_dim, const std::vector<int>& hidden_widths,
                         int head_count, Rng& rng) {
  if (head_count < 1 || head_count > 2) {
    throw std::invalid_argument("make_critic: head count must be 1 or 2");
  }
  std::vector<int> widths = hidden_widths;
  widths.push_back(1);
  CriticParams critic;
  for (int h = 0; h < head_count; ++h) {
    critic.heads.push_back(
        make_mlp(state_width + action_dim, widths, hidden_then_identity(hidden_widths.size()), rng));
  }
  return critic;
}

double critic_eval(const CriticParams& critic, const Eigen::VectorXd& state,
                   const Eigen::VectorXd& action, QMode mode) {
  return critic_eval_batch(critic, state, action, mode)(0);
}

Eigen::VectorXd critic_eval_batch(const CriticParams& critic, const Eigen::MatrixXd& states,
                                  const Eigen::MatrixXd& actions, QMode mode) {
  return heads_eval(critic.heads, stack_sa(states, actions), mode);
}

PeVFAParams make_pevfa(int state_width, int action_dim, int feature_dim, int embed_dim,
                       const std::vector<int>& hidden_widths, int head_count, Rng& rng) {
  if (head_count < 1 || head_count > 2) {
    throw std::invalid_argument("make_pevfa: head count must be 1 or 2");
  }
  PeVFAParams pevfa;
  // Column encoder: 3 fully connected layers, leaky_relu throughout.
  std::vector<int> enc_widths{embed_dim, embed_dim, embed_dim};
  std::vector<Activation> enc_acts(3, Activation::LeakyRelu);
  pevfa.column_encoder = make_mlp(feature_dim + 1, enc_widths, enc_acts, rng);

  std::vector<int> widths = hidden_widths;
  widths.push_back(1);
  for (int h = 0; h < head_count; ++h) {
    pevfa.heads.push_back(make_mlp(state_width + action_dim + embed_dim, widths,
                                   hidden_then_identity(hidden_widths.size()), rng));
  }
  return pevfa;
}

Eigen::VectorXd order_free_row_mean(const Eigen::MatrixXd& m) {
  Eigen::VectorXd out(m.rows());
  std::vector<double> row(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    std::sort(row.begin(), row.end());
    double acc = 0.0;
    for (double v : row) acc += v;
    out(i) = acc / static_cast<double>(m.cols());
  }
  return out;
}

Eigen::VectorXd pevfa_encode(const PeVFAParams& pevfa, const PolicyRepresentation& w) {
  if (w.mat.rows() != pevfa.column_encoder.in_width()) {
    throw std::invalid_argument("pevfa_encode: policy representation height mismatch");
  }
  // Columns of W form the batch; mean-pool over action dimensions.
  const Eigen::MatrixXd embeddings = mlp_forward(pevfa.column_encoder, w.mat);
  return order_free_row_mean(embeddings);
}

double pevfa_eval(const PeVFAParams& pevfa, const Eigen::VectorXd& state,
                  const Eigen::VectorXd& action, const PolicyRepresentation& w, QMode mode) {
  return pevfa_eval_batch(pevfa, state, action, w, mode)(0);
}

Eigen::VectorXd pevfa_eval_batch(const PeVFAParams& pevfa, const Eigen::MatrixXd& states,
                                 const Eigen::MatrixXd& actions, const PolicyRepresentation& w,
                                 QMode mode) {
  const Eigen::VectorXd e = pevfa_encode(pevfa, w);
  Eigen::MatrixXd x(states.rows() + actions.rows() + e.size(), states.cols());
  x.topRows(states.rows()) = states;
  x.middleRows(states.rows(), actions.rows()) = actions;
  x.bottomRows(e.size()).colwise() = e;
  return heads_eval(pevfa.heads, x, mode);
}

}  // namespace erl2
