#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "erl2/rng.hpp"

namespace erl2 {

enum class Activation : std::uint8_t { Identity = 0, Tanh = 1, LeakyRelu = 2 };

constexpr double kLeakyReluSlope = 0.01;

struct Layer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
  Activation activation = Activation::Identity;
};

// Dense feed-forward network parameters. Batches are stored with one
// sample per column, so a layer computes y = W x + b column by column.
struct MlpParams {
  std::vector<Layer> layers;

  int in_width() const;
  int out_width() const;
  std::size_t param_count() const;
  bool all_finite() const;

  // Validates that adjacent layer shapes compose; throws otherwise.
  void check_consistent() const;
};

// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)] for weights and biases.
MlpParams make_mlp(int in_width, const std::vector<int>& layer_widths,
                   const std::vector<Activation>& activations, Rng& rng);

// Same-shaped zero parameters (gradient / moment accumulators).
MlpParams zeros_like(const MlpParams& params);

struct ForwardCache {
  Eigen::MatrixXd input;               // in x batch
  std::vector<Eigen::MatrixXd> pre;    // per layer, out x batch
  std::vector<Eigen::MatrixXd> post;   // per layer, out x batch
};

// Forward pass over a batch (columns are samples). Each column is
// evaluated with an independent matrix-vector product, so batch results
// are bitwise identical to single-sample evaluation.
Eigen::MatrixXd mlp_forward(const MlpParams& params, const Eigen::MatrixXd& input,
                            ForwardCache* cache = nullptr);

struct BackwardResult {
  MlpParams grads;             // same shapes as the network
  Eigen::MatrixXd grad_input;  // in x batch
};

// Exact gradients of <grad_output, output> with respect to every
// parameter and the input. The cache must come from a matching
// mlp_forward call on the same parameters.
BackwardResult mlp_backward(const MlpParams& params, const ForwardCache& cache,
                            const Eigen::MatrixXd& grad_output);

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamHyper hyper;
  long long step = 0;
  MlpParams m;  // first moments, parameter-shaped
  MlpParams v;  // second moments

  static AdamState init(const MlpParams& params, AdamHyper hyper);
};

// One bias-corrected Adam step. Rejects non-finite gradients.
void adam_step(AdamState& state, MlpParams& params, const MlpParams& grads);

struct MatrixAdamState {
  AdamHyper hyper;
  long long step = 0;
  Eigen::MatrixXd m;
  Eigen::MatrixXd v;

  static MatrixAdamState init(const Eigen::MatrixXd& params, AdamHyper hyper);
};

void adam_step(MatrixAdamState& state, Eigen::MatrixXd& params, const Eigen::MatrixXd& grads);

// target <- tau * online + (1 - tau) * target, elementwise.
void soft_update(MlpParams& target, const MlpParams& online, double tau);
void soft_update(Eigen::MatrixXd& target, const Eigen::MatrixXd& online, double tau);

}  // namespace erl2
