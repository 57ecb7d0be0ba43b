#include "erl2/mlp.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace erl2 {
namespace {

double apply_activation(Activation act, double x) {
  switch (act) {
    case Activation::Identity:
      return x;
    case Activation::Tanh:
      return std::tanh(x);
    case Activation::LeakyRelu:
      return x >= 0.0 ? x : kLeakyReluSlope * x;
  }
  return x;
}

// Derivative in terms of (pre, post) so tanh can reuse the forward value.
double activation_deriv(Activation act, double pre, double post) {
  switch (act) {
    case Activation::Identity:
      return 1.0;
    case Activation::Tanh:
      return 1.0 - post * post;
    case Activation::LeakyRelu:
      return pre >= 0.0 ? 1.0 : kLeakyReluSlope;
  }
  return 1.0;
}

[[noreturn]] void shape_error(const std::string& where, long expected, long got) {
  std::ostringstream os;
  os << where << ": expected width " << expected << ", got " << got;
  throw std::invalid_argument(os.str());
}

}  // namespace

int MlpParams::in_width() const {
  if (layers.empty()) throw std::invalid_argument("MlpParams: no layers");
  return static_cast<int>(layers.front().weight.cols());
}

int MlpParams::out_width() const {
  if (layers.empty()) throw std::invalid_argument("MlpParams: no layers");
  return static_cast<int>(layers.back().weight.rows());
}

std::size_t MlpParams::param_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

bool MlpParams::all_finite() const {
  for (const auto& l : layers) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

void MlpParams::check_consistent() const {
  if (layers.empty()) throw std::invalid_argument("MlpParams: no layers");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& l = layers[k];
    if (l.bias.size() != l.weight.rows()) {
      std::ostringstream os;
      os << "MlpParams: layer " << k << " bias length " << l.bias.size()
         << " does not match weight rows " << l.weight.rows();
      throw std::invalid_argument(os.str());
    }
    if (k > 0 && layers[k - 1].weight.rows() != l.weight.cols()) {
      std::ostringstream os;
      os << "MlpParams: layer " << k << " in-width " << l.weight.cols()
         << " does not compose with previous out-width " << layers[k - 1].weight.rows();
      throw std::invalid_argument(os.str());
    }
  }
}

MlpParams make_mlp(int in_width, const std::vector<int>& layer_widths,
                   const std::vector<Activation>& activations, Rng& rng) {
  if (layer_widths.empty() || layer_widths.size() != activations.size()) {
    throw std::invalid_argument("make_mlp: widths/activations size mismatch");
  }
  MlpParams params;
  int fan_in = in_width;
  for (std::size_t k = 0; k < layer_widths.size(); ++k) {
    Layer layer;
    const int out = layer_widths[k];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    layer.weight.resize(out, fan_in);
    layer.bias.resize(out);
    for (int i = 0; i < out; ++i) {
      for (int j = 0; j < fan_in; ++j) layer.weight(i, j) = rng.uniform(-bound, bound);
    }
    for (int i = 0; i < out; ++i) layer.bias(i) = rng.uniform(-bound, bound);
    layer.activation = activations[k];
    params.layers.push_back(std::move(layer));
    fan_in = out;
  }
  return params;
}

MlpParams zeros_like(const MlpParams& params) {
  MlpParams z;
  z.layers.reserve(params.layers.size());
  for (const auto& l : params.layers) {
    Layer zl;
    zl.weight = Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols());
    zl.bias = Eigen::VectorXd::Zero(l.bias.size());
    zl.activation = l.activation;
    z.layers.push_back(std::move(zl));
  }
  return z;
}

Eigen::MatrixXd mlp_forward(const MlpParams& params, const Eigen::MatrixXd& input,
                            ForwardCache* cache) {
  params.check_consistent();
  if (input.rows() != params.in_width()) {
    shape_error("mlp_forward input", params.in_width(), input.rows());
  }
  const auto batch = input.cols();
  if (cache) {
    cache->input = input;
    cache->pre.clear();
    cache->post.clear();
    cache->pre.reserve(params.layers.size());
    cache->post.reserve(params.layers.size());
  }
  Eigen::MatrixXd x = input;
  for (const auto& layer : params.layers) {
    Eigen::MatrixXd pre(layer.weight.rows(), batch);
    // One matrix-vector product per sample keeps batch evaluation bitwise
    // identical to per-sample evaluation.
    for (Eigen::Index c = 0; c < batch; ++c) {
      pre.col(c).noalias() = layer.weight * x.col(c);
      pre.col(c) += layer.bias;
    }
    Eigen::MatrixXd post = pre.unaryExpr(
        [&layer](double v) { return apply_activation(layer.activation, v); });
    if (cache) {
      cache->pre.push_back(pre);
      cache->post.push_back(post);
    }
    x = std::move(post);
  }
  return x;
}

BackwardResult mlp_backward(const MlpParams& params, const ForwardCache& cache,
                            const Eigen::MatrixXd& grad_output) {
  const std::size_t n_layers = params.layers.size();
  if (cache.pre.size() != n_layers || cache.post.size() != n_layers) {
    throw std::invalid_argument("mlp_backward: cache does not match network depth");
  }
  if (grad_output.rows() != params.out_width() || grad_output.cols() != cache.input.cols()) {
    throw std::invalid_argument("mlp_backward: grad_output shape mismatch");
  }
  for (std::size_t k = 0; k < n_layers; ++k) {
    if (cache.pre[k].rows() != params.layers[k].weight.rows()) {
      throw std::invalid_argument("mlp_backward: cache produced by a different network");
    }
  }

  BackwardResult result;
  result.grads = zeros_like(params);

  Eigen::MatrixXd delta = grad_output;
  for (std::size_t k = n_layers; k-- > 0;) {
    const Layer& layer = params.layers[k];
    // delta currently holds dL/d(post_k); convert to dL/d(pre_k).
    Eigen::MatrixXd dpre(delta.rows(), delta.cols());
    for (Eigen::Index i = 0; i < dpre.rows(); ++i) {
      for (Eigen::Index c = 0; c < dpre.cols(); ++c) {
        dpre(i, c) = delta(i, c) *
                     activation_deriv(layer.activation, cache.pre[k](i, c), cache.post[k](i, c));
      }
    }
    const Eigen::MatrixXd& layer_input = (k == 0) ? cache.input : cache.post[k - 1];
    result.grads.layers[k].weight.noalias() = dpre * layer_input.transpose();
    result.grads.layers[k].bias = dpre.rowwise().sum();
    if (k > 0) {
      delta.resize(layer.weight.cols(), dpre.cols());
      delta.noalias() = layer.weight.transpose() * dpre;
    } else {
      result.grad_input.resize(layer.weight.cols(), dpre.cols());
      result.grad_input.noalias() = layer.weight.transpose() * dpre;
    }
  }
  return result;
}

AdamState AdamState::init(const MlpParams& params, AdamHyper hyper) {
  AdamState s;
  s.hyper = hyper;
  s.step = 0;
  s.m = zeros_like(params);
  s.v = zeros_like(params);
  return s;
}

namespace {

template <typename Plain>
void adam_update_array(Plain& param, const Plain& grad, Plain& m, Plain& v, const AdamHyper& h,
                       double bc1, double bc2) {
  if (!grad.allFinite()) {
    throw std::runtime_error("adam_step: non-finite gradient");
  }
  m = h.beta1 * m + (1.0 - h.beta1) * grad;
  v = h.beta2 * v + (1.0 - h.beta2) * grad.cwiseProduct(grad);
  param.array() -= h.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + h.eps);
}

}  // namespace

void adam_step(AdamState& state, MlpParams& params, const MlpParams& grads) {
  if (params.layers.size() != grads.layers.size() || params.layers.size() != state.m.layers.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.hyper.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.hyper.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    auto& p = params.layers[k];
    const auto& g = grads.layers[k];
    if (p.weight.rows() != g.weight.rows() || p.weight.cols() != g.weight.cols()) {
      throw std::invalid_argument("adam_step: gradient shape mismatch");
    }
    adam_update_array(p.weight, g.weight, state.m.layers[k].weight, state.v.layers[k].weight,
                      state.hyper, bc1, bc2);
    adam_update_array(p.bias, g.bias, state.m.layers[k].bias, state.v.layers[k].bias, state.hyper,
                      bc1, bc2);
  }
}

MatrixAdamState MatrixAdamState::init(const Eigen::MatrixXd& params, AdamHyper hyper) {
  MatrixAdamState s;
  s.hyper = hyper;
  s.step = 0;
  s.m = Eigen::MatrixXd::Zero(params.rows(), params.cols());
  s.v = Eigen::MatrixXd::Zero(params.rows(), params.cols());
  return s;
}

void adam_step(MatrixAdamState& state, Eigen::MatrixXd& params, const Eigen::MatrixXd& grads) {
  if (params.rows() != grads.rows() || params.cols() != grads.cols()) {
    throw std::invalid_argument("adam_step: gradient shape mismatch");
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.hyper.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.hyper.beta2, static_cast<double>(state.step));
  adam_update_array(params, grads, state.m, state.v, state.hyper, bc1, bc2);
}

void soft_update(MlpParams& target, const MlpParams& online, double tau) {
  if (target.layers.size() != online.layers.size()) {
    throw std::invalid_argument("soft_update: layer count mismatch");
  }
  for (std::size_t k = 0; k < target.layers.size(); ++k) {
    auto& t = target.layers[k];
    const auto& o = online.layers[k];
    if (t.weight.rows() != o.weight.rows() || t.weight.cols() != o.weight.cols()) {
      throw std::invalid_argument("soft_update: shape mismatch");
    }
    t.weight = tau * o.weight + (1.0 - tau) * t.weight;
    t.bias = tau * o.bias + (1.0 - tau) * t.bias;
  }
}

void soft_update(Eigen::MatrixXd& target, const Eigen::MatrixXd& online, double tau) {
  if (target.rows() != online.rows() || target.cols() != online.cols()) {
    throw std::invalid_argument("soft_update: shape mismatch");
  }
  target = tau * online + (1.0 - tau) * target;
}

}  // namespace erl2
