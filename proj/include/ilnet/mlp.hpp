#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ilnet/errors.hpp"
#include "ilnet/physics_loss.hpp"

namespace ilnet {

enum class Activation { tanh, relu };
enum class OutputActivation { identity, softplus };

std::string to_string(Activation a);
std::string to_string(OutputActivation a);
Activation parse_activation(const std::string& tag);
OutputActivation parse_output_activation(const std::string& tag);

/// Fully connected network. weights[l] maps layer l (cols) to layer l+1 (rows).
template <typename Scalar>
struct BasicMlp {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  std::vector<Eigen::Index> layer_sizes;
  std::vector<Activation> activations;  // one per hidden layer
  OutputActivation output_activation = OutputActivation::identity;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  std::size_t n_transforms() const { return weights.size(); }
  Eigen::Index input_size() const { return layer_sizes.front(); }
  Eigen::Index output_size() const { return layer_sizes.back(); }

  /// Throws DataError on inconsistent shapes or non-finite parameters.
  void validate() const {
    if (layer_sizes.size() < 2) throw DataError("mlp: need at least input and output layers");
    for (auto s : layer_sizes)
      if (s < 1) throw DataError("mlp: layer sizes must be >= 1");
    const std::size_t n = layer_sizes.size() - 1;
    if (weights.size() != n || biases.size() != n)
      throw DataError("mlp: parameter count does not match layer sizes");
    if (activations.size() != n - 1)
      throw DataError("mlp: need one activation per hidden layer");
    for (std::size_t l = 0; l < n; ++l) {
      if (weights[l].rows() != layer_sizes[l + 1] || weights[l].cols() != layer_sizes[l])
        throw DataError("mlp: weight " + std::to_string(l) + " has wrong shape");
      if (biases[l].size() != layer_sizes[l + 1])
        throw DataError("mlp: bias " + std::to_string(l) + " has wrong shape");
      if (!weights[l].allFinite() || !biases[l].allFinite())
        throw DataError("mlp: non-finite parameter in layer " + std::to_string(l));
    }
  }

  /// Exact (bitwise-value) equality of architecture and parameters.
  friend bool operator==(const BasicMlp& a, const BasicMlp& b) {
    if (a.layer_sizes != b.layer_sizes || a.activations != b.activations ||
        a.output_activation != b.output_activation || a.weights.size() != b.weights.size() ||
        a.biases.size() != b.biases.size())
      return false;
    for (std::size_t l = 0; l < a.weights.size(); ++l) {
      if (a.weights[l].rows() != b.weights[l].rows() ||
          a.weights[l].cols() != b.weights[l].cols() ||
          a.biases[l].size() != b.biases[l].size())
        return false;
      if (a.weights[l] != b.weights[l] || a.biases[l] != b.biases[l]) return false;
    }
    return true;
  }
};
using MlpModel = BasicMlp<double>;

/// Parameter-shaped container, used for gradients and optimizer moments.
template <typename Scalar>
struct BasicMlpGradients {
  std::vector<typename BasicMlp<Scalar>::Matrix> weights;
  std::vector<typename BasicMlp<Scalar>::Vector> biases;

  static BasicMlpGradients zeros_like(const BasicMlp<Scalar>& model) {
    BasicMlpGradients g;
    for (std::size_t l = 0; l < model.n_transforms(); ++l) {
      g.weights.push_back(BasicMlp<Scalar>::Matrix::Zero(model.weights[l].rows(),
                                                          model.weights[l].cols()));
      g.biases.push_back(BasicMlp<Scalar>::Vector::Zero(model.biases[l].size()));
    }
    return g;
  }

  bool all_finite() const {
    for (const auto& w : weights)
      if (!w.allFinite()) return false;
    for (const auto& b : biases)
      if (!b.allFinite()) return false;
    return true;
  }
};
using MlpGradients = BasicMlpGradients<double>;

/// Per-layer values kept by forward() for backward(): layer inputs and
/// pre-activations, all batch-major (one column per sample).
template <typename Scalar>
struct BasicForwardCache {
  std::vector<typename BasicMlp<Scalar>::Matrix> inputs;
  std::vector<typename BasicMlp<Scalar>::Matrix> pre_activations;
};
using ForwardCache = BasicForwardCache<double>;

namespace detail {

template <typename Scalar>
Scalar softplus(Scalar z) {
  return std::max(z, Scalar(0)) + std::log1p(std::exp(-std::abs(z)));
}

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-z));
  const Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

template <typename Derived>
auto apply_hidden(Activation a, const Eigen::MatrixBase<Derived>& z) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (a == Activation::tanh) return Matrix(z.array().tanh().matrix());
  return Matrix(z.array().max(Scalar(0)).matrix());
}

// `z` is the pre-activation and `a` the activated value of the same layer.
template <typename DZ, typename DA>
auto hidden_derivative(Activation act, const Eigen::MatrixBase<DZ>& z,
                       const Eigen::MatrixBase<DA>& a) {
  using Scalar = typename DZ::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (act == Activation::tanh) return Matrix((Scalar(1) - a.array().square()).matrix());
  return Matrix((z.array() > Scalar(0)).template cast<Scalar>().matrix());
}

template <typename Derived>
auto apply_output(OutputActivation a, const Eigen::MatrixBase<Derived>& z) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (a == OutputActivation::identity) return Matrix(z);
  return Matrix(z.unaryExpr([](Scalar v) { return softplus(v); }));
}

template <typename Derived>
auto output_derivative(OutputActivation a, const Eigen::MatrixBase<Derived>& z) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (a == OutputActivation::identity) return Matrix(Matrix::Ones(z.rows(), z.cols()));
  return Matrix(z.unaryExpr([](Scalar v) { return sigmoid(v); }));
}

}  // namespace detail

/// Xavier-uniform weights, zero biases.
template <typename Scalar = double>
BasicMlp<Scalar> init_model(const std::vector<Eigen::Index>& layer_sizes,
                            const std::vector<Activation>& activations,
                            OutputActivation output_activation, std::uint64_t seed) {
  if (layer_sizes.empty()) throw UsageError("init_model: empty layer list");
  if (layer_sizes.size() < 2) throw UsageError("init_model: need at least two layers");
  for (auto s : layer_sizes)
    if (s < 1) throw UsageError("init_model: layer sizes must be >= 1");
  if (activations.size() != layer_sizes.size() - 2)
    throw UsageError("init_model: need one activation per hidden layer");

  BasicMlp<Scalar> m;
  m.layer_sizes = layer_sizes;
  m.activations = activations;
  m.output_activation = output_activation;
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const auto fan_in = layer_sizes[l];
    const auto fan_out = layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> u(-limit, limit);
    typename BasicMlp<Scalar>::Matrix w(fan_out, fan_in);
    // Row-major fill so the draw order matches the serialized layout.
    for (Eigen::Index r = 0; r < fan_out; ++r)
      for (Eigen::Index c = 0; c < fan_in; ++c) w(r, c) = static_cast<Scalar>(u(rng));
    m.weights.push_back(std::move(w));
    m.biases.push_back(BasicMlp<Scalar>::Vector::Zero(fan_out));
  }
  return m;
}

/// Batched forward pass; `input` holds one sample per column.
template <typename Scalar, typename Derived>
typename BasicMlp<Scalar>::Matrix forward(const BasicMlp<Scalar>& model,
                                          const Eigen::MatrixBase<Derived>& input,
                                          BasicForwardCache<Scalar>* cache = nullptr) {
  if (input.rows() != model.input_size())
    throw DataError("forward: input has " + std::to_string(input.rows()) +
                    " features, model expects " + std::to_string(model.input_size()));
  if (cache) {
    cache->inputs.clear();
    cache->pre_activations.clear();
  }
  typename BasicMlp<Scalar>::Matrix a = input;
  const std::size_t n = model.n_transforms();
  for (std::size_t l = 0; l < n; ++l) {
    typename BasicMlp<Scalar>::Matrix z = model.weights[l] * a;
    z.colwise() += model.biases[l];
    if (cache) {
      cache->inputs.push_back(std::move(a));
      cache->pre_activations.push_back(z);
    }
    a = (l + 1 < n) ? detail::apply_hidden(model.activations[l], z)
                    : detail::apply_output(model.output_activation, z);
  }
  return a;
}

/// Gradients of a scalar loss given d loss / d output for the cached batch.
template <typename Scalar, typename Derived>
BasicMlpGradients<Scalar> backward(const BasicMlp<Scalar>& model,
                                   const BasicForwardCache<Scalar>& cache,
                                   const Eigen::MatrixBase<Derived>& output_gradient) {
  const std::size_t n = model.n_transforms();
  if (cache.inputs.size() != n || cache.pre_activations.size() != n)
    throw DataError("backward: cache does not match model depth");
  const auto batch = cache.inputs.front().cols();
  if (output_gradient.rows() != model.output_size() || output_gradient.cols() != batch)
    throw DataError("backward: output gradient shape does not match forward batch");

  BasicMlpGradients<Scalar> g;
  g.weights.resize(n);
  g.biases.resize(n);
  typename BasicMlp<Scalar>::Matrix delta =
      output_gradient.cwiseProduct(
          detail::output_derivative(model.output_activation, cache.pre_activations[n - 1]));
  for (std::size_t l = n; l-- > 0;) {
    g.weights[l] = delta * cache.inputs[l].transpose();
    g.biases[l] = delta.rowwise().sum();
    if (l == 0) break;
    typename BasicMlp<Scalar>::Matrix upstream = model.weights[l].transpose() * delta;
    delta = upstream.cwiseProduct(detail::hidden_derivative(
        model.activations[l - 1], cache.pre_activations[l - 1], cache.inputs[l]));
  }
  return g;
}

// ---------------------------------------------------------------------------
// Optimization

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t epochs = 200;
  std::size_t batch_size = 128;
  std::uint64_t seed = 0;
  double lambda_penalty = 0.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const {
    if (!(learning_rate > 0.0)) throw UsageError("train: learning rate must be > 0");
    if (batch_size < 1) throw UsageError("train: batch size must be >= 1");
    if (!(lambda_penalty >= 0.0)) throw UsageError("train: lambda must be >= 0");
    if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0) || !(adam_beta2 > 0.0 && adam_beta2 < 1.0))
      throw UsageError("train: Adam betas must lie in (0, 1)");
    if (!(adam_eps > 0.0)) throw UsageError("train: Adam epsilon must be > 0");
  }
};

template <typename Scalar>
struct BasicAdamState {
  BasicMlpGradients<Scalar> first_moment;
  BasicMlpGradients<Scalar> second_moment;
  std::uint64_t step = 0;

  static BasicAdamState for_model(const BasicMlp<Scalar>& model) {
    return {BasicMlpGradients<Scalar>::zeros_like(model),
            BasicMlpGradients<Scalar>::zeros_like(model), 0};
  }
};
using AdamState = BasicAdamState<double>;

/// One bias-corrected Adam update. Throws NumericalError on non-finite input.
template <typename Scalar>
void adam_step(BasicMlp<Scalar>& model, const BasicMlpGradients<Scalar>& gradients,
               BasicAdamState<Scalar>& state, const TrainConfig& config) {
  const std::size_t n = model.n_transforms();
  if (gradients.weights.size() != n || gradients.biases.size() != n)
    throw DataError("adam_step: gradient does not match model depth");
  if (state.first_moment.weights.size() != n) state = BasicAdamState<Scalar>::for_model(model);
  if (!gradients.all_finite())
    throw NumericalError("adam_step: non-finite gradient at step " +
                         std::to_string(state.step + 1));

  ++state.step;
  const Scalar b1(config.adam_beta1), b2(config.adam_beta2);
  const Scalar lr(config.learning_rate), eps(config.adam_eps);
  const Scalar c1 = Scalar(1) - std::pow(b1, static_cast<Scalar>(state.step));
  const Scalar c2 = Scalar(1) - std::pow(b2, static_cast<Scalar>(state.step));

  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    if (param.rows() != grad.rows() || param.cols() != grad.cols())
      throw DataError("adam_step: gradient shape mismatch");
    m = b1 * m + (Scalar(1) - b1) * grad;
    v = b2 * v + (Scalar(1) - b2) * grad.cwiseAbs2();
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t l = 0; l < n; ++l) {
    update(model.weights[l], gradients.weights[l], state.first_moment.weights[l],
           state.second_moment.weights[l]);
    update(model.biases[l], gradients.biases[l], state.first_moment.biases[l],
           state.second_moment.biases[l]);
  }
}

struct EpochRecord {
  double total_loss;
  double mse;
  double penalty;
  double seconds;
};

struct TrainTrace {
  std::vector<EpochRecord> epochs;
  double total_seconds = 0.0;
};

/// Evaluates the composite loss of `model` on a whole set.
template <typename Scalar, typename DI, typename DT>
BasicLossValue<Scalar> evaluate_loss(const BasicMlp<Scalar>& model,
                                     const Eigen::MatrixBase<DI>& inputs,
                                     const Eigen::MatrixBase<DT>& targets,
                                     const BasicLossSpec<Scalar>& loss) {
  return combined_loss(forward(model, inputs), targets, loss);
}

/// Mini-batch Adam on (inputs, targets), both normalized, one sample per
/// column. Batches come from a seeded shuffle each epoch. Each trace record
/// holds the loss on the full set after that epoch.
template <typename Scalar, typename DI, typename DT>
TrainTrace train(BasicMlp<Scalar>& model, const Eigen::MatrixBase<DI>& inputs,
                 const Eigen::MatrixBase<DT>& targets, const BasicLossSpec<Scalar>& loss,
                 const TrainConfig& config) {
  using Matrix = typename BasicMlp<Scalar>::Matrix;
  using Clock = std::chrono::steady_clock;
  config.validate();
  model.validate();
  const auto n = inputs.cols();
  if (n == 0) throw DataError("train: empty training set");
  if (targets.cols() != n || targets.rows() != model.output_size() ||
      inputs.rows() != model.input_size())
    throw DataError("train: data shape does not match the model");
  if (config.batch_size > static_cast<std::size_t>(n))
    throw UsageError("train: batch size exceeds training-set size");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(config.seed);
  auto state = BasicAdamState<Scalar>::for_model(model);
  BasicForwardCache<Scalar> cache;
  Matrix batch_in, batch_out, grad;

  TrainTrace trace;
  const auto start = Clock::now();
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto epoch_start = Clock::now();
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t first = 0; first < order.size(); first += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, order.size() - first);
      batch_in.resize(inputs.rows(), static_cast<Eigen::Index>(count));
      batch_out.resize(targets.rows(), static_cast<Eigen::Index>(count));
      for (std::size_t k = 0; k < count; ++k) {
        batch_in.col(static_cast<Eigen::Index>(k)) = inputs.col(order[first + k]);
        batch_out.col(static_cast<Eigen::Index>(k)) = targets.col(order[first + k]);
      }
      const Matrix predictions = forward(model, batch_in, &cache);
      const auto value = combined_loss(predictions, batch_out, loss, &grad);
      if (!std::isfinite(value.total))
        throw NumericalError("train: non-finite loss in epoch " + std::to_string(epoch + 1));
      try {
        adam_step(model, backward(model, cache, grad), state, config);
      } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " (epoch " + std::to_string(epoch + 1) +
                             ")");
      }
    }
    const auto value = evaluate_loss(model, inputs, targets, loss);
    if (!std::isfinite(value.total))
      throw NumericalError("train: diverged in epoch " + std::to_string(epoch + 1));
    const double secs = std::chrono::duration<double>(Clock::now() - epoch_start).count();
    trace.epochs.push_back({static_cast<double>(value.total), static_cast<double>(value.mse),
                            static_cast<double>(value.penalty), secs});
  }
  trace.total_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return trace;
}

}  // namespace ilnet
