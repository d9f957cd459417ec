#pragma once

#include <algorithm>
#include <stdexcept>

#include <Eigen/Core>

#include "ilnet/errors.hpp"

namespace ilnet {

/// Composite loss settings. `il_zero_normalized` is the hinge threshold: the
/// normalized image of 0 dB under the label scaler.
template <typename Scalar = double>
struct BasicLossSpec {
  Scalar lambda_penalty = Scalar(1);
  Scalar il_zero_normalized = Scalar(0);
};
using LossSpec = BasicLossSpec<double>;

template <typename Scalar = double>
struct BasicLossValue {
  Scalar total = Scalar(0);
  Scalar mse = Scalar(0);
  Scalar penalty = Scalar(0);
};
using LossValue = BasicLossValue<double>;

namespace detail {
template <typename A, typename B>
void check_pair(const Eigen::DenseBase<A>& a, const Eigen::DenseBase<B>& b) {
  if (a.size() == 0) throw DataError("loss: empty prediction vector");
  if (a.size() != b.size()) throw DataError("loss: prediction/target length mismatch");
}
}  // namespace detail

/// Mean squared error over all entries.
template <typename P, typename T>
typename P::Scalar mse(const Eigen::DenseBase<P>& predictions,
                       const Eigen::DenseBase<T>& targets) {
  detail::check_pair(predictions, targets);
  using Scalar = typename P::Scalar;
  const auto diff = (predictions.derived().array() - targets.derived().array()).eval();
  return diff.square().sum() / Scalar(predictions.size());
}

/// Gradient of mse with respect to the predictions: 2 (p - t) / N.
template <typename P, typename T>
auto mse_gradient(const Eigen::DenseBase<P>& predictions, const Eigen::DenseBase<T>& targets) {
  detail::check_pair(predictions, targets);
  using Scalar = typename P::Scalar;
  const Scalar scale = Scalar(2) / Scalar(predictions.size());
  return ((predictions.derived().array() - targets.derived().array()) * scale)
      .matrix()
      .eval();
}

/// Mean hinge max(0, t0 - p): zero when every prediction clears the threshold.
template <typename P>
typename P::Scalar positivity_penalty(const Eigen::DenseBase<P>& predictions,
                                      typename P::Scalar t0) {
  using Scalar = typename P::Scalar;
  if (predictions.size() == 0) throw DataError("loss: empty prediction vector");
  Scalar sum(0);
  for (Eigen::Index i = 0; i < predictions.size(); ++i)
    sum += std::max(Scalar(0), t0 - predictions.derived().reshaped()(i));
  return sum / Scalar(predictions.size());
}

/// Subgradient of the mean hinge: -1/N strictly below t0, 0 otherwise.
template <typename P>
auto positivity_penalty_gradient(const Eigen::DenseBase<P>& predictions,
                                 typename P::Scalar t0) {
  using Scalar = typename P::Scalar;
  using Out = Eigen::Matrix<Scalar, P::RowsAtCompileTime, P::ColsAtCompileTime>;
  Out g(predictions.rows(), predictions.cols());
  const Scalar slope = Scalar(-1) / Scalar(predictions.size());
  for (Eigen::Index j = 0; j < predictions.cols(); ++j)
    for (Eigen::Index i = 0; i < predictions.rows(); ++i)
      g(i, j) = predictions.derived()(i, j) < t0 ? slope : Scalar(0);
  return g;
}

/// total = mse + lambda * penalty. When `gradient` is non-null it receives
/// d total / d predictions, shaped like `predictions`.
template <typename P, typename T, typename Scalar = typename P::Scalar>
BasicLossValue<Scalar> combined_loss(
    const Eigen::DenseBase<P>& predictions, const Eigen::DenseBase<T>& targets,
    const BasicLossSpec<Scalar>& spec,
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>* gradient = nullptr) {
  if (!(spec.lambda_penalty >= Scalar(0))) throw DataError("loss: lambda must be >= 0");
  BasicLossValue<Scalar> v;
  v.mse = mse(predictions, targets);
  v.penalty = positivity_penalty(predictions, spec.il_zero_normalized);
  v.total = v.mse + spec.lambda_penalty * v.penalty;
  if (gradient) {
    *gradient = mse_gradient(predictions, targets)
                    .reshaped(predictions.rows(), predictions.cols());
    if (spec.lambda_penalty != Scalar(0))
      *gradient += spec.lambda_penalty *
                   positivity_penalty_gradient(predictions, spec.il_zero_normalized);
  }
  return v;
}

}  // namespace ilnet
