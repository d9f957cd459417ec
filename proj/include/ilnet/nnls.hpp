#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Core>
#include <Eigen/QR>

#include "ilnet/errors.hpp"

namespace ilnet {

template <typename Scalar>
struct NnlsResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  /// Negative gradient of 0.5 |Ax - b|^2 at x, i.e. A^T (b - A x).
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> dual;
  int iterations = 0;
};

/// Lawson-Hanson active-set solver for min |Ax - b| subject to x >= 0.
///
/// Columns are scaled to unit norm internally; the scaling is positive so the
/// feasible set is unchanged. Throws NumericalError if the iteration cap is hit.
template <typename DA, typename DB>
NnlsResult<typename DA::Scalar> nnls(const Eigen::MatrixBase<DA>& a,
                                     const Eigen::MatrixBase<DB>& b, int max_iterations = 0) {
  using Scalar = typename DA::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (b.size() != m) throw DataError("nnls: right-hand side length mismatch");
  if (max_iterations <= 0) max_iterations = static_cast<int>(3 * n + 30);

  Vector scale = a.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < n; ++j)
    if (scale[j] == Scalar(0)) scale[j] = Scalar(1);
  const Matrix as = a * scale.cwiseInverse().asDiagonal();
  const Vector rhs = b;

  const Scalar tol = Scalar(10) * std::numeric_limits<Scalar>::epsilon() *
                     static_cast<Scalar>(std::max(m, n)) * (rhs.norm() + Scalar(1));

  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  Vector x = Vector::Zero(n);
  Vector w = as.transpose() * rhs;

  auto solve_passive = [&](Vector& z) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < n; ++j)
      if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
    Matrix sub(m, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k)
      sub.col(static_cast<Eigen::Index>(k)) = as.col(cols[k]);
    const Vector zs = sub.colPivHouseholderQr().solve(rhs);
    z.setZero(n);
    for (std::size_t k = 0; k < cols.size(); ++k) z[cols[k]] = zs[static_cast<Eigen::Index>(k)];
  };

  NnlsResult<Scalar> out;
  int iter = 0;
  while (true) {
    Eigen::Index best = -1;
    Scalar best_w = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;

    Vector z;
    while (true) {
      if (++iter > max_iterations) throw NumericalError("nnls: iteration limit reached");
      solve_passive(z);
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[static_cast<std::size_t>(j)] && z[j] <= Scalar(0)) feasible = false;
      if (feasible) {
        x = z;
        break;
      }
      // Step from x toward z until the first passive coordinate hits zero.
      Scalar alpha = std::numeric_limits<Scalar>::infinity();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z[j] <= Scalar(0)) {
          const Scalar step = x[j] / (x[j] - z[j]);
          if (step < alpha) alpha = step;
        }
      }
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x[j] <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          x[j] = Scalar(0);
        }
      }
    }
    w = as.transpose() * (rhs - as * x);
  }

  out.x = x.cwiseQuotient(scale);
  out.dual = a.transpose() * (b - a * out.x);
  out.iterations = iter;
  return out;
}

}  // namespace ilnet
