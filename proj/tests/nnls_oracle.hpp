#pragma once

// Exhaustive NNLS reference: try every support set, solve the restricted
// least-squares problem with an SVD, keep the best feasible candidate.
// Exponential in n, fine for n <= 8.

#include <cmath>
#include <limits>

#include <Eigen/Core>
#include <Eigen/SVD>

namespace ilnet::oracle {

inline Eigen::VectorXd nnls_by_enumeration(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const auto n = a.cols();
  Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
  double best_obj = (b - a * best).squaredNorm();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < n; ++j)
      if (mask & (1u << j)) cols.push_back(j);
    Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(cols[k]);
    const Eigen::VectorXd z = sub.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
    if ((z.array() < 0.0).any()) continue;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < cols.size(); ++k) x[cols[k]] = z[static_cast<Eigen::Index>(k)];
    const double obj = (b - a * x).squaredNorm();
    if (obj < best_obj) {
      best_obj = obj;
      best = x;
    }
  }
  return best;
}

struct KktReport {
  double primal = 0.0;           // most negative x, as a positive number
  double dual = 0.0;             // largest positive A^T(b - Ax), scaled
  double stationarity = 0.0;     // largest |A_j^T r| over x_j > 0, scaled
  double complementarity = 0.0;  // largest |x_j * A_j^T r|, scaled
  double worst() const {
    return std::max(std::max(primal, dual), std::max(stationarity, complementarity));
  }
};

/// KKT residuals of min |Ax - b|^2, x >= 0. Dual terms are divided by
/// |A_j| (|b| + 1) so the check does not depend on column units.
inline KktReport kkt(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& x) {
  KktReport k;
  const Eigen::VectorXd w = a.transpose() * (b - a * x);
  const double bn = b.norm() + 1.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double cn = a.col(j).norm();
    const double wj = w[j] / (cn * bn);
    k.primal = std::max(k.primal, -x[j]);
    k.dual = std::max(k.dual, wj);
    if (x[j] > 0.0) k.stationarity = std::max(k.stationarity, std::abs(wj));
    k.complementarity = std::max(k.complementarity, std::abs(x[j] * cn / bn * wj));
  }
  return k;
}

}  // namespace ilnet::oracle
