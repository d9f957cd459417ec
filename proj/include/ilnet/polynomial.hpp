#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ilnet/data.hpp"
#include "ilnet/errors.hpp"

namespace ilnet {

/// Coefficients of IL(w) = a w + b w^2 + c w^3, w in GHz.
template <typename Scalar = double>
struct BasicPolyCoeffs {
  Scalar a = Scalar(0);
  Scalar b = Scalar(0);
  Scalar c = Scalar(0);

  friend bool operator==(const BasicPolyCoeffs&, const BasicPolyCoeffs&) = default;
};
using PolyCoeffs = BasicPolyCoeffs<double>;

/// (w, w^2, w^3). Throws DataError for negative frequency.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> power_series(Scalar frequency) {
  if (!(frequency >= Scalar(0)))
    throw DataError("power_series: frequency must be >= 0");
  const Scalar w2 = frequency * frequency;
  return {frequency, w2, w2 * frequency};
}

/// The one evaluation path for the cubic; every prediction goes through here.
template <typename Scalar>
Scalar eval_poly(const BasicPolyCoeffs<Scalar>& k, Scalar frequency) {
  const auto p = power_series(frequency);
  return k.a * p[0] + k.b * p[1] + k.c * p[2];
}

enum class FitMethod { ols, nnls };
std::string to_string(FitMethod m);
FitMethod parse_fit_method(const std::string& tag);

struct PolyFitReport {
  PolyCoeffs coeffs;
  double max_abs_residual = 0.0;  // dB
  double rms_residual = 0.0;      // dB
  std::size_t n_points = 0;
  FitMethod method = FitMethod::ols;
};

/// Rows (w_i, w_i^2, w_i^3) for the curve's frequencies.
Eigen::MatrixXd design_matrix(const CurveGroup& curve);

/// Unconstrained least squares through column-pivoted Householder QR.
PolyFitReport fit_ols(const CurveGroup& curve);
/// Least squares with a, b, c >= 0.
PolyFitReport fit_nnls(const CurveGroup& curve);
PolyFitReport fit_curve(const CurveGroup& curve, FitMethod method);

struct CurveFit {
  DesignParams params;
  PolyFitReport report;
};

struct FitAllResult {
  std::vector<CurveFit> fits;          // ordered like group_curves
  std::vector<std::string> failures;   // per-curve errors
  std::vector<std::string> warnings;   // grouping exclusions and poor cubic fits
  double max_epsilon = 0.0;            // largest max_abs_residual over fits
};

/// Fits every curve of `data`. Throws DataError("no fittable curves") when
/// grouping leaves nothing to fit.
FitAllResult fit_all(const Dataset& data, FitMethod method,
                     double warn_threshold_db = 0.5);

/// Coefficient dataset: 7 design columns, then a, b, c, max_abs_residual_db.
void save_coefficients_csv(const std::vector<CurveFit>& fits,
                           const std::filesystem::path& path);
std::vector<CurveFit> load_coefficients_csv(const std::filesystem::path& path);
const std::vector<std::string>& coefficient_column_names();

}  // namespace ilnet
