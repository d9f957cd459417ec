#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ilnet/data.hpp"
#include "ilnet/mlp.hpp"
#include "ilnet/polynomial.hpp"

namespace ilnet {

enum class PositivityMode { softplus_head, unconstrained };
std::string to_string(PositivityMode m);
PositivityMode parse_positivity_mode(const std::string& tag);

/// Branch network u -> (a, b, c) composed with the fixed trunk (w, w^2, w^3).
struct PDeepONetModel {
  MlpModel branch;             // 7 -> ... -> 3
  MinMaxScaler design_scaler;  // 7 design features onto [-1, 1]
  MinMaxScaler coeff_scaler;   // (a, b, c); pure positive scale in softplus_head mode
  PositivityMode positivity_mode = PositivityMode::softplus_head;
  FitMethod fit_method = FitMethod::nnls;

  void validate() const;
  friend bool operator==(const PDeepONetModel&, const PDeepONetModel&) = default;
};

/// Coefficient scaler for the branch targets (3 rows, one column per curve).
/// In softplus_head mode the map is t = x / max on [0, 1], so any t >= 0
/// denormalizes to x >= 0. Constant columns get a unit-width span instead of
/// being rejected.
MinMaxScaler fit_coefficient_scaler(const Eigen::Ref<const Eigen::MatrixXd>& coeffs,
                                    PositivityMode mode);

struct TwoStageOptions {
  FitMethod fit_method = FitMethod::nnls;
  PositivityMode positivity_mode = PositivityMode::softplus_head;
  std::vector<Eigen::Index> hidden_sizes{64, 64};
  Activation hidden_activation = Activation::tanh;
  double warn_threshold_db = 0.5;
};

struct TwoStageResult {
  PDeepONetModel model;
  TrainTrace trace;
  FitAllResult fits;
  double stage1_seconds = 0.0;  // curve fitting
  double stage2_seconds = 0.0;  // branch training
};

/// Stage 1 fits a cubic per design curve; stage 2 regresses the normalized
/// coefficients on the normalized design parameters with plain MSE.
/// The batch size is capped at the number of fitted curves.
TwoStageResult train_two_stage(const Dataset& data, const TwoStageOptions& options,
                               const TrainConfig& config);

/// Branch outputs mapped back to physical coefficients.
PolyCoeffs predict_coefficients(const PDeepONetModel& model, const DesignParams& params);
std::vector<PolyCoeffs> predict_coefficients(const PDeepONetModel& model,
                                             const std::vector<DesignParams>& params);

double predict(const PDeepONetModel& model, const DesignParams& params, double frequency);

std::vector<std::pair<double, double>> predict_curve(const PDeepONetModel& model,
                                                     const DesignParams& params,
                                                     const std::vector<double>& frequencies);

}  // namespace ilnet
