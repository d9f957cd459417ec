#include "ilnet/deeponet.hpp"

#include <chrono>
#include <cmath>

namespace ilnet {

std::string to_string(PositivityMode m) {
  return m == PositivityMode::softplus_head ? "softplus_head" : "unconstrained";
}

PositivityMode parse_positivity_mode(const std::string& tag) {
  if (tag == "softplus_head") return PositivityMode::softplus_head;
  if (tag == "unconstrained") return PositivityMode::unconstrained;
  throw UsageError("unknown positivity mode '" + tag +
                   "' (expected softplus_head or unconstrained)");
}

void PDeepONetModel::validate() const {
  branch.validate();
  if (branch.input_size() != static_cast<Eigen::Index>(DesignParams::kCount))
    throw DataError("pdeeponet: branch input width must be 7");
  if (branch.output_size() != 3) throw DataError("pdeeponet: branch output width must be 3");
  if (design_scaler.size() != 7 || coeff_scaler.size() != 3)
    throw DataError("pdeeponet: scaler widths do not match the branch");
  const bool softplus = branch.output_activation == OutputActivation::softplus;
  if (softplus != (positivity_mode == PositivityMode::softplus_head))
    throw DataError("pdeeponet: output head does not match positivity mode");
  if (positivity_mode == PositivityMode::softplus_head &&
      (coeff_scaler.lo() != 0.0 || !coeff_scaler.min().isZero()))
    throw DataError("pdeeponet: softplus_head requires a zero-anchored coefficient scaler");
}

MinMaxScaler fit_coefficient_scaler(const Eigen::Ref<const Eigen::MatrixXd>& coeffs,
                                    PositivityMode mode) {
  if (coeffs.rows() != 3 || coeffs.cols() == 0)
    throw DataError("coefficient scaler: need a 3 x n coefficient matrix with n >= 1");
  std::vector<std::string> names{"a", "b", "c"};
  Eigen::Vector3d lo, hi;
  for (Eigen::Index i = 0; i < 3; ++i) {
    const double mn = coeffs.row(i).minCoeff();
    const double mx = coeffs.row(i).maxCoeff();
    if (mode == PositivityMode::softplus_head) {
      lo[i] = 0.0;
      hi[i] = mx > 0.0 ? mx : 1.0;
    } else if (mx > mn) {
      lo[i] = mn;
      hi[i] = mx;
    } else {
      const double half = mn != 0.0 ? std::abs(mn) : 1.0;
      lo[i] = mn - half;
      hi[i] = mn + half;
    }
  }
  if (mode == PositivityMode::softplus_head)
    return MinMaxScaler(std::move(names), lo, hi, 0.0, 1.0);
  return MinMaxScaler(std::move(names), lo, hi);
}

TwoStageResult train_two_stage(const Dataset& data, const TwoStageOptions& options,
                               const TrainConfig& config) {
  using Clock = std::chrono::steady_clock;
  TwoStageResult out;

  const auto t0 = Clock::now();
  out.fits = fit_all(data, options.fit_method, options.warn_threshold_db);
  out.stage1_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  const auto n = static_cast<Eigen::Index>(out.fits.fits.size());
  if (n < 2) throw DataError("pdeeponet: need at least 2 fitted curves, got " + std::to_string(n));

  Eigen::MatrixXd designs(7, n), coeffs(3, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& f = out.fits.fits[static_cast<std::size_t>(j)];
    const auto p = f.params.as_array();
    for (Eigen::Index i = 0; i < 7; ++i) designs(i, j) = p[static_cast<std::size_t>(i)];
    coeffs.col(j) << f.report.coeffs.a, f.report.coeffs.b, f.report.coeffs.c;
  }

  PDeepONetModel& m = out.model;
  m.positivity_mode = options.positivity_mode;
  m.fit_method = options.fit_method;
  m.design_scaler = MinMaxScaler::fit(design_column_names(), designs);
  m.coeff_scaler = fit_coefficient_scaler(coeffs, options.positivity_mode);

  std::vector<Eigen::Index> sizes{7};
  sizes.insert(sizes.end(), options.hidden_sizes.begin(), options.hidden_sizes.end());
  sizes.push_back(3);
  const std::vector<Activation> acts(options.hidden_sizes.size(), options.hidden_activation);
  const auto head = options.positivity_mode == PositivityMode::softplus_head
                        ? OutputActivation::softplus
                        : OutputActivation::identity;
  m.branch = init_model(sizes, acts, head, config.seed);

  TrainConfig stage2 = config;
  stage2.lambda_penalty = 0.0;
  stage2.batch_size = std::min<std::size_t>(config.batch_size, static_cast<std::size_t>(n));

  const Eigen::MatrixXd inputs = m.design_scaler.transform(designs);
  const Eigen::MatrixXd targets = m.coeff_scaler.transform(coeffs);
  const auto t1 = Clock::now();
  out.trace = train(m.branch, inputs, targets, LossSpec{0.0, 0.0}, stage2);
  out.stage2_seconds = std::chrono::duration<double>(Clock::now() - t1).count();
  return out;
}

namespace {

Eigen::VectorXd design_vector(const DesignParams& params) {
  const auto p = params.as_array();
  Eigen::VectorXd v(7);
  for (Eigen::Index i = 0; i < 7; ++i) {
    v[i] = p[static_cast<std::size_t>(i)];
    if (!std::isfinite(v[i])) throw DataError("pdeeponet: non-finite design parameter");
  }
  return v;
}

PolyCoeffs to_coeffs(const MinMaxScaler& scaler, const Eigen::Ref<const Eigen::VectorXd>& t) {
  return {scaler.inverse(0, t[0]), scaler.inverse(1, t[1]), scaler.inverse(2, t[2])};
}

}  // namespace

std::vector<PolyCoeffs> predict_coefficients(const PDeepONetModel& model,
                                             const std::vector<DesignParams>& params) {
  Eigen::MatrixXd x(7, static_cast<Eigen::Index>(params.size()));
  for (std::size_t j = 0; j < params.size(); ++j)
    x.col(static_cast<Eigen::Index>(j)) = design_vector(params[j]);
  const Eigen::MatrixXd t = forward(model.branch, model.design_scaler.transform(x));
  std::vector<PolyCoeffs> out;
  out.reserve(params.size());
  for (Eigen::Index j = 0; j < t.cols(); ++j) out.push_back(to_coeffs(model.coeff_scaler, t.col(j)));
  return out;
}

PolyCoeffs predict_coefficients(const PDeepONetModel& model, const DesignParams& params) {
  return predict_coefficients(model, std::vector<DesignParams>{params}).front();
}

double predict(const PDeepONetModel& model, const DesignParams& params, double frequency) {
  if (!std::isfinite(frequency)) throw DataError("pdeeponet: non-finite frequency");
  if (frequency < 0.0) throw DataError("pdeeponet: frequency must be >= 0");
  return eval_poly(predict_coefficients(model, params), frequency);
}

std::vector<std::pair<double, double>> predict_curve(const PDeepONetModel& model,
                                                     const DesignParams& params,
                                                     const std::vector<double>& frequencies) {
  for (double f : frequencies)
    if (!std::isfinite(f) || f < 0.0) throw DataError("pdeeponet: frequencies must be >= 0");
  const PolyCoeffs k = predict_coefficients(model, params);
  std::vector<std::pair<double, double>> out;
  out.reserve(frequencies.size());
  for (double f : frequencies) out.emplace_back(f, eval_poly(k, f));
  return out;
}

}  // namespace ilnet
