#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ilnet/data.hpp"
#include "ilnet/surrogate.hpp"

namespace ilnet {

struct EvalReport {
  Method method = Method::nn;
  double train_mse = 0.0;  // normalized label units
  double test_mse = 0.0;
  double test_rmse_db = 0.0;
  TimeSplit train_time;
  TimeSplit infer_time;
  std::size_t n_negative = 0;
  std::size_t n_evaluations = 0;
  double negative_rate = 0.0;
  double min_prediction_db = 0.0;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Normalized-space MSE of physical predictions against physical labels.
double normalized_mse(const DataScaler& scaler, const std::vector<double>& predictions_db,
                      const Dataset& data);

/// Scores `model` on (train, test). MSE is taken in the normalized label
/// space of `scaler`; negativity (< 0 dB) is audited on test predictions in
/// physical units; infer_time covers the test-set prediction only.
/// Throws DataError when `scaler` declares different feature names than the
/// model's training scaler.
EvalReport evaluate(const Surrogate& model, const Dataset& train, const Dataset& test,
                    const DataScaler& scaler);

/// Re-derives the model's train/test split from `data` and evaluates with the
/// model's own scaler.
EvalReport evaluate(const Surrogate& model, const Dataset& data);

struct Comparison {
  std::string text;
  std::string csv;
  std::string json;
};

/// Rows ordered nn, pdnn, pdeeponet; two-part times render as "x+y = z".
Comparison compare(std::vector<EvalReport> reports);

const std::string& comparison_csv_header();
/// Inverse of the CSV produced by compare(); numeric fields are exact.
std::vector<EvalReport> parse_comparison_csv(const std::string& csv);

/// "x+y = z" with both parts rounded to `decimals` and z their rounded sum;
/// a single-part time renders as "x".
std::string format_time(const TimeSplit& t, int decimals);

struct ProfileRow {
  double frequency = 0.0;
  double prediction_db = 0.0;
  std::optional<double> truth_db;
  bool violation = false;
};

struct FrequencyProfile {
  bool has_truth = false;
  std::vector<ProfileRow> rows;

  std::size_t violations() const;
  /// Columns frequency_ghz, prediction_db, [truth_db,] violation.
  std::string to_csv() const;
};

FrequencyProfile frequency_profile(const Surrogate& model, const DesignParams& design,
                                   const std::vector<double>& frequencies,
                                   const std::optional<CurveGroup>& truth = std::nullopt);

}  // namespace ilnet
