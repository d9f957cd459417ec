#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ilnet/data.hpp"
#include "ilnet/deeponet.hpp"
#include "ilnet/mlp.hpp"

namespace ilnet {

enum class Method { nn, pdnn, pdeeponet };
std::string to_string(Method m);
Method parse_method(const std::string& tag);
/// Display name used in comparison tables: NN, PDNN, PDeepONet.
std::string display_name(Method m);

/// Wall-clock seconds, either a single figure or a two-part split.
struct TimeSplit {
  double first = 0.0;
  std::optional<double> second;

  double total() const { return first + second.value_or(0.0); }
  bool two_part() const { return second.has_value(); }
  friend bool operator==(const TimeSplit&, const TimeSplit&) = default;
};

/// A trained model of any method plus everything needed to reproduce and
/// evaluate it: the train-split scaler, split spec and hyperparameters.
struct Surrogate {
  Method method = Method::nn;
  std::variant<MlpModel, PDeepONetModel> network;
  DataScaler scaler;
  SplitSpec split;
  TrainConfig config;
  std::string dataset_name;
  TimeSplit train_time;  // excluded from reproducibility comparisons

  const MlpModel* mlp() const { return std::get_if<MlpModel>(&network); }
  const PDeepONetModel* deeponet() const { return std::get_if<PDeepONetModel>(&network); }
};

/// Physical-dB prediction for each sample (labels ignored).
std::vector<double> predict_db(const Surrogate& model, const Dataset& data);
double predict_db(const Surrogate& model, const DesignParams& params, double frequency);

struct TrainRequest {
  Method method = Method::nn;
  TrainConfig config{};
  SplitSpec split{0.8, 0};
  std::vector<Eigen::Index> hidden_sizes;  // empty: method default
  Activation hidden_activation = Activation::tanh;
  FitMethod fit_method = FitMethod::nnls;
  PositivityMode positivity_mode = PositivityMode::softplus_head;
};

/// Method defaults: NN/PDNN 8-64-64-64-1 with 200 epochs, batch 128;
/// PDeepONet branch 7-64-64-3 with 5000 epochs, batch 256 (capped to the
/// curve count). lambda defaults to 1 for PDNN and is forced to 0 for NN.
TrainRequest default_request(Method method);

struct TrainOutcome {
  Surrogate model;
  TrainTrace trace;
  std::optional<FitAllResult> fits;  // PDeepONet stage 1
};

/// Splits `data`, fits the scaler on the train part only and trains.
TrainOutcome train_surrogate(const Dataset& data, const TrainRequest& request);

}  // namespace ilnet
