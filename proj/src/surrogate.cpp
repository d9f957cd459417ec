#include "ilnet/surrogate.hpp"

namespace ilnet {

std::string to_string(Method m) {
  switch (m) {
    case Method::nn: return "nn";
    case Method::pdnn: return "pdnn";
    case Method::pdeeponet: return "pdeeponet";
  }
  return "?";
}

Method parse_method(const std::string& tag) {
  if (tag == "nn") return Method::nn;
  if (tag == "pdnn") return Method::pdnn;
  if (tag == "pdeeponet") return Method::pdeeponet;
  throw UsageError("unknown method '" + tag + "' (expected nn, pdnn or pdeeponet)");
}

std::string display_name(Method m) {
  switch (m) {
    case Method::nn: return "NN";
    case Method::pdnn: return "PDNN";
    case Method::pdeeponet: return "PDeepONet";
  }
  return "?";
}

namespace {

Eigen::MatrixXd normalized_inputs(const DataScaler& scaler, const Dataset& data) {
  const Eigen::MatrixXd raw = feature_matrix(data);
  return scaler.features.transform(raw.topRows(feature::kFrequency + 1));
}

}  // namespace

std::vector<double> predict_db(const Surrogate& model, const Dataset& data) {
  std::vector<double> out(data.size());
  if (data.empty()) return out;
  if (const auto* mlp = model.mlp()) {
    const Eigen::MatrixXd y = forward(*mlp, normalized_inputs(model.scaler, data));
    for (std::size_t j = 0; j < out.size(); ++j)
      out[j] = model.scaler.denormalize_il(y(0, static_cast<Eigen::Index>(j)));
    return out;
  }
  const auto& net = *model.deeponet();
  std::vector<DesignParams> designs;
  designs.reserve(data.size());
  for (const auto& s : data.samples) designs.push_back(s.params);
  const auto coeffs = predict_coefficients(net, designs);
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (data.samples[j].frequency < 0.0) throw DataError("predict: negative frequency");
    out[j] = eval_poly(coeffs[j], data.samples[j].frequency);
  }
  return out;
}

double predict_db(const Surrogate& model, const DesignParams& params, double frequency) {
  Dataset one;
  one.samples.push_back({params, frequency, 0.0});
  return predict_db(model, one).front();
}

TrainRequest default_request(Method method) {
  TrainRequest r;
  r.method = method;
  r.config.lambda_penalty = method == Method::pdnn ? 1.0 : 0.0;
  if (method == Method::pdeeponet) {
    r.hidden_sizes = {64, 64};
    // Stage 2 sees one sample per curve; 256 is capped to the curve count,
    // giving full-batch steps on typical datasets.
    r.config.epochs = 5000;
    r.config.batch_size = 256;
  } else {
    r.hidden_sizes = {64, 64, 64};
  }
  return r;
}

TrainOutcome train_surrogate(const Dataset& data, const TrainRequest& request) {
  request.config.validate();
  auto parts = split(data, request.split);
  TrainOutcome out;
  Surrogate& m = out.model;
  m.method = request.method;
  m.split = request.split;
  m.config = request.config;
  m.dataset_name = data.name;
  m.scaler = fit_scaler(parts.train);

  auto hidden = request.hidden_sizes;
  if (hidden.empty()) hidden = default_request(request.method).hidden_sizes;

  if (request.method == Method::pdeeponet) {
    TwoStageOptions options;
    options.fit_method = request.fit_method;
    options.positivity_mode = request.positivity_mode;
    options.hidden_sizes = hidden;
    options.hidden_activation = request.hidden_activation;
    m.config.lambda_penalty = 0.0;
    auto result = train_two_stage(parts.train, options, m.config);
    m.network = std::move(result.model);
    m.train_time = {result.stage1_seconds, result.stage2_seconds};
    out.trace = std::move(result.trace);
    out.fits = std::move(result.fits);
    return out;
  }

  if (request.method == Method::nn) m.config.lambda_penalty = 0.0;
  std::vector<Eigen::Index> sizes{feature::kFrequency + 1};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  MlpModel net = init_model(sizes, std::vector<Activation>(hidden.size(), request.hidden_activation),
                            OutputActivation::identity, m.config.seed);

  const Eigen::MatrixXd inputs = normalized_inputs(m.scaler, parts.train);
  Eigen::MatrixXd targets(1, static_cast<Eigen::Index>(parts.train.size()));
  for (std::size_t j = 0; j < parts.train.size(); ++j)
    targets(0, static_cast<Eigen::Index>(j)) =
        m.scaler.normalize_il(parts.train.samples[j].insertion_loss);
  const LossSpec loss{m.config.lambda_penalty, m.scaler.il_zero_normalized()};
  out.trace = train(net, inputs, targets, loss, m.config);
  m.network = std::move(net);
  m.train_time = {out.trace.total_seconds, std::nullopt};
  return out;
}

}  // namespace ilnet
