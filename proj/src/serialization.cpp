#include "ilnet/serialization.hpp"

#include <fstream>

#include "ilnet/evaluation.hpp"

namespace ilnet {

using nlohmann::json;

namespace {

json vector_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vector_from(const json& a) {
  if (!a.is_array()) throw DataError("json: expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  return v;
}

json time_json(const TimeSplit& t) {
  if (!t.two_part()) return t.first;
  return json::array({t.first, *t.second});
}

TimeSplit time_from(const json& j) {
  if (j.is_number()) return {j.get<double>(), std::nullopt};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw DataError("json: time must be a number or a [stage1, stage2] pair");
}

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw DataError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

json to_json(const MinMaxScaler& s) {
  return {{"feature_names", s.names()},
          {"min", vector_json(s.min())},
          {"max", vector_json(s.max())},
          {"range", json::array({s.lo(), s.hi()})}};
}

MinMaxScaler scaler_from_json(const json& j) {
  return guarded("scaler", [&] {
    double lo = -1.0, hi = 1.0;
    if (j.contains("range")) {
      lo = j.at("range").at(0).get<double>();
      hi = j.at("range").at(1).get<double>();
    }
    return MinMaxScaler(j.at("feature_names").get<std::vector<std::string>>(),
                        vector_from(j.at("min")), vector_from(j.at("max")), lo, hi);
  });
}

json to_json(const DataScaler& s) {
  json j = to_json(s.features);
  j["il_zero_normalized"] = s.il_zero_normalized();
  return j;
}

DataScaler data_scaler_from_json(const json& j) {
  DataScaler s{scaler_from_json(j)};
  if (s.features.names() != column_names())
    throw DataError("scaler: feature names do not match the dataset schema");
  return s;
}

json to_json(const MlpModel& m) {
  json weights = json::array();
  json biases = json::array();
  for (std::size_t l = 0; l < m.n_transforms(); ++l) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.weights[l].rows(); ++r)
      rows.push_back(vector_json(m.weights[l].row(r).transpose()));
    weights.push_back(std::move(rows));
    biases.push_back(vector_json(m.biases[l]));
  }
  json acts = json::array();
  for (auto a : m.activations) acts.push_back(to_string(a));
  return {{"layer_sizes", m.layer_sizes},
          {"activations", acts},
          {"output_activation", to_string(m.output_activation)},
          {"weights", weights},
          {"biases", biases}};
}

MlpModel mlp_from_json(const json& j) {
  return guarded("mlp", [&] {
    MlpModel m;
    m.layer_sizes = j.at("layer_sizes").get<std::vector<Eigen::Index>>();
    for (const auto& a : j.at("activations")) m.activations.push_back(parse_activation(a.get<std::string>()));
    m.output_activation = parse_output_activation(j.at("output_activation").get<std::string>());
    for (const auto& layer : j.at("weights")) {
      const auto rows = static_cast<Eigen::Index>(layer.size());
      const auto cols = rows ? static_cast<Eigen::Index>(layer.at(0).size()) : 0;
      MlpModel::Matrix w(rows, cols);
      for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = layer.at(static_cast<std::size_t>(r));
        if (static_cast<Eigen::Index>(row.size()) != cols) throw DataError("mlp: ragged weight rows");
        w.row(r) = vector_from(row).transpose();
      }
      m.weights.push_back(std::move(w));
    }
    for (const auto& b : j.at("biases")) m.biases.push_back(vector_from(b));
    m.validate();
    return m;
  });
}

json to_json(const PDeepONetModel& m) {
  return {{"branch", to_json(m.branch)},
          {"design_scaler", to_json(m.design_scaler)},
          {"coeff_scaler", to_json(m.coeff_scaler)},
          {"positivity_mode", to_string(m.positivity_mode)},
          {"fit_method", to_string(m.fit_method)}};
}

PDeepONetModel deeponet_from_json(const json& j) {
  return guarded("pdeeponet", [&] {
    PDeepONetModel m;
    m.branch = mlp_from_json(j.at("branch"));
    m.design_scaler = scaler_from_json(j.at("design_scaler"));
    m.coeff_scaler = scaler_from_json(j.at("coeff_scaler"));
    m.positivity_mode = parse_positivity_mode(j.at("positivity_mode").get<std::string>());
    m.fit_method = parse_fit_method(j.at("fit_method").get<std::string>());
    m.validate();
    return m;
  });
}

json to_json(const Surrogate& m) {
  json j;
  j["schema"] = "ilmodel/1";
  j["method"] = to_string(m.method);
  j["dataset"] = m.dataset_name;
  j["split"] = {{"train_fraction", m.split.train_fraction}, {"seed", m.split.seed}};
  j["config"] = {{"learning_rate", m.config.learning_rate},
                 {"epochs", m.config.epochs},
                 {"batch_size", m.config.batch_size},
                 {"seed", m.config.seed},
                 {"lambda_penalty", m.config.lambda_penalty},
                 {"adam_beta1", m.config.adam_beta1},
                 {"adam_beta2", m.config.adam_beta2},
                 {"adam_eps", m.config.adam_eps}};
  j["scaler"] = to_json(m.scaler);
  if (const auto* mlp = m.mlp()) {
    j["mlp"] = to_json(*mlp);
  } else {
    const auto& net = *m.deeponet();
    j["pdeeponet"] = to_json(net);
    j["provenance"] = {{"fit_method", to_string(net.fit_method)},
                       {"dataset", m.dataset_name},
                       {"split_seed", m.split.seed},
                       {"train_seed", m.config.seed}};
  }
  j["timing"] = {{"train_s", time_json(m.train_time)}};
  return j;
}

Surrogate surrogate_from_json(const json& j) {
  return guarded("model", [&] {
    if (j.value("schema", "") != "ilmodel/1") throw DataError("model: unsupported schema");
    Surrogate m;
    m.method = parse_method(j.at("method").get<std::string>());
    m.dataset_name = j.value("dataset", "");
    m.split.train_fraction = j.at("split").at("train_fraction").get<double>();
    m.split.seed = j.at("split").at("seed").get<std::uint64_t>();
    const auto& c = j.at("config");
    m.config.learning_rate = c.at("learning_rate").get<double>();
    m.config.epochs = c.at("epochs").get<std::size_t>();
    m.config.batch_size = c.at("batch_size").get<std::size_t>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    m.config.lambda_penalty = c.at("lambda_penalty").get<double>();
    m.config.adam_beta1 = c.at("adam_beta1").get<double>();
    m.config.adam_beta2 = c.at("adam_beta2").get<double>();
    m.config.adam_eps = c.at("adam_eps").get<double>();
    m.scaler = data_scaler_from_json(j.at("scaler"));
    if (m.method == Method::pdeeponet) {
      m.network = deeponet_from_json(j.at("pdeeponet"));
    } else {
      auto net = mlp_from_json(j.at("mlp"));
      if (net.input_size() != feature::kFrequency + 1 || net.output_size() != 1)
        throw DataError("model: NN must map 8 inputs to 1 output");
      m.network = std::move(net);
    }
    if (j.contains("timing")) m.train_time = time_from(j.at("timing").at("train_s"));
    return m;
  });
}

json to_json(const EvalReport& r) {
  return {{"schema", "evalreport/1"},
          {"method", to_string(r.method)},
          {"train_mse", r.train_mse},
          {"test_mse", r.test_mse},
          {"test_rmse_db", r.test_rmse_db},
          {"train_time_s", time_json(r.train_time)},
          {"infer_time_s", time_json(r.infer_time)},
          {"n_negative_predictions", r.n_negative},
          {"n_test_evaluations", r.n_evaluations},
          {"negative_rate", r.negative_rate},
          {"min_prediction_db", r.min_prediction_db}};
}

EvalReport report_from_json(const json& j) {
  return guarded("report", [&] {
    if (j.value("schema", "") != "evalreport/1") throw DataError("report: unsupported schema");
    EvalReport r;
    r.method = parse_method(j.at("method").get<std::string>());
    r.train_mse = j.at("train_mse").get<double>();
    r.test_mse = j.at("test_mse").get<double>();
    r.test_rmse_db = j.at("test_rmse_db").get<double>();
    r.train_time = time_from(j.at("train_time_s"));
    r.infer_time = time_from(j.at("infer_time_s"));
    r.n_negative = j.at("n_negative_predictions").get<std::size_t>();
    r.n_evaluations = j.at("n_test_evaluations").get<std::size_t>();
    r.negative_rate = j.at("negative_rate").get<double>();
    r.min_prediction_db = j.at("min_prediction_db").get<double>();
    return r;
  });
}

json without_timing(json j) {
  if (j.is_object()) {
    for (const char* key : {"timing", "train_time_s", "infer_time_s"}) j.erase(key);
    for (auto& [key, value] : j.items()) value = without_timing(value);
  } else if (j.is_array()) {
    for (auto& value : j) value = without_timing(value);
  }
  return j;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

void save_model(const Surrogate& m, const std::filesystem::path& path) { write_json(to_json(m), path); }

Surrogate load_model(const std::filesystem::path& path) {
  return surrogate_from_json(read_json(path));
}

void save_trace_csv(const TrainTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "epoch,total_loss,mse,penalty,seconds\n";
  for (std::size_t i = 0; i < trace.epochs.size(); ++i) {
    const auto& e = trace.epochs[i];
    out << i + 1 << ',' << format_double(e.total_loss) << ',' << format_double(e.mse) << ','
        << format_double(e.penalty) << ',' << format_double(e.seconds) << '\n';
  }
}

}  // namespace ilnet
