#include "ilnet/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "ilnet/physics_loss.hpp"
#include "ilnet/serialization.hpp"

namespace ilnet {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

int method_rank(Method m) {
  switch (m) {
    case Method::nn: return 0;
    case Method::pdnn: return 1;
    case Method::pdeeponet: return 2;
  }
  return 3;
}

std::string printf_string(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string format_mse(double v) {
  return (v >= 1e-3 || v == 0.0) ? printf_string("%.4f", v) : printf_string("%.3e", v);
}

int infer_decimals(const TimeSplit& t) { return t.total() >= 1e-3 ? 3 : 6; }

std::string csv_time(const TimeSplit& t) {
  return t.two_part() ? format_double(t.first) + "+" + format_double(*t.second)
                      : format_double(t.first);
}

TimeSplit parse_csv_time(const std::string& cell) {
  const auto plus = cell.find('+', 1);
  TimeSplit t;
  double v = 0.0;
  if (plus == std::string::npos) {
    if (!parse_double(cell, v)) throw DataError("comparison CSV: bad time '" + cell + "'");
    t.first = v;
    return t;
  }
  double w = 0.0;
  if (!parse_double(cell.substr(0, plus), v) || !parse_double(cell.substr(plus + 1), w))
    throw DataError("comparison CSV: bad two-part time '" + cell + "'");
  t.first = v;
  t.second = w;
  return t;
}

}  // namespace

double normalized_mse(const DataScaler& scaler, const std::vector<double>& predictions_db,
                      const Dataset& data) {
  if (predictions_db.size() != data.size())
    throw DataError("normalized_mse: prediction count does not match data");
  Eigen::VectorXd p(static_cast<Eigen::Index>(data.size()));
  Eigen::VectorXd t(p.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    p[static_cast<Eigen::Index>(i)] = scaler.normalize_il(predictions_db[i]);
    t[static_cast<Eigen::Index>(i)] = scaler.normalize_il(data.samples[i].insertion_loss);
  }
  return mse(p, t);
}

EvalReport evaluate(const Surrogate& model, const Dataset& train, const Dataset& test,
                    const DataScaler& scaler) {
  if (scaler.features.names() != model.scaler.features.names())
    throw DataError("evaluate: scaler feature names differ from the model's training scaler");
  if (test.empty()) throw DataError("evaluate: empty test set");

  EvalReport r;
  r.method = model.method;
  r.train_time = model.train_time;
  if (!train.empty()) r.train_mse = normalized_mse(scaler, predict_db(model, train), train);

  std::vector<double> pred;
  if (const auto* net = model.deeponet()) {
    // Two-part inference: branch network, then the polynomial trunk.
    const auto t0 = Clock::now();
    std::vector<DesignParams> designs;
    designs.reserve(test.size());
    for (const auto& s : test.samples) designs.push_back(s.params);
    const auto coeffs = predict_coefficients(*net, designs);
    const double branch_s = seconds_since(t0);
    const auto t1 = Clock::now();
    pred.resize(test.size());
    for (std::size_t i = 0; i < test.size(); ++i)
      pred[i] = eval_poly(coeffs[i], test.samples[i].frequency);
    r.infer_time = {branch_s, seconds_since(t1)};
  } else {
    const auto t0 = Clock::now();
    pred = predict_db(model, test);
    r.infer_time = {seconds_since(t0), std::nullopt};
  }

  r.test_mse = normalized_mse(scaler, pred, test);
  r.n_evaluations = pred.size();
  r.min_prediction_db = std::numeric_limits<double>::infinity();
  double sq = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] < 0.0) ++r.n_negative;
    r.min_prediction_db = std::min(r.min_prediction_db, pred[i]);
    const double e = pred[i] - test.samples[i].insertion_loss;
    sq += e * e;
  }
  r.test_rmse_db = std::sqrt(sq / static_cast<double>(pred.size()));
  r.negative_rate = static_cast<double>(r.n_negative) / static_cast<double>(r.n_evaluations);
  return r;
}

EvalReport evaluate(const Surrogate& model, const Dataset& data) {
  const auto parts = split(data, model.split);
  return evaluate(model, parts.train, parts.test, model.scaler);
}

std::string format_time(const TimeSplit& t, int decimals) {
  const double scale = std::pow(10.0, decimals);
  auto rounded = [scale](double v) { return std::round(v * scale) / scale; };
  const std::string fmt = "%." + std::to_string(decimals) + "f";
  if (!t.two_part()) return printf_string(fmt.c_str(), t.first);
  const double a = rounded(t.first);
  const double b = rounded(*t.second);
  return printf_string(fmt.c_str(), a) + "+" + printf_string(fmt.c_str(), b) + " = " +
         printf_string(fmt.c_str(), a + b);
}

const std::string& comparison_csv_header() {
  static const std::string header =
      "method,train_mse,train_time_s,test_mse,infer_time_s,n_negative,negative_rate,"
      "min_prediction_db";
  return header;
}

Comparison compare(std::vector<EvalReport> reports) {
  if (reports.empty()) throw UsageError("compare: need at least one report");
  std::stable_sort(reports.begin(), reports.end(), [](const EvalReport& a, const EvalReport& b) {
    return method_rank(a.method) < method_rank(b.method);
  });

  Comparison out;

  // Text table: training and test blocks as in the published comparison,
  // followed by the positivity audit.
  std::vector<std::vector<std::string>> cells{{"Method", "Train MSE", "Train time (s)",
                                               "Test MSE", "Test time (s)", "Negatives",
                                               "Negative rate", "Min pred (dB)"}};
  for (const auto& r : reports) {
    cells.push_back({display_name(r.method), format_mse(r.train_mse), format_time(r.train_time, 2),
                     format_mse(r.test_mse), format_time(r.infer_time, infer_decimals(r.infer_time)),
                     std::to_string(r.n_negative) + "/" + std::to_string(r.n_evaluations),
                     printf_string("%.4f", r.negative_rate),
                     printf_string("%.4f", r.min_prediction_db)});
  }
  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::ostringstream text;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      text << (c ? " | " : "") << cells[r][c]
           << std::string(width[c] - cells[r][c].size(), ' ');
    }
    text << '\n';
    if (r == 0) {
      for (std::size_t c = 0; c < width.size(); ++c)
        text << (c ? "-+-" : "") << std::string(width[c], '-');
      text << '\n';
    }
  }
  out.text = text.str();

  std::ostringstream csv;
  csv << comparison_csv_header() << '\n';
  for (const auto& r : reports) {
    csv << to_string(r.method) << ',' << format_double(r.train_mse) << ',' << csv_time(r.train_time)
        << ',' << format_double(r.test_mse) << ',' << csv_time(r.infer_time) << ','
        << r.n_negative << ',' << format_double(r.negative_rate) << ','
        << format_double(r.min_prediction_db) << '\n';
  }
  out.csv = csv.str();

  nlohmann::json j;
  j["schema"] = "comparison/1";
  j["reports"] = nlohmann::json::array();
  for (const auto& r : reports) j["reports"].push_back(to_json(r));
  out.json = j.dump(2) + "\n";
  return out;
}

std::vector<EvalReport> parse_comparison_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != comparison_csv_header())
    throw DataError("comparison CSV: unexpected header");
  std::vector<EvalReport> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) f.push_back(cell);
    if (f.size() != 8) throw DataError("comparison CSV: expected 8 fields");
    EvalReport r;
    r.method = parse_method(f[0]);
    double n_neg = 0.0;
    if (!parse_double(f[1], r.train_mse) || !parse_double(f[3], r.test_mse) ||
        !parse_double(f[5], n_neg) || !parse_double(f[6], r.negative_rate) ||
        !parse_double(f[7], r.min_prediction_db))
      throw DataError("comparison CSV: non-numeric field");
    r.train_time = parse_csv_time(f[2]);
    r.infer_time = parse_csv_time(f[4]);
    r.n_negative = static_cast<std::size_t>(n_neg);
    out.push_back(r);
  }
  return out;
}

std::size_t FrequencyProfile::violations() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const ProfileRow& r) { return r.violation; }));
}

std::string FrequencyProfile::to_csv() const {
  std::ostringstream out;
  out << "frequency_ghz,prediction_db" << (has_truth ? ",truth_db" : "") << ",violation\n";
  for (const auto& r : rows) {
    out << format_double(r.frequency) << ',' << format_double(r.prediction_db);
    if (has_truth) out << ',' << (r.truth_db ? format_double(*r.truth_db) : "");
    out << ',' << (r.violation ? 1 : 0) << '\n';
  }
  return out.str();
}

FrequencyProfile frequency_profile(const Surrogate& model, const DesignParams& design,
                                   const std::vector<double>& frequencies,
                                   const std::optional<CurveGroup>& truth) {
  Dataset probe;
  probe.samples.reserve(frequencies.size());
  for (double f : frequencies) {
    if (!(f >= 0.0)) throw DataError("frequency_profile: frequencies must be >= 0");
    probe.samples.push_back({design, f, 0.0});
  }
  const auto pred = predict_db(model, probe);
  FrequencyProfile out;
  out.has_truth = truth.has_value();
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    ProfileRow row;
    row.frequency = frequencies[i];
    row.prediction_db = pred[i];
    row.violation = pred[i] < 0.0;
    if (truth) {
      for (const auto& p : truth->points)
        if (p.frequency == frequencies[i]) row.truth_db = p.insertion_loss;
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace ilnet
