#include "ilnet/data.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "ilnet/errors.hpp"

namespace ilnet {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

DesignParams DesignParams::from_array(const std::array<double, kCount>& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
}

std::string DesignParams::validate() const {
  const auto values = as_array();
  for (std::size_t i = 0; i < 5; ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      return design_column_names()[i] + " must be a positive length";
  }
  if (!(permittivity >= 1.0) || !std::isfinite(permittivity))
    return "permittivity must be >= 1";
  if (!(loss_tangent >= 0.0) || !std::isfinite(loss_tangent))
    return "loss_tangent must be >= 0";
  return {};
}

const std::vector<std::string>& column_names() {
  static const std::vector<std::string> names{
      "via_pitch_mm",     "via_radius_mm",   "antipad_radius_mm",
      "cavity_height_mm", "trace_length_mm", "permittivity",
      "loss_tangent",     "frequency_ghz",   "insertion_loss_db"};
  return names;
}

const std::vector<std::string>& design_column_names() {
  static const std::vector<std::string> names(column_names().begin(),
                                              column_names().begin() + 7);
  return names;
}

Eigen::MatrixXd feature_matrix(const Dataset& data) {
  Eigen::MatrixXd m(feature::kCount, static_cast<Eigen::Index>(data.size()));
  for (std::size_t j = 0; j < data.size(); ++j) {
    const auto& s = data.samples[j];
    const auto p = s.params.as_array();
    const auto col = static_cast<Eigen::Index>(j);
    for (std::size_t i = 0; i < p.size(); ++i) m(static_cast<Eigen::Index>(i), col) = p[i];
    m(feature::kFrequency, col) = s.frequency;
    m(feature::kInsertionLoss, col) = s.insertion_loss;
  }
  return m;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

bool parse_double(std::string_view token, double& out) {
  token = trim(token);
  if (token.empty()) return false;
  if (token.front() == '+') token.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size() && std::isfinite(out);
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = split_line(line);
  const auto& expected = column_names();
  for (std::size_t c = 0; c < std::max(header.size(), expected.size()); ++c) {
    if (c >= header.size())
      throw DataError(path.string() + ": missing column '" + expected[c] + "' at column " +
                      std::to_string(c + 1));
    if (c >= expected.size())
      throw DataError(path.string() + ": extra column '" + std::string(trim(header[c])) +
                      "' at column " + std::to_string(c + 1));
    if (trim(header[c]) != expected[c])
      throw DataError(path.string() + ": column " + std::to_string(c + 1) + " is '" +
                      std::string(trim(header[c])) + "', expected '" + expected[c] + "'");
  }

  Dataset data;
  data.name = path.stem().string();
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != expected.size())
      throw DataError(path.string() + ": row " + std::to_string(row) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(expected.size()));
    std::array<double, 9> v{};
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_double(cells[c], v[c]))
        throw DataError(path.string() + ": non-numeric cell at row " + std::to_string(row) +
                        ", column " + std::to_string(c + 1) + " (" + expected[c] + ")");
    }
    Sample s;
    s.params = DesignParams{v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
    s.frequency = v[7];
    s.insertion_loss = v[8];
    if (auto why = s.params.validate(); !why.empty())
      throw DataError(path.string() + ": invalid design at row " + std::to_string(row) +
                      ": " + why);
    if (s.frequency < 0.0)
      throw DataError(path.string() + ": negative frequency at row " + std::to_string(row));
    if (s.insertion_loss < 0.0)
      throw DataError(path.string() + ": negative label at row " + std::to_string(row));
    data.samples.push_back(s);
  }
  if (data.empty()) throw DataError(path.string() + ": empty file (no data rows)");
  return data;
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  const auto& names = column_names();
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
  for (const auto& s : data.samples) {
    for (double v : s.params.as_array()) out << format_double(v) << ',';
    out << format_double(s.frequency) << ',' << format_double(s.insertion_loss) << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

// ---------------------------------------------------------------------------

MinMaxScaler::MinMaxScaler(std::vector<std::string> names, Eigen::VectorXd min,
                           Eigen::VectorXd max, double lo, double hi)
    : names_(std::move(names)), min_(std::move(min)), max_(std::move(max)), lo_(lo), hi_(hi) {
  if (min_.size() != max_.size() || static_cast<std::size_t>(min_.size()) != names_.size())
    throw DataError("scaler: names/min/max sizes differ");
  if (!(hi_ > lo_)) throw DataError("scaler: target range must have hi > lo");
  for (Eigen::Index i = 0; i < min_.size(); ++i) {
    if (!(max_[i] > min_[i]))
      throw DataError("scaler: feature '" + names_[static_cast<std::size_t>(i)] +
                      "' is constant (max == min)");
  }
}

MinMaxScaler MinMaxScaler::fit(std::vector<std::string> names,
                               const Eigen::Ref<const Eigen::MatrixXd>& columns) {
  if (columns.cols() == 0) throw DataError("scaler: cannot fit on an empty dataset");
  if (static_cast<std::size_t>(columns.rows()) != names.size())
    throw DataError("scaler: feature count does not match names");
  Eigen::VectorXd lo = columns.rowwise().minCoeff();
  Eigen::VectorXd hi = columns.rowwise().maxCoeff();
  return MinMaxScaler(std::move(names), std::move(lo), std::move(hi));
}

Eigen::MatrixXd MinMaxScaler::transform(const Eigen::Ref<const Eigen::MatrixXd>& columns) const {
  if (columns.rows() > size()) throw DataError("scaler: too many feature rows");
  Eigen::MatrixXd out(columns.rows(), columns.cols());
  for (Eigen::Index i = 0; i < columns.rows(); ++i)
    for (Eigen::Index j = 0; j < columns.cols(); ++j) out(i, j) = transform(i, columns(i, j));
  return out;
}

Eigen::MatrixXd MinMaxScaler::inverse(const Eigen::Ref<const Eigen::MatrixXd>& columns) const {
  if (columns.rows() > size()) throw DataError("scaler: too many feature rows");
  Eigen::MatrixXd out(columns.rows(), columns.cols());
  for (Eigen::Index i = 0; i < columns.rows(); ++i)
    for (Eigen::Index j = 0; j < columns.cols(); ++j) out(i, j) = inverse(i, columns(i, j));
  return out;
}

DataScaler fit_scaler(const Dataset& data) {
  if (data.empty()) throw DataError("fit_scaler: empty dataset");
  return DataScaler{MinMaxScaler::fit(column_names(), feature_matrix(data))};
}

// ---------------------------------------------------------------------------

SplitResult split(const Dataset& data, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw UsageError("split: train fraction must lie in (0, 1)");
  const std::size_t n = data.size();
  const auto n_train = static_cast<std::size_t>(std::llround(spec.train_fraction * n));
  if (n_train < 1) throw UsageError("split: training set would be empty");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(spec.seed);
  std::shuffle(order.begin(), order.end(), rng);

  SplitResult out;
  out.train.name = data.name + ".train";
  out.test.name = data.name + ".test";
  out.train_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.test_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  out.train.samples.reserve(out.train_indices.size());
  out.test.samples.reserve(out.test_indices.size());
  for (auto i : out.train_indices) out.train.samples.push_back(data.samples[i]);
  for (auto i : out.test_indices) out.test.samples.push_back(data.samples[i]);
  return out;
}

GroupingResult group_curves(const Dataset& data) {
  using Key = std::array<std::uint64_t, DesignParams::kCount>;
  // Bit patterns of positive doubles order the same way as their values.
  std::map<Key, std::vector<std::size_t>> rows_by_design;
  for (std::size_t i = 0; i < data.size(); ++i) {
    Key key{};
    const auto p = data.samples[i].params.as_array();
    for (std::size_t k = 0; k < p.size(); ++k) key[k] = std::bit_cast<std::uint64_t>(p[k]);
    rows_by_design[key].push_back(i);
  }

  GroupingResult out;
  std::size_t design_index = 0;
  for (const auto& [key, rows] : rows_by_design) {
    CurveGroup g;
    g.params = data.samples[rows.front()].params;
    g.points.reserve(rows.size());
    for (auto r : rows)
      g.points.push_back({data.samples[r].frequency, data.samples[r].insertion_loss});
    std::sort(g.points.begin(), g.points.end(), [](const CurvePoint& a, const CurvePoint& b) {
      return a.frequency < b.frequency ||
             (a.frequency == b.frequency && a.insertion_loss < b.insertion_loss);
    });

    const bool repeated = std::adjacent_find(g.points.begin(), g.points.end(),
                                             [](const CurvePoint& a, const CurvePoint& b) {
                                               return a.frequency == b.frequency;
                                             }) != g.points.end();
    if (repeated) {
      out.warnings.push_back("design " + std::to_string(design_index) +
                             ": repeated frequency, curve excluded");
    } else if (g.points.size() < kMinCurvePoints) {
      out.warnings.push_back("design " + std::to_string(design_index) + ": only " +
                             std::to_string(g.points.size()) + " point(s), curve excluded");
    } else {
      out.groups.push_back(std::move(g));
    }
    ++design_index;
  }
  return out;
}

// ---------------------------------------------------------------------------

double synthetic_insertion_loss(const DesignParams& p, double f, const LossConstants& k) {
  const double line = p.trace_length * (k.conductor * std::sqrt(f) +
                                        k.dielectric * std::sqrt(p.permittivity) *
                                            p.loss_tangent * f);
  const double via = k.via * p.cavity_height * (p.via_radius / p.antipad_radius) * f * f;
  return line + via;
}

Dataset generate_synthetic(const SyntheticConfig& config) {
  if (config.n_designs < 1) throw UsageError("generate_synthetic: need at least one design");
  if (config.frequencies.empty()) throw UsageError("generate_synthetic: empty frequency list");
  for (double f : config.frequencies)
    if (!(f >= 0.0) || !std::isfinite(f))
      throw UsageError("generate_synthetic: negative frequency " + format_double(f));
  if (!(config.noise_sd >= 0.0)) throw UsageError("generate_synthetic: noise_sd must be >= 0");

  std::mt19937_64 rng(config.seed);
  auto draw = [&rng](const std::array<double, 2>& r) {
    return std::uniform_real_distribution<double>(r[0], r[1])(rng);
  };
  std::normal_distribution<double> noise(0.0, 1.0);

  Dataset data;
  data.name = "synthetic-seed" + std::to_string(config.seed);
  data.samples.reserve(config.n_designs * config.frequencies.size());
  const auto& r = config.ranges;
  for (std::size_t d = 0; d < config.n_designs; ++d) {
    DesignParams p;
    p.via_pitch = draw(r.via_pitch);
    p.via_radius = draw(r.via_radius);
    p.antipad_radius = draw(r.antipad_radius);
    p.cavity_height = draw(r.cavity_height);
    p.trace_length = draw(r.trace_length);
    p.permittivity = draw(r.permittivity);
    p.loss_tangent = draw(r.loss_tangent);
    for (double f : config.frequencies) {
      double il = synthetic_insertion_loss(p, f, config.constants);
      // Draw unconditionally so the stream layout does not depend on noise_sd.
      const double z = noise(rng);
      if (config.noise_sd > 0.0) il = std::max(0.0, il + config.noise_sd * z);
      data.samples.push_back({p, f, il});
    }
  }
  return data;
}

std::vector<double> linear_grid(double start, double stop, std::size_t count) {
  if (count == 0) throw UsageError("frequency grid: count must be >= 1");
  if (count == 1) return {start};
  std::vector<double> grid(count);
  const double step = (stop - start) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) grid[i] = start + step * static_cast<double>(i);
  grid.back() = stop;
  return grid;
}

}  // namespace ilnet
