#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ilnet {

/// Geometry and material parameters of one interconnect design.
/// Lengths in mm; permittivity is relative, loss tangent dimensionless.
struct DesignParams {
  double via_pitch = 0.0;
  double via_radius = 0.0;
  double antipad_radius = 0.0;
  double cavity_height = 0.0;
  double trace_length = 0.0;
  double permittivity = 1.0;
  double loss_tangent = 0.0;

  static constexpr std::size_t kCount = 7;

  std::array<double, kCount> as_array() const {
    return {via_pitch,    via_radius,   antipad_radius, cavity_height,
            trace_length, permittivity, loss_tangent};
  }
  static DesignParams from_array(const std::array<double, kCount>& v);

  /// Empty string when valid, otherwise a description of the first violation.
  std::string validate() const;

  friend bool operator==(const DesignParams&, const DesignParams&) = default;
};

struct Sample {
  DesignParams params;
  double frequency = 0.0;       // GHz
  double insertion_loss = 0.0;  // dB
};

struct Dataset {
  std::string name;
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

/// Feature indices in the canonical column order.
namespace feature {
inline constexpr Eigen::Index kFrequency = 7;
inline constexpr Eigen::Index kInsertionLoss = 8;
inline constexpr Eigen::Index kCount = 9;
}  // namespace feature

/// Canonical CSV header names, design parameters first, label last.
const std::vector<std::string>& column_names();
const std::vector<std::string>& design_column_names();

/// 9 x N matrix, one column per sample, rows in canonical column order.
Eigen::MatrixXd feature_matrix(const Dataset& data);

Dataset load_csv(const std::filesystem::path& path);
void save_csv(const Dataset& data, const std::filesystem::path& path);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);
/// Strict parse of a full token (scientific notation accepted).
bool parse_double(std::string_view token, double& out);

// ---------------------------------------------------------------------------
// Normalization

/// Per-feature affine map of [min, max] onto [lo, hi] (default [-1, 1]).
class MinMaxScaler {
 public:
  MinMaxScaler() = default;
  MinMaxScaler(std::vector<std::string> names, Eigen::VectorXd min,
               Eigen::VectorXd max, double lo = -1.0, double hi = 1.0);

  /// Fits on the rows of `columns` (features x samples). Rejects any constant
  /// feature, naming it.
  static MinMaxScaler fit(std::vector<std::string> names,
                          const Eigen::Ref<const Eigen::MatrixXd>& columns);

  Eigen::Index size() const { return min_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const Eigen::VectorXd& min() const { return min_; }
  const Eigen::VectorXd& max() const { return max_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  double transform(Eigen::Index feature, double x) const {
    return lo_ + (hi_ - lo_) * (x - min_[feature]) / (max_[feature] - min_[feature]);
  }
  double inverse(Eigen::Index feature, double t) const {
    return min_[feature] + (t - lo_) * (max_[feature] - min_[feature]) / (hi_ - lo_);
  }

  /// Applies the map column by column; `columns` must have size() rows, or
  /// fewer, in which case the leading features are used.
  Eigen::MatrixXd transform(const Eigen::Ref<const Eigen::MatrixXd>& columns) const;
  Eigen::MatrixXd inverse(const Eigen::Ref<const Eigen::MatrixXd>& columns) const;

  friend bool operator==(const MinMaxScaler& a, const MinMaxScaler& b) {
    return a.names_ == b.names_ && a.min_ == b.min_ && a.max_ == b.max_ &&
           a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

 private:
  std::vector<std::string> names_;
  Eigen::VectorXd min_;
  Eigen::VectorXd max_;
  double lo_ = -1.0;
  double hi_ = 1.0;
};

/// Scaler over the 9 canonical features, plus the normalized image of 0 dB.
struct DataScaler {
  MinMaxScaler features;

  double il_zero_normalized() const {
    return features.transform(feature::kInsertionLoss, 0.0);
  }
  double normalize_il(double db) const {
    return features.transform(feature::kInsertionLoss, db);
  }
  double denormalize_il(double t) const {
    return features.inverse(feature::kInsertionLoss, t);
  }

  friend bool operator==(const DataScaler&, const DataScaler&) = default;
};

DataScaler fit_scaler(const Dataset& data);

// ---------------------------------------------------------------------------
// Splitting and grouping

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

struct SplitResult {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

/// Seeded shuffle of row indices, then prefix cut at round(fraction * N).
SplitResult split(const Dataset& data, const SplitSpec& spec);

struct CurvePoint {
  double frequency;
  double insertion_loss;
};

/// One frequency sweep of a single design; frequencies strictly increasing.
struct CurveGroup {
  DesignParams params;
  std::vector<CurvePoint> points;
};

struct GroupingResult {
  std::vector<CurveGroup> groups;
  std::vector<std::string> warnings;
};

inline constexpr std::size_t kMinCurvePoints = 4;

/// Groups rows by bit-identical design parameters. Groups are ordered by
/// design key, so the result does not depend on row order.
GroupingResult group_curves(const Dataset& data);

// ---------------------------------------------------------------------------
// Synthetic data

/// Uniform sampling ranges for the synthetic generator (mm unless noted).
struct DesignRanges {
  std::array<double, 2> via_pitch{0.8, 1.6};
  std::array<double, 2> via_radius{0.075, 0.2};
  std::array<double, 2> antipad_radius{0.25, 0.45};
  std::array<double, 2> cavity_height{0.1, 0.5};
  std::array<double, 2> trace_length{10.0, 100.0};
  std::array<double, 2> permittivity{3.0, 4.5};
  std::array<double, 2> loss_tangent{0.002, 0.02};
};

/// Loss constants of the synthetic curve
///   IL(f) = L * (k_c sqrt(f) + k_d sqrt(er) tan_d f) + k_v h (r_via / r_anti) f^2
/// with f in GHz and lengths in mm.
struct LossConstants {
  double conductor = 0.002;   // k_c, dB / (mm sqrt(GHz))
  double dielectric = 0.091;  // k_d, dB / (mm GHz); 27.3 / (c in mm/ns)
  double via = 0.01;          // k_v, dB / (mm GHz^2)
};

struct SyntheticConfig {
  std::size_t n_designs = 1;
  std::vector<double> frequencies;
  std::uint64_t seed = 0;
  double noise_sd = 0.0;  // dB
  DesignRanges ranges{};
  LossConstants constants{};
};

/// Noise-free insertion loss of the synthetic model.
double synthetic_insertion_loss(const DesignParams& p, double frequency,
                                const LossConstants& k);

Dataset generate_synthetic(const SyntheticConfig& config);

/// Linear grid with inclusive endpoints; count == 1 yields {start}.
std::vector<double> linear_grid(double start, double stop, std::size_t count);

}  // namespace ilnet
