#include "ilnet/polynomial.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/QR>

#include "ilnet/nnls.hpp"

namespace ilnet {

std::string to_string(FitMethod m) { return m == FitMethod::ols ? "ols" : "nnls"; }

FitMethod parse_fit_method(const std::string& tag) {
  if (tag == "ols") return FitMethod::ols;
  if (tag == "nnls") return FitMethod::nnls;
  throw UsageError("unknown fit method '" + tag + "' (expected ols or nnls)");
}

namespace {

void check_curve(const CurveGroup& curve) {
  if (curve.points.size() < kMinCurvePoints)
    throw DataError("fit: curve has " + std::to_string(curve.points.size()) +
                    " points, need at least " + std::to_string(kMinCurvePoints));
}

Eigen::VectorXd targets(const CurveGroup& curve) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(curve.points.size()));
  for (std::size_t i = 0; i < curve.points.size(); ++i)
    y[static_cast<Eigen::Index>(i)] = curve.points[i].insertion_loss;
  return y;
}

PolyFitReport make_report(const CurveGroup& curve, const PolyCoeffs& k, FitMethod method) {
  PolyFitReport r;
  r.coeffs = k;
  r.method = method;
  r.n_points = curve.points.size();
  double sum_sq = 0.0;
  for (const auto& p : curve.points) {
    const double e = p.insertion_loss - eval_poly(k, p.frequency);
    r.max_abs_residual = std::max(r.max_abs_residual, std::abs(e));
    sum_sq += e * e;
  }
  r.rms_residual = std::sqrt(sum_sq / static_cast<double>(r.n_points));
  return r;
}

Eigen::Vector3d column_scale(const Eigen::MatrixXd& x) {
  Eigen::Vector3d scale = x.colwise().norm().transpose();
  if ((scale.array() == 0.0).any())
    throw DataError("fit: rank-deficient design (all frequencies zero)");
  return scale;
}

// QR of the unit-norm-column design; unit columns keep the rank decision
// independent of frequency units.
Eigen::ColPivHouseholderQR<Eigen::MatrixXd> factorize(const Eigen::MatrixXd& x,
                                                      const Eigen::Vector3d& scale) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x.rows(), x.cols());
  qr.setThreshold(1e-12);
  qr.compute(x * scale.cwiseInverse().asDiagonal());
  if (qr.rank() < 3)
    throw DataError("fit: rank-deficient design (need at least 3 distinct non-zero frequencies)");
  return qr;
}

}  // namespace

Eigen::MatrixXd design_matrix(const CurveGroup& curve) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(curve.points.size()), 3);
  for (std::size_t i = 0; i < curve.points.size(); ++i)
    x.row(static_cast<Eigen::Index>(i)) = power_series(curve.points[i].frequency).transpose();
  return x;
}

PolyFitReport fit_ols(const CurveGroup& curve) {
  check_curve(curve);
  const Eigen::MatrixXd x = design_matrix(curve);
  const Eigen::Vector3d scale = column_scale(x);
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr = factorize(x, scale);
  const Eigen::Vector3d k = qr.solve(targets(curve)).cwiseQuotient(scale);
  return make_report(curve, {k[0], k[1], k[2]}, FitMethod::ols);
}

PolyFitReport fit_nnls(const CurveGroup& curve) {
  check_curve(curve);
  const Eigen::MatrixXd x = design_matrix(curve);
  // Same admissibility rule as OLS so both methods accept the same curves.
  factorize(x, column_scale(x));
  const auto sol = nnls(x, targets(curve));
  return make_report(curve, {sol.x[0], sol.x[1], sol.x[2]}, FitMethod::nnls);
}

PolyFitReport fit_curve(const CurveGroup& curve, FitMethod method) {
  return method == FitMethod::ols ? fit_ols(curve) : fit_nnls(curve);
}

FitAllResult fit_all(const Dataset& data, FitMethod method, double warn_threshold_db) {
  auto grouped = group_curves(data);
  FitAllResult out;
  out.warnings = std::move(grouped.warnings);
  if (grouped.groups.empty()) throw DataError("no fittable curves");
  for (std::size_t i = 0; i < grouped.groups.size(); ++i) {
    const auto& g = grouped.groups[i];
    try {
      auto report = fit_curve(g, method);
      if (report.max_abs_residual > warn_threshold_db) {
        std::ostringstream msg;
        msg << "curve " << i << ": max residual " << report.max_abs_residual
            << " dB exceeds " << warn_threshold_db << " dB";
        out.warnings.push_back(msg.str());
      }
      out.max_epsilon = std::max(out.max_epsilon, report.max_abs_residual);
      out.fits.push_back({g.params, report});
    } catch (const std::exception& e) {
      out.failures.push_back("curve " + std::to_string(i) + ": " + e.what());
    }
  }
  if (out.fits.empty()) throw DataError("no fittable curves");
  return out;
}

const std::vector<std::string>& coefficient_column_names() {
  static const std::vector<std::string> names = [] {
    auto n = design_column_names();
    for (const char* extra : {"a", "b", "c", "max_abs_residual_db"}) n.emplace_back(extra);
    return n;
  }();
  return names;
}

void save_coefficients_csv(const std::vector<CurveFit>& fits, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  const auto& names = coefficient_column_names();
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
  for (const auto& f : fits) {
    for (double v : f.params.as_array()) out << format_double(v) << ',';
    const auto& k = f.report.coeffs;
    out << format_double(k.a) << ',' << format_double(k.b) << ',' << format_double(k.c) << ','
        << format_double(f.report.max_abs_residual) << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<CurveFit> load_coefficients_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
  std::string expected;
  for (const auto& n : coefficient_column_names()) expected += (expected.empty() ? "" : ",") + n;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected) throw DataError(path.string() + ": unexpected coefficient header");

  std::vector<CurveFit> fits;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::istringstream cells(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(cells, cell, ',')) {
      double d = 0.0;
      if (!parse_double(cell, d))
        throw DataError(path.string() + ": non-numeric cell at row " + std::to_string(row) +
                        ", column " + std::to_string(v.size() + 1));
      v.push_back(d);
    }
    if (v.size() != coefficient_column_names().size())
      throw DataError(path.string() + ": wrong cell count at row " + std::to_string(row));
    CurveFit f;
    f.params = DesignParams{v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
    f.report.coeffs = {v[7], v[8], v[9]};
    f.report.max_abs_residual = v[10];
    fits.push_back(f);
  }
  return fits;
}

}  // namespace ilnet
