// Command-line front end: data generation, training, evaluation and the
// three-way comparison. Exit codes: 0 ok, 1 usage, 2 data, 3 numerical.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "ilnet/benchmark.hpp"
#include "ilnet/data.hpp"
#include "ilnet/errors.hpp"
#include "ilnet/evaluation.hpp"
#include "ilnet/polynomial.hpp"
#include "ilnet/serialization.hpp"
#include "ilnet/surrogate.hpp"

namespace fs = std::filesystem;
using namespace ilnet;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream in(spec);
  std::string p;
  while (std::getline(in, p, ':')) parts.push_back(p);
  double start = 0, stop = 0, count = 0;
  if (parts.size() != 3 || !parse_double(parts[0], start) || !parse_double(parts[1], stop) ||
      !parse_double(parts[2], count) || count < 1 || count != std::floor(count))
    throw UsageError("--freqs expects start:stop:count, got '" + spec + "'");
  if (start < 0 || stop < 0) throw UsageError("--freqs: frequencies must be >= 0");
  return linear_grid(start, stop, static_cast<std::size_t>(count));
}

std::vector<Eigen::Index> parse_sizes(const std::string& spec) {
  std::vector<Eigen::Index> sizes;
  std::stringstream in(spec);
  std::string p;
  while (std::getline(in, p, ',')) {
    double v = 0;
    if (!parse_double(p, v) || v < 1 || v != std::floor(v))
      throw UsageError("--hidden expects comma-separated positive integers");
    sizes.push_back(static_cast<Eigen::Index>(v));
  }
  if (sizes.empty()) throw UsageError("--hidden: need at least one layer");
  return sizes;
}

void report_lines(const char* prefix, const std::vector<std::string>& lines) {
  constexpr std::size_t kShown = 5;
  for (std::size_t i = 0; i < std::min(lines.size(), kShown); ++i)
    std::cerr << prefix << lines[i] << "\n";
  if (lines.size() > kShown)
    std::cerr << prefix << "... " << lines.size() - kShown << " more\n";
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << text;
}

struct DesignFlags {
  DesignParams p;
  void attach(CLI::App* cmd, bool required) {
    auto add = [&](const char* name, double& v, const char* help) {
      auto* o = cmd->add_option(name, v, help);
      if (required) o->required();
    };
    add("--via-pitch", p.via_pitch, "via pitch (mm)");
    add("--via-radius", p.via_radius, "via radius (mm)");
    add("--antipad-radius", p.antipad_radius, "antipad radius (mm)");
    add("--cavity-height", p.cavity_height, "cavity height (mm)");
    add("--trace-length", p.trace_length, "trace length (mm)");
    add("--permittivity", p.permittivity, "relative permittivity");
    add("--loss-tangent", p.loss_tangent, "loss tangent");
  }
  DesignParams checked() const {
    if (auto why = p.validate(); !why.empty()) throw UsageError("invalid design: " + why);
    return p;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physics-constrained insertion-loss surrogates"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "write a synthetic dataset CSV");
  std::size_t gen_designs = 190;
  std::string gen_freqs = "0.1:40:37";
  std::uint64_t gen_seed = 7;
  double gen_noise = kDefaultNoiseSd;
  std::string gen_out;
  gen->add_option("--designs", gen_designs, "number of designs")->capture_default_str();
  gen->add_option("--freqs", gen_freqs, "frequency grid start:stop:count (GHz)")
      ->capture_default_str();
  gen->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
  gen->add_option("--noise", gen_noise, "label noise standard deviation (dB)")
      ->capture_default_str();
  gen->add_option("-o,--output", gen_out, "output CSV")->required();

  // train
  auto* tr = app.add_subcommand("train", "train nn, pdnn or pdeeponet");
  std::string tr_data, tr_method, tr_out, tr_trace, tr_fit = "nnls",
                                                    tr_pos = "softplus_head", tr_hidden;
  std::optional<double> tr_lambda, tr_lr;
  std::optional<std::size_t> tr_epochs, tr_batch;
  std::uint64_t tr_seed = 0, tr_split_seed = 0;
  double tr_fraction = 0.8;
  tr->add_option("--data", tr_data, "dataset CSV")->required();
  tr->add_option("--method", tr_method, "nn | pdnn | pdeeponet")->required();
  tr->add_option("--lambda", tr_lambda, "penalty weight (pdnn, default 1.0)");
  tr->add_option("--epochs", tr_epochs, "training epochs");
  tr->add_option("--lr", tr_lr, "Adam learning rate (default 1e-3)");
  tr->add_option("--batch", tr_batch, "mini-batch size");
  tr->add_option("--seed", tr_seed, "initialization and shuffling seed")->capture_default_str();
  tr->add_option("--split-seed", tr_split_seed, "train/test split seed")->capture_default_str();
  tr->add_option("--split-fraction", tr_fraction, "training fraction")->capture_default_str();
  tr->add_option("--fit", tr_fit, "stage-1 fit for pdeeponet: ols | nnls")->capture_default_str();
  tr->add_option("--positivity", tr_pos, "pdeeponet head: softplus_head | unconstrained")
      ->capture_default_str();
  tr->add_option("--hidden", tr_hidden, "hidden layer sizes, e.g. 64,64,64");
  tr->add_option("-o,--output", tr_out, "model JSON")->required();
  tr->add_option("--trace", tr_trace, "per-epoch trace CSV (default <output>.trace.csv)");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "score a model on its train/test split");
  std::string ev_model, ev_data, ev_out;
  ev->add_option("--model", ev_model, "model JSON")->required();
  ev->add_option("--data", ev_data, "dataset CSV the model was trained from")->required();
  ev->add_option("-o,--output", ev_out, "report JSON")->required();

  // compare
  auto* cmp = app.add_subcommand("compare", "tabulate evaluation reports");
  std::vector<std::string> cmp_reports;
  std::string cmp_out, cmp_csv, cmp_json;
  cmp->add_option("reports", cmp_reports, "report JSON files")->required();
  cmp->add_option("-o,--output", cmp_out, "text table (default stdout)");
  cmp->add_option("--csv", cmp_csv, "comparison CSV");
  cmp->add_option("--json", cmp_json, "comparison JSON");

  // predict
  auto* pr = app.add_subcommand("predict", "insertion loss of one design at one frequency");
  std::string pr_model, pr_out;
  double pr_freq = 0.0;
  DesignFlags pr_design;
  pr->add_option("--model", pr_model, "model JSON")->required();
  pr_design.attach(pr, true);
  pr->add_option("--frequency", pr_freq, "frequency (GHz)")->required();
  pr->add_option("-o,--output", pr_out, "output file (default stdout)");

  // fit-poly
  auto* fp = app.add_subcommand("fit-poly", "per-curve cubic fits to a coefficient CSV");
  std::string fp_data, fp_method = "nnls", fp_out;
  double fp_warn = 0.5;
  fp->add_option("data", fp_data, "dataset CSV")->required();
  fp->add_option("--method", fp_method, "ols | nnls")->capture_default_str();
  fp->add_option("--warn-threshold", fp_warn, "residual warning threshold (dB)")
      ->capture_default_str();
  fp->add_option("-o,--output", fp_out, "coefficient CSV")->required();

  // profile
  auto* pf = app.add_subcommand("profile", "prediction sweep over frequency for one design");
  std::string pf_model, pf_freqs = "0.1:40:37", pf_truth, pf_out;
  DesignFlags pf_design;
  pf->add_option("--model", pf_model, "model JSON")->required();
  pf_design.attach(pf, true);
  pf->add_option("--freqs", pf_freqs, "frequency grid start:stop:count (GHz)")
      ->capture_default_str();
  pf->add_option("--truth", pf_truth, "dataset CSV holding the design's measured curve");
  pf->add_option("-o,--output", pf_out, "profile CSV")->required();

  // bench
  auto* bn = app.add_subcommand("bench", "seeded end-to-end comparison of all three methods");
  std::string bn_dir;
  BenchmarkConfig bn_cfg;
  bn->add_option("--output-dir", bn_dir, "directory for data, models and reports")->required();
  bn->add_option("--lambda", bn_cfg.lambda_penalty, "PDNN penalty weight")->capture_default_str();
  bn->add_option("--noise", bn_cfg.noise_sd, "label noise (dB)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) {
      SyntheticConfig cfg;
      cfg.n_designs = gen_designs;
      cfg.frequencies = parse_grid(gen_freqs);
      cfg.seed = gen_seed;
      cfg.noise_sd = gen_noise;
      const auto data = generate_synthetic(cfg);
      save_csv(data, gen_out);
      std::cerr << "wrote " << data.size() << " rows (" << gen_designs << " designs x "
                << cfg.frequencies.size() << " frequencies, " << cfg.frequencies.front() << "-"
                << cfg.frequencies.back() << " GHz) to " << gen_out << "\n";
    } else if (*tr) {
      const Method method = parse_method(tr_method);
      TrainRequest req = default_request(method);
      req.config.seed = tr_seed;
      req.split = {tr_fraction, tr_split_seed};
      if (tr_lambda) req.config.lambda_penalty = *tr_lambda;
      if (tr_lr) req.config.learning_rate = *tr_lr;
      if (tr_epochs) req.config.epochs = *tr_epochs;
      if (tr_batch) req.config.batch_size = *tr_batch;
      if (!tr_hidden.empty()) req.hidden_sizes = parse_sizes(tr_hidden);
      req.fit_method = parse_fit_method(tr_fit);
      req.positivity_mode = parse_positivity_mode(tr_pos);
      if (method == Method::nn && tr_lambda && *tr_lambda != 0.0)
        std::cerr << "note: --lambda is ignored for --method nn\n";

      const auto data = load_csv(tr_data);
      const auto outcome = train_surrogate(data, req);
      save_model(outcome.model, tr_out);
      save_trace_csv(outcome.trace, tr_trace.empty() ? tr_out + ".trace.csv" : tr_trace);
      if (outcome.fits) {
        report_lines("warning: ", outcome.fits->warnings);
        report_lines("fit failed: ", outcome.fits->failures);
        std::cerr << "stage 1: " << outcome.fits->fits.size() << " curves, max residual "
                  << outcome.fits->max_epsilon << " dB\n";
      }
      const auto& last = outcome.trace.epochs.back();
      std::cerr << "trained " << tr_method << ": final loss " << last.total_loss << " (mse "
                << last.mse << ", penalty " << last.penalty << "), "
                << outcome.model.train_time.total() << " s\n";
    } else if (*ev) {
      const auto model = load_model(ev_model);
      const auto data = load_csv(ev_data);
      const auto report = evaluate(model, data);
      write_json(to_json(report), ev_out);
      std::cerr << to_string(report.method) << ": test mse " << report.test_mse << ", "
                << report.n_negative << "/" << report.n_evaluations << " negative predictions\n";
    } else if (*cmp) {
      std::vector<EvalReport> reports;
      for (const auto& path : cmp_reports) reports.push_back(report_from_json(read_json(path)));
      const auto table = compare(reports);
      write_text(table.text, cmp_out);
      if (!cmp_csv.empty()) write_text(table.csv, cmp_csv);
      if (!cmp_json.empty()) write_text(table.json, cmp_json);
    } else if (*pr) {
      const auto model = load_model(pr_model);
      if (!(pr_freq >= 0.0)) throw UsageError("--frequency must be >= 0");
      const double il = predict_db(model, pr_design.checked(), pr_freq);
      write_text(format_double(il) + "\n", pr_out);
    } else if (*fp) {
      const auto data = load_csv(fp_data);
      const auto result = fit_all(data, parse_fit_method(fp_method), fp_warn);
      save_coefficients_csv(result.fits, fp_out);
      report_lines("warning: ", result.warnings);
      report_lines("fit failed: ", result.failures);
      std::cerr << "fitted " << result.fits.size() << " curves, max residual "
                << result.max_epsilon << " dB\n";
    } else if (*pf) {
      const auto model = load_model(pf_model);
      const auto design = pf_design.checked();
      std::optional<CurveGroup> truth;
      if (!pf_truth.empty()) {
        for (auto& g : group_curves(load_csv(pf_truth)).groups)
          if (g.params == design) truth = std::move(g);
        if (!truth) std::cerr << "warning: design not found in " << pf_truth << "\n";
      }
      const auto profile = frequency_profile(model, design, parse_grid(pf_freqs), truth);
      write_text(profile.to_csv(), pf_out);
      std::cerr << profile.violations() << " violation(s) over " << profile.rows.size()
                << " frequencies\n";
    } else if (*bn) {
      fs::create_directories(bn_dir);
      const fs::path dir(bn_dir);
      const auto result = run_benchmark(bn_cfg);
      save_csv(result.data, dir / "data.csv");
      for (std::size_t i = 0; i < result.outcomes.size(); ++i) {
        const auto tag = to_string(result.outcomes[i].model.method);
        save_model(result.outcomes[i].model, dir / (tag + ".model.json"));
        save_trace_csv(result.outcomes[i].trace, dir / (tag + ".trace.csv"));
        write_json(to_json(result.reports[i]), dir / (tag + ".report.json"));
      }
      const auto table = compare(result.reports);
      write_text(table.text, (dir / "comparison.txt").string());
      write_text(table.csv, (dir / "comparison.csv").string());
      write_text(table.json, (dir / "comparison.json").string());
      std::cerr << table.text;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return kOk;
}
