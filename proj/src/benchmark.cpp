#include "ilnet/benchmark.hpp"

namespace ilnet {

SyntheticConfig benchmark_data_config(const BenchmarkConfig& config) {
  SyntheticConfig s;
  s.n_designs = config.n_designs;
  s.frequencies = linear_grid(config.f_start, config.f_stop, config.f_count);
  s.seed = config.data_seed;
  s.noise_sd = config.noise_sd;
  return s;
}

TrainRequest benchmark_request(const BenchmarkConfig& config, Method method) {
  TrainRequest r = default_request(method);
  r.config.seed = config.train_seed;
  r.split.seed = config.split_seed;
  if (method == Method::pdnn) r.config.lambda_penalty = config.lambda_penalty;
  return r;
}

BenchmarkResult run_benchmark(const BenchmarkConfig& config) {
  BenchmarkResult out;
  out.data = generate_synthetic(benchmark_data_config(config));
  for (Method m : {Method::nn, Method::pdnn, Method::pdeeponet}) {
    out.outcomes.push_back(train_surrogate(out.data, benchmark_request(config, m)));
    out.reports.push_back(evaluate(out.outcomes.back().model, out.data));
  }
  return out;
}

}  // namespace ilnet
