#pragma once

#include <cstdint>
#include <vector>

#include "ilnet/data.hpp"
#include "ilnet/evaluation.hpp"
#include "ilnet/surrogate.hpp"

namespace ilnet {

/// Label noise used by `gen-data` when --noise is not given (dB).
inline constexpr double kDefaultNoiseSd = 0.2;

/// The seeded three-way comparison: synthetic data (190 designs x 37
/// frequencies over 0.1-40 GHz, seed 7), then NN, PDNN and PDeepONet trained
/// with seed 0 on the same 80/20 split.
struct BenchmarkConfig {
  std::size_t n_designs = 190;
  double f_start = 0.1;
  double f_stop = 40.0;
  std::size_t f_count = 37;
  std::uint64_t data_seed = 7;
  double noise_sd = kDefaultNoiseSd;
  std::uint64_t train_seed = 0;
  std::uint64_t split_seed = 0;
  double lambda_penalty = 1.0;
};

struct BenchmarkResult {
  Dataset data;
  std::vector<TrainOutcome> outcomes;  // nn, pdnn, pdeeponet
  std::vector<EvalReport> reports;     // same order
};

SyntheticConfig benchmark_data_config(const BenchmarkConfig& config);
TrainRequest benchmark_request(const BenchmarkConfig& config, Method method);
BenchmarkResult run_benchmark(const BenchmarkConfig& config);

}  // namespace ilnet
