#pragma once

#include <filesystem>

#include <json.hpp>

#include "ilnet/data.hpp"
#include "ilnet/deeponet.hpp"
#include "ilnet/mlp.hpp"
#include "ilnet/surrogate.hpp"

namespace ilnet {

struct EvalReport;

nlohmann::json to_json(const MinMaxScaler& s);
MinMaxScaler scaler_from_json(const nlohmann::json& j);

/// Adds `il_zero_normalized` to the plain scaler object.
nlohmann::json to_json(const DataScaler& s);
DataScaler data_scaler_from_json(const nlohmann::json& j);

/// Weights are row-major nested arrays, one array per output unit.
nlohmann::json to_json(const MlpModel& m);
MlpModel mlp_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PDeepONetModel& m);
PDeepONetModel deeponet_from_json(const nlohmann::json& j);

/// Schema "ilmodel/1". Timings live under "timing" only.
nlohmann::json to_json(const Surrogate& m);
Surrogate surrogate_from_json(const nlohmann::json& j);

/// Schema "evalreport/1".
nlohmann::json to_json(const EvalReport& r);
EvalReport report_from_json(const nlohmann::json& j);

/// Copy of `j` with every timing field removed, for reproducibility checks.
nlohmann::json without_timing(nlohmann::json j);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const nlohmann::json& j, const std::filesystem::path& path);

void save_model(const Surrogate& m, const std::filesystem::path& path);
Surrogate load_model(const std::filesystem::path& path);

void save_trace_csv(const TrainTrace& trace, const std::filesystem::path& path);

}  // namespace ilnet
