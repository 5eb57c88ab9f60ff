#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ovsafe/barrier.hpp"
#include "ovsafe/mc.hpp"
#include "ovsafe/model.hpp"
#include "ovsafe/ode.hpp"
#include "ovsafe/sde.hpp"

namespace ovsafe::io {

using nlohmann::json;

std::string version();

/// 17 significant digits.
std::string format_double(double v);

json to_json(const ModelParams& p);
json to_json(const DerivedConstants& c);
/// All six keys are required; missing or non-numeric keys throw std::invalid_argument.
ModelParams model_params_from_json(const json& j);

/// Unobserved times serialize as null (read: +infinity).
json to_json(const StoppingRecord& r);
json to_json(const SweepSpec& s);
json to_json(const CellResult& c);

/// Barrier certificate constants, without the tables.
json barrier_constants_json(const BarrierTable& t);

/// Full sweep record. `run` holds per-invocation data (wall time, threads)
/// and is the only part that may differ between identical runs.
json sweep_result_json(const SweepResult& result, const SweepSpec& spec, const json& config,
                       const json& run);

// CSV writers. The first line is "# config=<json>", then a header row.
// Throws std::runtime_error if the file cannot be written.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          const json& config);
void write_thin_csv(const std::filesystem::path& path, const ThinTrajectory& traj,
                    const json& config);
void write_barrier_csv(const std::filesystem::path& path, const BarrierTable& table,
                       const json& config);
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result,
                     const json& config);
void write_json(const std::filesystem::path& path, const json& j);

}  // namespace ovsafe::io
