#pragma once

#include "dmpkit/learn.hpp"
#include "dmpkit/trajectory.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace dmpkit {

inline constexpr int kModelSchemaVersion = 1;

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Header `t,x1,...,xd`, then one row per sample.
Trajectory read_trajectory_csv(std::istream& in);
Trajectory read_trajectory_csv(const std::filesystem::path& path);
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

nlohmann::ordered_json model_to_json(const DmpModel& model);
DmpModel model_from_json(const nlohmann::ordered_json& j);

std::string dump_model(const DmpModel& model);
void save_model(const std::filesystem::path& path, const DmpModel& model);
DmpModel load_model(const std::filesystem::path& path);

}  // namespace dmpkit
