#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "liftid/eval.hpp"
#include "liftid/l3.hpp"
#include "liftid/lifting.hpp"

namespace liftid::io {

using lifting::Dataset;
using lifting::Trajectory;

inline constexpr int kFormatVersion = 1;

/// 17 significant digits; losslessly round-trips every double.
std::string format_double(double value);

/// Trajectory CSV: header `t,x0..x{l-1},u0..u{n-1},zeta0..zeta{z-1}`, one row
/// per sample, `\n` newlines. The t column is i * dt.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

/// Writes one CSV per trajectory plus manifest.json (dims, dt, seed, split,
/// centering, file list) into `dir`. Returns the trajectory file names.
std::vector<std::string> save_dataset(const std::filesystem::path& dir, const Dataset& ds,
                                      std::uint64_t seed);

/// Loads a dataset written by save_dataset / cmd_ingest.
Dataset load_dataset(const std::filesystem::path& dir);

/// Extra payload serialized with a model: the experiment settings it was
/// trained under and, for L3 variants, the per-epoch loss history.
struct BundleExtras {
    nlohmann::json config_echo;
    std::vector<l3::EpochStats> history;
};

void save_bundle(const std::filesystem::path& path, const eval::ModelBundle& bundle,
                 const BundleExtras& extras = {});
eval::ModelBundle load_bundle(const std::filesystem::path& path);

/// report.csv: `model,lifted_dim,ise`.
void write_report_csv(const std::filesystem::path& path, const eval::CompareReport& report);

/// errors.csv: `model,step,t,err_x0..err_x{l-1},err_norm` per rollout step.
void write_errors_csv(const std::filesystem::path& path, const eval::CompareReport& report);

nlohmann::json report_json(const eval::CompareReport& report);
std::string format_report_table(const eval::CompareReport& report);

void write_history_csv(const std::filesystem::path& path,
                       const std::vector<l3::EpochStats>& history);

void write_text_file(const std::filesystem::path& path, const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace liftid::io
