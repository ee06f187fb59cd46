#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "liftid/eval.hpp"
#include "liftid/io.hpp"
#include "liftid/l3.hpp"
#include "liftid/plant.hpp"

namespace liftid::pipeline {

using lifting::Dataset;
using numerics::Matrix;
using numerics::Vector;

struct DataConfig {
    std::string source = "plant";  ///< "plant" or "csv"
    int count = 100;
    double duration = 5.0;  ///< seconds per trajectory
    double rate = 20.0;     ///< Hz
    int substeps = 10;
    plant::ExcitationRanges ranges;
    std::string dir;  ///< CSV directory for source == "csv"
};

struct MethodConfig {
    bool use_filter = false;
    double ridge = 0.0;
    int features = 0;  ///< dictionary size for edmdc/koopman
    std::optional<Matrix> structural_a;
    bool toy_structure = false;  ///< build the toy structural row at runtime
};

struct EvalConfig {
    plant::SignalSpec signal = plant::SignalSpec::square_wave(1.0, 2.5);
    double duration = 10.0;
    double x0 = 0.0;        ///< toy initial state
    std::string test_file;  ///< CSV mode test trajectory
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::filesystem::path out_dir = "out";
    DataConfig data;
    std::vector<std::string> methods;
    std::map<std::string, MethodConfig> settings;
    l3::L3Config l3;
    EvalConfig eval;

    /// Section IV-A reproduction: 100 5s trajectories at 20 Hz, the Table-1
    /// model set, square-wave test input.
    static ExperimentConfig toy_defaults(std::uint64_t seed);

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    void validate() const;
};

/// Known method names, in the canonical reporting order.
const std::vector<std::string>& known_methods();

/// Generates the configured dataset and writes it under out_dir/data.
Dataset cmd_datagen(const ExperimentConfig& cfg);

struct TrainedModel {
    eval::ModelBundle bundle;
    std::filesystem::path file;
};

/// Fits every selected method on the dataset under out_dir/data and writes
/// one model JSON per method under out_dir/models (plus an L3 history CSV).
std::vector<TrainedModel> cmd_train(const ExperimentConfig& cfg);

/// Builds the test trajectory (simulated for plant data, loaded for CSV
/// data), rolls out the given models and writes report.csv / errors.csv
/// under out_dir. Empty model_paths means every model under out_dir/models.
eval::CompareReport cmd_eval(const ExperimentConfig& cfg,
                             std::vector<std::filesystem::path> model_paths = {});

/// Validates loose trajectory CSVs in cfg.data.dir, assigns a seeded 80-20
/// split and writes manifest.json next to them.
Dataset cmd_ingest(const ExperimentConfig& cfg);

/// Finite-difference check on a seeded random network and batch.
l3::GradCheckReport cmd_gradcheck(std::uint64_t seed);

/// The test trajectory used by cmd_eval.
lifting::Trajectory make_test_trajectory(const ExperimentConfig& cfg);

}  // namespace liftid::pipeline
