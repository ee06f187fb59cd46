#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "liftid/pipeline.hpp"

namespace fs = std::filesystem;
using liftid::pipeline::ExperimentConfig;

namespace {

ExperimentConfig resolve_config(const std::string& config_path,
                                std::optional<std::uint64_t> seed,
                                const std::string& out_dir) {
    ExperimentConfig cfg;
    if (!config_path.empty()) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(liftid::io::read_text_file(config_path));
        } catch (const nlohmann::json::exception& e) {
            throw liftid::UserError(config_path + ": " + e.what());
        }
        cfg = ExperimentConfig::from_json(j);
    } else {
        cfg = ExperimentConfig::toy_defaults(seed.value_or(1));
    }
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"liftid: lifted linear system identification toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    bool as_json = false;
    app.add_option("--config", config_path, "experiment config JSON");
    app.add_option("--seed", seed, "override the experiment seed");
    app.add_option("--out", out_dir, "override the output directory");
    app.add_flag("--json", as_json, "machine-readable output");

    auto* datagen = app.add_subcommand("datagen", "generate a trajectory dataset");
    auto* train = app.add_subcommand("train", "fit the selected models");
    auto* eval_cmd = app.add_subcommand("eval", "open-loop rollout benchmark");
    auto* ingest = app.add_subcommand("ingest", "validate and split external trajectory CSVs");
    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");

    std::vector<std::string> model_paths;
    eval_cmd->add_option("models", model_paths, "model JSON files (default: all trained)");
    std::string ingest_dir;
    ingest->add_option("dir", ingest_dir, "directory of trajectory CSVs");

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig cfg = resolve_config(config_path, seed, out_dir);

        if (datagen->parsed()) {
            const auto ds = liftid::pipeline::cmd_datagen(cfg);
            if (as_json) {
                nlohmann::json j{{"trajectories", ds.trajectories.size()},
                                 {"dir", (cfg.out_dir / "data").string()}};
                std::cout << j.dump() << "\n";
            } else {
                std::cout << "wrote " << ds.trajectories.size() << " trajectories to "
                          << (cfg.out_dir / "data").string() << "\n";
            }
        } else if (train->parsed()) {
            const auto models = liftid::pipeline::cmd_train(cfg);
            if (as_json) {
                nlohmann::json j = nlohmann::json::array();
                for (const auto& m : models) j.push_back(m.file.string());
                std::cout << j.dump() << "\n";
            } else {
                for (const auto& m : models) {
                    std::cout << "trained " << m.bundle.method << " -> " << m.file.string()
                              << "\n";
                }
            }
        } else if (eval_cmd->parsed()) {
            std::vector<fs::path> paths(model_paths.begin(), model_paths.end());
            const auto report = liftid::pipeline::cmd_eval(cfg, paths);
            if (as_json) {
                std::cout << liftid::io::report_json(report).dump() << "\n";
            } else {
                std::cout << liftid::io::format_report_table(report);
                std::cout << "report written to " << (cfg.out_dir / "report.csv").string()
                          << "\n";
            }
        } else if (ingest->parsed()) {
            if (!ingest_dir.empty()) cfg.data.dir = ingest_dir;
            cfg.data.source = "csv";
            const auto ds = liftid::pipeline::cmd_ingest(cfg);
            if (as_json) {
                nlohmann::json j{{"trajectories", ds.trajectories.size()},
                                 {"l", ds.l()},
                                 {"n", ds.n()},
                                 {"z", ds.z()},
                                 {"dt", ds.dt()}};
                std::cout << j.dump() << "\n";
            } else {
                std::cout << "ingested " << ds.trajectories.size() << " trajectories (l="
                          << ds.l() << ", n=" << ds.n() << ", z=" << ds.z() << ")\n";
            }
        } else if (gradcheck->parsed()) {
            const auto report = liftid::pipeline::cmd_gradcheck(seed.value_or(1));
            if (as_json) {
                nlohmann::json j{{"max_rel_theta", report.max_rel_theta},
                                 {"max_rel_a", report.max_rel_a},
                                 {"max_rel_h", report.max_rel_h}};
                std::cout << j.dump() << "\n";
            } else {
                std::printf("max relative gradient error: theta %.3g, A %.3g, H %.3g\n",
                            report.max_rel_theta, report.max_rel_a, report.max_rel_h);
            }
            if (report.max_rel() > 1e-4) {
                std::cerr << "gradient check FAILED (tolerance 1e-4)\n";
                return 2;
            }
        }
    } catch (const liftid::SingularGram& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 2;
    } catch (const liftid::NonFiniteState& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 2;
    } catch (const liftid::NonFiniteLoss& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
