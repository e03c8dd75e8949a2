#pragma once

#include <filesystem>
#include <iosfwd>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "convergence.hpp"
#include "hdch/experiment.hpp"

namespace hdch::cli {

struct RunContext {
    std::filesystem::path out_dir;
    int verbosity = 0;
    std::ostream* out = nullptr;
    std::ostream* err = nullptr;
};

struct SimulateConfig {
    GridSpec grid{2, 64, 2 * std::numbers::pi, 2.0 / 3.0};
    /// zero | sine | file | sequence_u | sequence_v
    std::string initial = "sine";
    std::string initial_file;
    double amplitude = 1.0;
    /// Sequence data parameters (initial = sequence_u / sequence_v).
    int n = 4;
    double s = 3.0;
    double support_radius = 0.0;
    double plateau_radius = 0.0;
    /// velocity | momentum | both
    std::string formulation = "velocity";
    double dt = 0.0;
    double cfl = 0.3;
    double t_end = 0.1;
    std::vector<double> sample_times;
    bool dealias = true;
    double tail_tolerance = 1e-6;
};

struct BesovConfig {
    std::string field;
    BesovParams besov{3.0, 2.0, 2.0};
    /// Dealias fraction assumed for the stored field's grid.
    double dealias_fraction = 2.0 / 3.0;
    bool check_resolution = true;
    bool force_physical = false;
};

struct SequencesConfig {
    GridSpec grid{2, 1024, 16 * std::numbers::pi, 2.0 / 3.0};
    BesovParams besov{3.0, 2.0, 2.0};
    std::vector<int> n_list{3, 4};
    double support_radius = 0.0;
    double plateau_radius = 0.0;
    bool enforce_boundary_decay = false;
};

SimulateConfig parse_simulate(const nlohmann::json& doc);
BesovConfig parse_besov(const nlohmann::json& doc);
SequencesConfig parse_sequences(const nlohmann::json& doc);
ExperimentConfig parse_experiment(const nlohmann::json& doc);
ConvergenceConfig parse_convergence(const nlohmann::json& doc);

nlohmann::json to_json(const SimulateConfig& c);
nlohmann::json to_json(const BesovConfig& c);
nlohmann::json to_json(const SequencesConfig& c);
nlohmann::json to_json(const ExperimentConfig& c);
nlohmann::json to_json(const ConvergenceConfig& c);

/// Writes snapshot_<i>.chdf per sample, rhs0.chdf and diagnostics.json.
void run_simulate(const SimulateConfig& c, const RunContext& ctx);
/// Prints the norm and writes blocks.csv.
void run_besov(const BesovConfig& c, const RunContext& ctx);
/// Writes sequences.csv.
void run_sequences_verify(const SequencesConfig& c, const RunContext& ctx);
/// Writes f_<n>.chdf and g_<n>.chdf.
void run_sequences_export(const SequencesConfig& c, const RunContext& ctx);
/// Writes the experiment report files.
void run_experiment_command(const ExperimentConfig& c, const RunContext& ctx);
/// Writes convergence.csv and convergence.json.
void run_convergence_command(const ConvergenceConfig& c, const RunContext& ctx);

}  // namespace hdch::cli
