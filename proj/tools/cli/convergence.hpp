#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "hdch/grid.hpp"
#include "hdch/field.hpp"

namespace hdch::cli {

struct ConvergenceConfig {
    GridSpec grid{2, 64, 6.283185307179586, 2.0 / 3.0};
    std::vector<int> seeds{1, 2, 3, 4, 5};
    int max_mode = 4;
    double amplitude = 2.0;
    double t_end = 0.1;
    /// Coarsest fixed step of the refinement ladders.
    double dt = 0.025;
    /// Number of halvings; the ladders use levels + 1 runs.
    int levels = 3;
    /// Dealiasing in the cross-formulation refinement ladder. Off by default,
    /// since with the 2/3 rule both forms already agree to roundoff.
    bool gap_dealias = false;
    double budget_seconds = 600.0;

    void validate() const;
};

struct ConvergenceRow {
    std::string study;  ///< ode | self | gap | gap_default
    int seed = 0;
    int level = 0;
    int points_per_axis = 0;
    double dt = 0.0;
    double value = 0.0;
    double order = std::numeric_limits<double>::quiet_NaN();
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    /// Observed order of RK4 on y' = -y.
    double ode_order = 0.0;
    /// Order between the two finest self-convergence differences, per seed.
    std::vector<double> self_order;
    /// Velocity/momentum gap at the base grid with adaptive steps and dealiasing, per seed.
    std::vector<double> default_gap;
    /// Gap at the base level divided by the gap after one joint (dt, N) refinement, per seed.
    std::vector<double> gap_reduction;
    bool budget_exceeded = false;
    double wall_seconds = 0.0;
};

using FixtureFactory = std::function<VectorField(const GridPtr&, int seed)>;

/// dt ladder for velocity-form self-convergence, a joint (dt, N) ladder for the
/// cross-formulation gap, and the gap at base resolution. Stops early (setting
/// budget_exceeded) once the wall-clock budget is spent.
ConvergenceResult run_convergence(const ConvergenceConfig& config, const FixtureFactory& fixture);

/// Uses trig_fixture with the configured max_mode and amplitude.
ConvergenceResult run_convergence(const ConvergenceConfig& config);

std::string convergence_csv(const ConvergenceResult& result);
std::string convergence_json(const ConvergenceResult& result);

}  // namespace hdch::cli
