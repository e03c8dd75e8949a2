#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "hdch/dynamics.hpp"
#include "hdch/field.hpp"

namespace hdch {

enum class Formulation { velocity, momentum };

std::string_view to_string(Formulation f);
/// Parses "velocity" or "momentum"; throws ConfigError otherwise.
Formulation parse_formulation(std::string_view name);

struct SolverConfig {
    Formulation formulation = Formulation::velocity;
    /// Fixed step when positive; otherwise dt = cfl * h / max(1, |u|_inf) per step.
    double dt = 0.0;
    double cfl = 0.3;
    double t_end = 0.25;
    /// Output times in [0, t_end]; empty means {t_end}.
    std::vector<double> sample_times;
    bool dealias = true;
    /// Spectral energy fraction above the dealias cutoff that counts as under-resolved.
    double tail_tolerance = 1e-6;

    /// Throws ConfigError on nonpositive t_end or cfl, or sample times outside [0, t_end].
    void validate() const;
    /// Sorted, de-duplicated sample times (t_end appended when the list is empty).
    std::vector<double> resolved_sample_times() const;
};

struct TrajectorySample {
    double t;
    VectorField u;
    double energy;
};

struct TrajectoryMetadata {
    SolverConfig config;
    GridSpec grid;
    long steps = 0;
    double wall_seconds = 0.0;
    double min_dt = 0.0;
    double max_dt = 0.0;
    /// Largest energy fraction seen in the outer tenth of the retained band.
    double max_shell_fraction = 0.0;
};

struct SolutionTrajectory {
    std::vector<TrajectorySample> samples;
    TrajectoryMetadata metadata;
};

using RhsFunction = std::function<VectorField(const VectorField&)>;

/// Classical four-stage Runge-Kutta step for any state with + and scalar *.
template <class State, class Rhs>
State rk4_step(const State& y, double dt, Rhs&& f) {
    const State k1 = f(y);
    const State k2 = f(y + (0.5 * dt) * k1);
    const State k3 = f(y + (0.5 * dt) * k2);
    const State k4 = f(y + dt * k3);
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// RK4 step on fields; stage combinations are formed spectrally and the result
/// is dealiased when requested. Throws BlowUpError (carrying `t`) on non-finite output.
VectorField step_rk4(const VectorField& state, double dt, const RhsFunction& rhs, bool dealias = true,
                     double t = 0.0);

/// Called at each sample time with the velocity field. Returning false drops the
/// sample from the trajectory (the observer has consumed it).
using SampleObserver = std::function<bool(double t, const VectorField& u)>;

/// Integrates from u0 and records the velocity at every sample time.
/// Throws BlowUpError or UnresolvedFieldError; never truncates silently.
SolutionTrajectory integrate(const VectorField& u0, const SolverConfig& config,
                             const SampleObserver& observer = {});

/// Relative L^2 distance |a - b| / |b| (or |a - b| when b vanishes).
double relative_l2_gap(const VectorField& a, const VectorField& b);

/// Energy fraction in modes whose largest |k_i| exceeds 0.9 of the retained band.
double outer_shell_fraction(const VectorField& u);

}  // namespace hdch
