#pragma once

#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hdch/integrator.hpp"
#include "hdch/littlewood_paley.hpp"
#include "hdch/sequences.hpp"

namespace hdch {

/// 1/2 min{s - 1 - d/p, s - 3/2, 1}. Throws ConfigError unless s > max{1 + d/p, 3/2}.
double eps_s(double s, double p, int d);
/// Throws ConfigError naming the constraint s > max{1 + d/p, 3/2} when it fails.
void check_regularity_hypothesis(const BesovParams& params, int d);

struct ExperimentConfig {
    int dimension = 2;
    BesovParams besov{3.0, 2.0, 2.0};
    std::vector<int> n_list{4, 5, 6};
    double t0 = 0.25;
    /// Empty means 11 equally spaced times 0, t0/10, ..., t0.
    std::vector<double> sample_times;
    int points_per_axis = 2048;
    double side_length = 16.0 * std::numbers::pi;
    double dealias_fraction = 2.0 / 3.0;
    /// Used for any n whose annulus does not fit under the base cutoff.
    double fallback_dealias_fraction = 0.75;
    /// Bump radii; zero selects 2^-d and 4^-d.
    double support_radius = 0.0;
    double plateau_radius = 0.0;
    bool enforce_boundary_decay = false;
    double cfl = 0.3;
    /// Fixed step when positive.
    double dt = 0.0;
    double fit_lo = 0.05;
    double fit_hi = 0.25;
    /// Also integrate v^n in momentum form and report the gap at t0.
    bool cross_check = true;
    /// Replace g_n by zero, so both data coincide (uniqueness smoke test).
    bool zero_perturbation = false;
    int workers = 1;

    void validate() const;
    std::vector<double> resolved_sample_times() const;
    double resolved_support_radius() const;
    double resolved_plateau_radius() const;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    /// Root-mean-square residual of the fit.
    double residual = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares y = slope * x + intercept. Needs >= 2 points.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Least squares of log2(value) against n. Throws std::invalid_argument for
/// fewer than 3 values or any value <= 0.
LineFit fit_decay_exponent(std::span<const double> n, std::span<const double> values);

struct SeparationFit {
    double c_est = 0.0;      ///< slope of separation(t) over the window
    double intercept = 0.0;
    double r_squared = 0.0;
    double min_ratio = 0.0;  ///< min over the window of separation(t) / t
};

/// Throws std::invalid_argument when no sample falls in [lo, hi] with t > 0.
SeparationFit fit_separation(std::span<const double> t, std::span<const double> separation, double lo, double hi);

struct SampleRow {
    double t = 0.0;
    double residual32 = 0.0;
    double residual33 = 0.0;
    double separation = 0.0;
    double energy_u = 0.0;
    double energy_v = 0.0;
};

struct PairRecord {
    int n = 0;
    GridSpec grid;
    double frequency = 0.0;
    double resolution_margin = 0.0;  ///< dealias cutoff minus outer annulus radius
    double boundary_ratio = 0.0;
    double delta0 = 0.0;
    double gn_gradfn_norm = 0.0;
    double transport_anchor = 0.0;
    double transport_norm = 0.0;     ///< |v0 . grad v0|_{B^s}
    std::vector<SampleRow> rows;
    double residual32_sup = 0.0;
    double residual33_zero = 0.0;    ///< quadratic extrapolation of residual33 to t = 0
    double residual33_exponent = 0.0;
    double residual33_rate = 0.0;    ///< a in residual33 ~ a t + b t^2
    double residual33_curvature = 0.0;
    SeparationFit separation;
    double energy_drift_u = 0.0;
    double energy_drift_v = 0.0;
    double cross_gap = std::numeric_limits<double>::quiet_NaN();
    double max_shell_fraction = 0.0;
    long steps_u = 0;
    long steps_v = 0;
    double wall_seconds = 0.0;
};

struct ExperimentReport {
    ExperimentConfig config;
    double eps = 0.0;
    std::vector<PairRecord> records;
    LineFit delta0_fit;
    LineFit residual32_fit;
    /// Decay of residual33_rate in n.
    LineFit residual33_rate_fit;
    LineFit gn_gradfn_fit;
    /// Smallest separation floor over n divided by the floor at the first n.
    double floor_ratio = 0.0;
    double min_separation_r_squared = 0.0;
    double wall_seconds = 0.0;
};

/// Grid used for index n: the base dealias fraction, or the fallback when the
/// annulus does not fit. Throws ConfigError when neither resolves it.
GridSpec grid_for(const ExperimentConfig& config, int n);

using ProgressCallback = std::function<void(const std::string&)>;

PairRecord run_pair(int n, const ExperimentConfig& config, const ProgressCallback& progress = {});

/// Runs every n (in a pool of config.workers threads) and assembles fits.
ExperimentReport run_experiment(const ExperimentConfig& config, const ProgressCallback& progress = {});

/// Fills the cross-n fits from the records.
void summarize(ExperimentReport& report);

}  // namespace hdch
