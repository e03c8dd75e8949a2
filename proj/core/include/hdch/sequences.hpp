#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "hdch/field.hpp"
#include "hdch/littlewood_paley.hpp"

namespace hdch {

struct ProfileOptions {
    /// Reject boxes where |phi| at distance S/2 from the center exceeds the tolerance.
    bool enforce_boundary_decay = true;
    double boundary_tolerance = 1e-10;
};

/// Even bump phi whose transform is 1 on |xi| <= plateau, 0 on |xi| >= support,
/// with the smooth_step ramp in between. phi is the periodization of the
/// whole-line function, centered at S/2 on the grid axis.
struct BumpProfile {
    double support_radius = 0.0;
    double plateau_radius = 0.0;
    GridPtr grid;
    /// phi(x_i - S/2) at the N axis points.
    std::vector<double> profile;
    /// |phi(S/2)| / max |phi|, the periodization margin.
    double boundary_ratio = 0.0;
    /// |phi| at distance S/2 from the center.
    double boundary_value = 0.0;

    /// phi-hat at frequency xi.
    double transform(double xi) const;
};

using BumpProfilePtr = std::shared_ptr<const BumpProfile>;

/// Default support and plateau radii 2^-d and 4^-d.
double default_support_radius(int d);
double default_plateau_radius(int d);

/// Throws ConfigError unless 0 < plateau < support < Nyquist, or (with
/// enforcement) when the box is too small for the profile to decay.
BumpProfilePtr build_profile(double support_radius, double plateau_radius, GridPtr grid,
                             const ProfileOptions& options = {});

/// Smallest n with 2^n > 12 sqrt(d) rho: from there on f_n sits in block n alone.
int single_block_threshold(int d, double support_radius);

struct SequenceParams {
    int n = 4;
    double s = 3.0;
    BumpProfilePtr profile;
    /// Reject n below single_block_threshold.
    bool require_single_block = true;

    const Grid& grid() const { return *profile->grid; }
    const GridPtr& grid_ptr() const { return profile->grid; }
    /// Sine frequency 17/12 * 2^n.
    double frequency() const;
    /// Radial half-width sqrt(d) * rho of the spectral annulus around frequency().
    double annulus_halfwidth() const;
    /// Throws ConfigError when the annulus exceeds the dealias cutoff or n is too small.
    void validate() const;
};

/// f_n = 2^{-ns} phi(x_1 - c) sin(w (x_1 - c)) prod_{i>=2} phi(x_i - c), built spectrally.
ScalarField make_f_n(const SequenceParams& params);
/// g_n = 2^{-n} prod_i phi(x_i - c).
ScalarField make_g_n(const SequenceParams& params);
/// (f_n, 0, ..., 0).
VectorField make_u0n(const SequenceParams& params);
/// (f_n + g_n, 0, ..., 0).
VectorField make_v0n(const SequenceParams& params);

struct TransportTerms {
    /// v0 . grad v0 (dealiased).
    VectorField total;
    ScalarField f_grad_f;
    ScalarField f_grad_g;
    ScalarField g_grad_f;
    ScalarField g_grad_g;
};

TransportTerms transport_term(const SequenceParams& params);

/// Spectral energy fraction of f outside the annulus center +- halfwidth.
double annulus_leakage(const ScalarField& f, double center, double halfwidth);
/// sum_{j != n} |Delta_j f|_2 divided by |f|_2.
double single_block_residual(const ScalarField& f, int n, const DyadicPartition& partition);

/// |phi^2(x_1) cos(w x_1)|_{L^p} |phi|_{L^p}^{2(d-1)} by 1-D rectangle quadrature.
double transport_anchor(const SequenceParams& params, double p);

struct SequenceCheck {
    int n;
    double leakage;
    double single_block_residual;
    double besov_below;  ///< |f_n|_{B^{s-1}}
    double besov;        ///< |f_n|_{B^s}
    double besov_above;  ///< |f_n|_{B^{s+1}}
};

SequenceCheck verify_sequence(const SequenceParams& params, const BesovParams& besov,
                              const DyadicPartition& partition);
void write_sequence_csv(std::ostream& out, const std::vector<SequenceCheck>& rows);

}  // namespace hdch
