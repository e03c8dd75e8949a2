#include "hdch/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "hdch/error.hpp"

namespace hdch {

double BumpProfile::transform(double xi) const {
    return 1.0 - smooth_step((std::abs(xi) - plateau_radius) / (support_radius - plateau_radius));
}

double default_support_radius(int d) { return std::exp2(-d); }
double default_plateau_radius(int d) { return std::exp2(-2 * d); }

BumpProfilePtr build_profile(double support_radius, double plateau_radius, GridPtr grid,
                             const ProfileOptions& options) {
    const double nyquist = grid->spec().nyquist();
    if (!(plateau_radius > 0.0 && plateau_radius < support_radius && support_radius < nyquist)) {
        std::ostringstream msg;
        msg << "bump radii must satisfy 0 < plateau < support < Nyquist (got plateau=" << plateau_radius
            << ", support=" << support_radius << ", Nyquist=" << nyquist << ")";
        throw ConfigError(msg.str());
    }
    auto p = std::make_shared<BumpProfile>();
    p->support_radius = support_radius;
    p->plateau_radius = plateau_radius;
    p->grid = grid;

    // Periodized inverse transform: phi(x) = (1/S) sum_k phihat(xi_k) e^{i xi_k x}.
    const int n = grid->points_per_axis();
    const double side = grid->side_length();
    const double unit = grid->spec().wavenumber_unit();
    std::vector<double> weights;
    for (int k = 1; k < n / 2 && unit * k < support_radius; ++k) weights.push_back(p->transform(unit * k));
    auto evaluate = [&](double x) {
        double sum = p->transform(0.0);
        for (std::size_t k = 0; k < weights.size(); ++k) {
            sum += 2.0 * weights[k] * std::cos(unit * static_cast<double>(k + 1) * x);
        }
        return sum / side;
    };
    p->profile.resize(static_cast<std::size_t>(n));
    double peak = 0.0;
    for (int i = 0; i < n; ++i) {
        p->profile[i] = evaluate(grid->coordinate(static_cast<std::size_t>(i)) - 0.5 * side);
        peak = std::max(peak, std::abs(p->profile[i]));
    }
    p->boundary_value = std::abs(evaluate(0.5 * side));
    p->boundary_ratio = peak > 0.0 ? p->boundary_value / peak : 0.0;

    if (options.enforce_boundary_decay && p->boundary_value > options.boundary_tolerance) {
        std::ostringstream msg;
        msg << "box too small: |phi| = " << p->boundary_value << " at distance S/2 from the center exceeds "
            << options.boundary_tolerance << " (enlarge side_length or support_radius)";
        throw ConfigError(msg.str());
    }
    return p;
}

int single_block_threshold(int d, double support_radius) {
    const double bound = 12.0 * std::sqrt(static_cast<double>(d)) * support_radius;
    int n = 0;
    while (std::exp2(n) <= bound) ++n;
    // Negative n also qualifies when the bound is below 1; the sequence stays at n >= 0.
    return n;
}

double SequenceParams::frequency() const { return 17.0 / 12.0 * std::exp2(n); }

double SequenceParams::annulus_halfwidth() const {
    return std::sqrt(static_cast<double>(grid().dimension())) * profile->support_radius;
}

void SequenceParams::validate() const {
    if (!profile) throw ConfigError("sequence parameters need a bump profile");
    std::ostringstream msg;
    const double reach = frequency() + annulus_halfwidth();
    const double cutoff = grid().spec().dealias_cutoff();
    const int n0 = single_block_threshold(grid().dimension(), profile->support_radius);
    if (n < 0) {
        msg << "sequence index n must be >= 0 (got " << n << ")";
    } else if (reach > cutoff) {
        msg << "n = " << n << " is not resolvable: spectral support reaches |xi| = " << reach
            << " beyond the dealias cutoff " << cutoff << " (raise N or the dealias fraction)";
    } else if (require_single_block && n < n0) {
        msg << "n = " << n << " is below the single-block threshold n0 = " << n0;
    } else {
        return;
    }
    throw ConfigError(msg.str());
}

namespace {

/// Fills a spectrum from a separable transform value per coefficient; the
/// callback receives the physical wavenumber on each axis.
template <class Fn>
ScalarField spectral_field(const GridPtr& grid, Fn&& value) {
    const int d = grid->dimension();
    const double inv_cell = 1.0 / grid->cell_volume();
    ComplexBuffer out(grid->spectral_count());
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> xi(static_cast<std::size_t>(d), 0.0);
    std::vector<std::size_t> extent(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) extent[a] = grid->wavenumbers(a).size();
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        int parity = 0;
        for (int a = 0; a < d; ++a) {
            xi[a] = grid->wavenumbers(a)[idx[a]];
            parity += grid->mode_index(idx[a]);
        }
        // Shift to the box center: e^{-i xi . S/2} = (-1)^{sum k}.
        const double sign = (parity % 2 == 0) ? 1.0 : -1.0;
        out[flat] = sign * inv_cell * value(std::span<const double>(xi));
        for (int a = d - 1; a >= 0; --a) {
            if (++idx[a] < extent[a]) break;
            idx[a] = 0;
        }
    }
    return ScalarField::from_spectral(grid, std::move(out));
}

}  // namespace

ScalarField make_f_n(const SequenceParams& params) {
    params.validate();
    const BumpProfile& bump = *params.profile;
    const double w = params.frequency();
    const double amp = std::exp2(-params.n * params.s);
    return spectral_field(params.grid_ptr(), [&](std::span<const double> xi) {
        double tail = 1.0;
        for (std::size_t a = 1; a < xi.size(); ++a) tail *= bump.transform(xi[a]);
        if (tail == 0.0) return Complex{};
        const double diff = bump.transform(xi[0] + w) - bump.transform(xi[0] - w);
        return Complex{0.0, 0.5 * amp * diff * tail};
    });
}

ScalarField make_g_n(const SequenceParams& params) {
    params.validate();
    const BumpProfile& bump = *params.profile;
    const double amp = std::exp2(-params.n);
    return spectral_field(params.grid_ptr(), [&](std::span<const double> xi) {
        double v = amp;
        for (double x : xi) v *= bump.transform(x);
        return Complex{v, 0.0};
    });
}

namespace {

VectorField first_component(const GridPtr& grid, ScalarField f) {
    std::vector<ScalarField> c{std::move(f)};
    for (int i = 1; i < grid->dimension(); ++i) c.push_back(ScalarField::zeros(grid));
    return VectorField(std::move(c));
}

}  // namespace

VectorField make_u0n(const SequenceParams& params) { return first_component(params.grid_ptr(), make_f_n(params)); }

VectorField make_v0n(const SequenceParams& params) {
    return first_component(params.grid_ptr(), make_f_n(params) + make_g_n(params));
}

TransportTerms transport_term(const SequenceParams& params) {
    const ScalarField f = make_f_n(params);
    const ScalarField g = make_g_n(params);
    const ScalarField df = partial_derivative(f, 0);
    const ScalarField dg = partial_derivative(g, 0);
    auto product = [](const ScalarField& a, const ScalarField& b) { return dealias(multiply(a, b)); };
    TransportTerms t{first_component(params.grid_ptr(), ScalarField::zeros(params.grid_ptr())),
                     product(f, df), product(f, dg), product(g, df), product(g, dg)};
    // Only the first component of v0 is nonzero, so (v0 . grad v0)_1 = v0_1 d_1 v0_1.
    const ScalarField v = f + g;
    t.total = first_component(params.grid_ptr(), product(v, partial_derivative(v, 0)));
    return t;
}

double annulus_leakage(const ScalarField& f, double center, double halfwidth) {
    const Grid& g = f.grid();
    const auto r2 = g.radius_squared();
    const auto s = f.spectral();
    const double slack = 1e-12 * std::max(1.0, center);
    const double lo = center - halfwidth - slack;
    const double hi = center + halfwidth + slack;
    double total = 0.0, outside = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double e = g.multiplicity(k) * std::norm(s[k]);
        total += e;
        const double r = std::sqrt(r2[k]);
        if (r < lo || r > hi) outside += e;
    }
    return total > 0.0 ? outside / total : 0.0;
}

double single_block_residual(const ScalarField& f, int n, const DyadicPartition& partition) {
    BesovOptions opts;
    opts.check_resolution = false;
    const auto blocks = block_norms(VectorField({f}), BesovParams{0.0, 2.0, 2.0}, partition, opts);
    double off = 0.0;
    for (const auto& b : blocks) {
        if (b.j != n) off += b.lp;
    }
    const double total = l2_norm_spectral(f);
    return total > 0.0 ? off / total : 0.0;
}

double transport_anchor(const SequenceParams& params, double p) {
    const BumpProfile& bump = *params.profile;
    const Grid& g = params.grid();
    const double w = params.frequency();
    const double h = g.spacing();
    const double c = 0.5 * g.side_length();
    std::vector<double> shaped(bump.profile.size());
    for (std::size_t i = 0; i < shaped.size(); ++i) {
        const double phi = bump.profile[i];
        shaped[i] = phi * phi * std::cos(w * (g.coordinate(i) - c));
    }
    auto norm = [&](const std::vector<double>& v) {
        if (std::isinf(p)) {
            double m = 0.0;
            for (double x : v) m = std::max(m, std::abs(x));
            return m;
        }
        double sum = 0.0;
        for (double x : v) sum += std::pow(std::abs(x), p);
        return std::pow(sum * h, 1.0 / p);
    };
    return norm(shaped) * std::pow(norm(bump.profile), 2.0 * (g.dimension() - 1));
}

SequenceCheck verify_sequence(const SequenceParams& params, const BesovParams& besov,
                              const DyadicPartition& partition) {
    const ScalarField f = make_f_n(params);
    SequenceCheck row{params.n, annulus_leakage(f, params.frequency(), params.annulus_halfwidth()),
                      single_block_residual(f, params.n, partition), 0.0, 0.0, 0.0};
    BesovParams b = besov;
    b.s = besov.s - 1.0;
    row.besov_below = besov_norm(f, b, partition);
    row.besov = besov_norm(f, besov, partition);
    b.s = besov.s + 1.0;
    row.besov_above = besov_norm(f, b, partition);
    return row;
}

void write_sequence_csv(std::ostream& out, const std::vector<SequenceCheck>& rows) {
    out << "n,annulus_leakage,single_block_residual,besov_s_minus_1,besov_s,besov_s_plus_1\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.n, r.leakage,
                      r.single_block_residual, r.besov_below, r.besov, r.besov_above);
        out << buf;
    }
}

}  // namespace hdch
