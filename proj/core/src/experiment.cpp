#include "hdch/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hdch/error.hpp"

namespace hdch {

double eps_s(double s, double p, int d) {
    check_regularity_hypothesis(BesovParams{s, p, 2.0}, d);
    const double dp = std::isinf(p) ? 0.0 : d / p;
    return 0.5 * std::min({s - 1.0 - dp, s - 1.5, 1.0});
}

void check_regularity_hypothesis(const BesovParams& params, int d) {
    params.validate();
    const double dp = std::isinf(params.p) ? 0.0 : d / params.p;
    const double bound = std::max(1.0 + dp, 1.5);
    if (!(params.s > bound)) {
        std::ostringstream msg;
        msg << "regularity hypothesis s > max{1 + d/p, 3/2} violated: s = " << params.s << ", d = " << d
            << ", p = " << params.p << " requires s > " << bound;
        throw ConfigError(msg.str());
    }
}

void ExperimentConfig::validate() const {
    std::ostringstream msg;
    if (dimension < 1) {
        msg << "dimension must be >= 1";
    } else if (n_list.empty()) {
        msg << "n_list must not be empty";
    } else if (!(t0 > 0.0)) {
        msg << "t0 must be positive";
    } else if (!(fit_lo > 0.0 && fit_lo < fit_hi && fit_hi <= t0 + 1e-12)) {
        msg << "fit window [" << fit_lo << ", " << fit_hi << "] must satisfy 0 < lo < hi <= t0";
    } else if (workers < 1) {
        msg << "workers must be >= 1";
    } else {
        check_regularity_hypothesis(besov, dimension);
        GridSpec{dimension, points_per_axis, side_length, dealias_fraction}.validate();
        GridSpec{dimension, points_per_axis, side_length, fallback_dealias_fraction}.validate();
        SolverConfig solver;
        solver.t_end = t0;
        solver.sample_times = resolved_sample_times();
        solver.cfl = cfl;
        solver.dt = dt;
        solver.validate();
        std::vector<int> sorted = n_list;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw ConfigError("n_list contains duplicates");
        }
        for (int n : n_list) (void)grid_for(*this, n);
        return;
    }
    throw ConfigError(msg.str());
}

std::vector<double> ExperimentConfig::resolved_sample_times() const {
    if (!sample_times.empty()) {
        std::vector<double> t = sample_times;
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end()), t.end());
        return t;
    }
    std::vector<double> t;
    for (int i = 0; i <= 10; ++i) t.push_back(t0 * i / 10.0);
    return t;
}

double ExperimentConfig::resolved_support_radius() const {
    return support_radius > 0.0 ? support_radius : default_support_radius(dimension);
}

double ExperimentConfig::resolved_plateau_radius() const {
    return plateau_radius > 0.0 ? plateau_radius : default_plateau_radius(dimension);
}

GridSpec grid_for(const ExperimentConfig& config, int n) {
    GridSpec spec{config.dimension, config.points_per_axis, config.side_length, config.dealias_fraction};
    const double reach = 17.0 / 12.0 * std::exp2(n) + std::sqrt(static_cast<double>(config.dimension)) *
                                                          config.resolved_support_radius();
    if (reach <= spec.dealias_cutoff()) return spec;
    spec.dealias_fraction = config.fallback_dealias_fraction;
    if (reach <= spec.dealias_cutoff()) return spec;
    std::ostringstream msg;
    msg << "n = " << n << " is not resolvable: annulus reaches |xi| = " << reach << " but the cutoff is "
        << spec.dealias_cutoff() << " even with dealias fraction " << config.fallback_dealias_fraction;
    throw ConfigError(msg.str());
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line needs >= 2 paired points");
    const double m = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: abscissae are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (f.slope * x[i] + f.intercept);
        ss += e * e;
    }
    f.residual = std::sqrt(ss / m);
    f.r_squared = syy > 0.0 ? 1.0 - ss / syy : 1.0;
    return f;
}

LineFit fit_decay_exponent(std::span<const double> n, std::span<const double> values) {
    if (values.size() < 3 || n.size() != values.size()) {
        throw std::invalid_argument("fit_decay_exponent needs at least 3 values");
    }
    std::vector<double> y;
    for (double v : values) {
        if (!(v > 0.0)) throw std::invalid_argument("fit_decay_exponent needs positive values");
        y.push_back(std::log2(v));
    }
    return fit_line(n, y);
}

namespace {

bool in_window(double t, double lo, double hi) {
    const double slack = 1e-12 * std::max(1.0, hi);
    return t > 0.0 && t >= lo - slack && t <= hi + slack;
}

}  // namespace

SeparationFit fit_separation(std::span<const double> t, std::span<const double> separation, double lo,
                             double hi) {
    std::vector<double> x, y;
    double min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!in_window(t[i], lo, hi)) continue;
        x.push_back(t[i]);
        y.push_back(separation[i]);
        min_ratio = std::min(min_ratio, separation[i] / t[i]);
    }
    if (x.empty()) throw std::invalid_argument("fit_separation: no samples in the fit window");
    SeparationFit out;
    out.min_ratio = min_ratio;
    if (x.size() >= 2) {
        const LineFit f = fit_line(x, y);
        out.c_est = f.slope;
        out.intercept = f.intercept;
        out.r_squared = f.r_squared;
    } else {
        out.c_est = y[0] / x[0];
        out.r_squared = 1.0;
    }
    return out;
}

namespace {

struct Residual33Fits {
    double zero = 0.0;
    double exponent = std::numeric_limits<double>::quiet_NaN();
    double rate = 0.0;
    double curvature = 0.0;
};

Residual33Fits fit_residual33(const std::vector<SampleRow>& rows, double lo, double hi) {
    Residual33Fits out;
    std::vector<const SampleRow*> positive;
    for (const auto& r : rows) {
        if (r.t > 0.0) positive.push_back(&r);
    }
    if (positive.size() >= 3) {
        // Quadratic through the first three positive samples, evaluated at t = 0.
        const double t1 = positive[0]->t, t2 = positive[1]->t, t3 = positive[2]->t;
        const double y1 = positive[0]->residual33, y2 = positive[1]->residual33, y3 = positive[2]->residual33;
        out.zero = y1 * (t2 * t3) / ((t1 - t2) * (t1 - t3)) + y2 * (t1 * t3) / ((t2 - t1) * (t2 - t3)) +
                   y3 * (t1 * t2) / ((t3 - t1) * (t3 - t2));
    }
    std::vector<double> lx, ly;
    double s22 = 0.0, s23 = 0.0, s33 = 0.0, b2 = 0.0, b3 = 0.0;
    for (const auto& r : rows) {
        if (!in_window(r.t, lo, hi)) continue;
        const double t = r.t, y = r.residual33;
        s22 += t * t;
        s23 += t * t * t;
        s33 += t * t * t * t;
        b2 += t * y;
        b3 += t * t * y;
        const double diff = y - out.zero;
        if (diff > 0.0) {
            lx.push_back(std::log(t));
            ly.push_back(std::log(diff));
        }
    }
    const double det = s22 * s33 - s23 * s23;
    if (det != 0.0) {
        out.rate = (b2 * s33 - b3 * s23) / det;
        out.curvature = (s22 * b3 - s23 * b2) / det;
    }
    if (lx.size() >= 2) out.exponent = fit_line(lx, ly).slope;
    return out;
}

double relative_drift(const std::vector<double>& e) {
    if (e.empty() || e.front() == 0.0) return 0.0;
    double worst = 0.0;
    for (double v : e) worst = std::max(worst, std::abs(v - e.front()));
    return worst / std::abs(e.front());
}

}  // namespace

PairRecord run_pair(int n, const ExperimentConfig& config, const ProgressCallback& progress) {
    const auto start = std::chrono::steady_clock::now();
    auto say = [&](const std::string& msg) {
        if (progress) progress("n=" + std::to_string(n) + ": " + msg);
    };

    PairRecord rec;
    rec.n = n;
    rec.grid = grid_for(config, n);
    const GridPtr grid = Grid::create(rec.grid);
    const DyadicPartitionPtr partition = build_partition(grid);
    ProfileOptions popt;
    popt.enforce_boundary_decay = config.enforce_boundary_decay;
    SequenceParams params;
    params.n = n;
    params.s = config.besov.s;
    params.profile = build_profile(config.resolved_support_radius(), config.resolved_plateau_radius(), grid, popt);
    params.validate();

    rec.frequency = params.frequency();
    rec.resolution_margin = rec.grid.dealias_cutoff() - (rec.frequency + params.annulus_halfwidth());
    rec.boundary_ratio = params.profile->boundary_ratio;

    const BesovParams& bp = config.besov;
    auto besov = [&](const VectorField& u) { return besov_norm(u, bp, *partition); };

    const ScalarField f = make_f_n(params);
    const ScalarField g = config.zero_perturbation ? ScalarField::zeros(grid) : make_g_n(params);
    std::vector<ScalarField> uc{f}, vc{f + g};
    for (int i = 1; i < grid->dimension(); ++i) {
        uc.push_back(ScalarField::zeros(grid));
        vc.push_back(ScalarField::zeros(grid));
    }
    const VectorField u0(std::move(uc));
    const VectorField v0(std::move(vc));
    const VectorField transport = advection(v0, v0);

    rec.delta0 = besov(u0 - v0);
    rec.gn_gradfn_norm = besov(VectorField({dealias(multiply(g, partial_derivative(f, 0)))}));
    rec.transport_anchor = transport_anchor(params, bp.p);
    rec.transport_norm = besov(transport);

    SolverConfig solver;
    solver.formulation = Formulation::velocity;
    solver.t_end = config.t0;
    solver.sample_times = config.resolved_sample_times();
    solver.cfl = config.cfl;
    solver.dt = config.dt;

    say("integrating u^n");
    // Spectral-only copies: the integrator's fields also cache physical values.
    std::vector<double> residual32, energy_u;
    std::vector<VectorField> u_samples;
    const SolutionTrajectory traj_u = integrate(u0, solver, [&](double, const VectorField& u) {
        residual32.push_back(besov(u - u0));
        energy_u.push_back(h1_energy(u));
        std::vector<ScalarField> c;
        for (const auto& x : u.components()) c.push_back(ScalarField::from_spectral(grid, ComplexBuffer::copy_of(x.spectral())));
        u_samples.emplace_back(std::move(c));
        return false;
    });

    say("integrating v^n");
    std::vector<SampleRow> rows;
    std::vector<VectorField> v_final;
    std::size_t index = 0;
    const SolutionTrajectory traj_v = integrate(v0, solver, [&](double t, const VectorField& v) {
        SampleRow row;
        row.t = t;
        row.residual32 = residual32.at(index);
        row.residual33 = besov(v - v0 + t * transport);
        row.separation = besov(u_samples.at(index) - v);
        row.energy_u = energy_u.at(index);
        row.energy_v = h1_energy(v);
        rows.push_back(row);
        ++index;
        v_final.assign(1, v);
        return false;
    });

    if (config.cross_check) {
        say("momentum-form cross-check");
        SolverConfig mom = solver;
        mom.formulation = Formulation::momentum;
        mom.sample_times = {config.t0};
        const SolutionTrajectory traj_m = integrate(v0, mom);
        rec.cross_gap = relative_l2_gap(traj_m.samples.back().u, v_final.at(0));
    }

    rec.rows = std::move(rows);
    for (const auto& r : rec.rows) rec.residual32_sup = std::max(rec.residual32_sup, r.residual32);
    const Residual33Fits r33 = fit_residual33(rec.rows, config.fit_lo, config.fit_hi);
    rec.residual33_zero = r33.zero;
    rec.residual33_exponent = r33.exponent;
    rec.residual33_rate = r33.rate;
    rec.residual33_curvature = r33.curvature;

    std::vector<double> t, sep, eu, ev;
    for (const auto& r : rec.rows) {
        t.push_back(r.t);
        sep.push_back(r.separation);
        eu.push_back(r.energy_u);
        ev.push_back(r.energy_v);
    }
    rec.separation = fit_separation(t, sep, config.fit_lo, config.fit_hi);
    rec.energy_drift_u = relative_drift(eu);
    rec.energy_drift_v = relative_drift(ev);
    rec.max_shell_fraction = std::max(traj_u.metadata.max_shell_fraction, traj_v.metadata.max_shell_fraction);
    rec.steps_u = traj_u.metadata.steps;
    rec.steps_v = traj_v.metadata.steps;
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    say("done");
    return rec;
}

void summarize(ExperimentReport& report) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto fit_or_nan = [&](const std::vector<double>& n, const std::vector<double>& v) {
        try {
            return fit_decay_exponent(n, v);
        } catch (const std::invalid_argument&) {
            return LineFit{nan, nan, nan, nan};
        }
    };
    std::vector<double> n, d0, r32, r33, gf;
    for (const auto& r : report.records) {
        n.push_back(r.n);
        d0.push_back(r.delta0);
        r32.push_back(r.residual32_sup);
        r33.push_back(r.residual33_rate);
        gf.push_back(r.gn_gradfn_norm);
    }
    report.delta0_fit = fit_or_nan(n, d0);
    report.residual32_fit = fit_or_nan(n, r32);
    report.residual33_rate_fit = fit_or_nan(n, r33);
    report.gn_gradfn_fit = fit_or_nan(n, gf);

    report.floor_ratio = nan;
    report.min_separation_r_squared = nan;
    if (!report.records.empty()) {
        const double base = report.records.front().separation.min_ratio;
        double ratio = std::numeric_limits<double>::infinity();
        double r2 = std::numeric_limits<double>::infinity();
        for (const auto& r : report.records) {
            ratio = std::min(ratio, base > 0.0 ? r.separation.min_ratio / base : nan);
            r2 = std::min(r2, r.separation.r_squared);
        }
        report.floor_ratio = ratio;
        report.min_separation_r_squared = r2;
    }
}

ExperimentReport run_experiment(const ExperimentConfig& config, const ProgressCallback& progress) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    ExperimentReport report;
    report.config = config;
    report.eps = eps_s(config.besov.s, config.besov.p, config.dimension);

    std::vector<int> ns = config.n_list;
    std::sort(ns.begin(), ns.end());
    report.records.resize(ns.size());
    std::vector<std::exception_ptr> errors(ns.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < ns.size(); i = next++) {
            try {
                report.records[i] = run_pair(ns[i], config, progress);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto threads = std::min<std::size_t>(static_cast<std::size_t>(config.workers), ns.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    summarize(report);
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace hdch
