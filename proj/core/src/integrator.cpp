#include "hdch/integrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "hdch/error.hpp"

namespace hdch {

std::string_view to_string(Formulation f) { return f == Formulation::velocity ? "velocity" : "momentum"; }

Formulation parse_formulation(std::string_view name) {
    if (name == "velocity") return Formulation::velocity;
    if (name == "momentum") return Formulation::momentum;
    throw ConfigError("unknown formulation '" + std::string(name) + "' (expected velocity or momentum)");
}

void SolverConfig::validate() const {
    std::ostringstream msg;
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        msg << "t_end must be positive (got " << t_end << ")";
    } else if (dt < 0.0 || !std::isfinite(dt)) {
        msg << "dt must be >= 0 (got " << dt << "; 0 selects the CFL rule)";
    } else if (dt == 0.0 && !(cfl > 0.0)) {
        msg << "cfl must be positive (got " << cfl << ")";
    } else {
        for (double t : sample_times) {
            if (!(t >= 0.0 && t <= t_end)) {
                msg << "sample time " << t << " lies outside [0, " << t_end << "]";
                throw ConfigError(msg.str());
            }
        }
        return;
    }
    throw ConfigError(msg.str());
}

std::vector<double> SolverConfig::resolved_sample_times() const {
    std::vector<double> t = sample_times.empty() ? std::vector<double>{t_end} : sample_times;
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

namespace {

VectorField combine(const VectorField& y, std::span<const double> c, std::span<const VectorField* const> k) {
    std::vector<ScalarField> out;
    std::vector<const ScalarField*> fields(k.size() + 1);
    std::vector<double> coeff(k.size() + 1);
    coeff[0] = 1.0;
    for (std::size_t j = 0; j < k.size(); ++j) coeff[j + 1] = c[j];
    for (int i = 0; i < y.size(); ++i) {
        fields[0] = &y[i];
        for (std::size_t j = 0; j < k.size(); ++j) fields[j + 1] = &(*k[j])[i];
        out.push_back(linear_combination(coeff, fields));
    }
    return VectorField(std::move(out));
}

}  // namespace

VectorField step_rk4(const VectorField& state, double dt, const RhsFunction& rhs, bool dealias, double t) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_rk4 requires dt > 0");
    const VectorField k1 = rhs(state);
    const double half[] = {0.5 * dt};
    const VectorField* p1[] = {&k1};
    const VectorField k2 = rhs(combine(state, half, p1));
    const VectorField* p2[] = {&k2};
    const VectorField k3 = rhs(combine(state, half, p2));
    const double full[] = {dt};
    const VectorField* p3[] = {&k3};
    const VectorField k4 = rhs(combine(state, full, p3));

    const double w[] = {dt / 6.0, dt / 3.0, dt / 3.0, dt / 6.0};
    const VectorField* all[] = {&k1, &k2, &k3, &k4};
    VectorField next = combine(state, w, all);
    if (dealias) next = hdch::dealias(next);
    if (!all_finite(next)) {
        std::ostringstream msg;
        msg << "solution blew up (non-finite values) in the step starting at t = " << t;
        throw BlowUpError(msg.str(), t);
    }
    return next;
}

double relative_l2_gap(const VectorField& a, const VectorField& b) {
    const double diff = l2_norm_spectral(a - b);
    const double ref = l2_norm_spectral(b);
    return ref > 0.0 ? diff / ref : diff;
}

double outer_shell_fraction(const VectorField& u) {
    const Grid& g = u.grid();
    const auto modes = g.max_mode();
    const double limit = 0.9 * g.spec().dealias_fraction * (g.points_per_axis() / 2.0);
    const auto keep = g.dealias_keep();
    double total = 0.0, shell = 0.0;
    for (const auto& c : u.components()) {
        const auto s = c.spectral();
        for (std::size_t k = 0; k < s.size(); ++k) {
            const double e = g.multiplicity(k) * std::norm(s[k]);
            total += e;
            if (keep[k] && modes[k] > limit) shell += e;
        }
    }
    return total > 0.0 ? shell / total : 0.0;
}

SolutionTrajectory integrate(const VectorField& u0, const SolverConfig& config, const SampleObserver& observer) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto times = config.resolved_sample_times();
    const GridPtr grid = u0.grid_ptr();
    const Dealiasing mode = config.dealias ? Dealiasing::on : Dealiasing::off;
    const bool velocity = config.formulation == Formulation::velocity;

    auto check_resolution = [&](const VectorField& f, double t) {
        const double tail = spectral_tail_fraction(f);
        if (tail > config.tail_tolerance) {
            std::ostringstream msg;
            msg << "under-resolved field at t = " << t << ": spectral energy fraction " << tail
                << " above the dealias cutoff exceeds " << config.tail_tolerance;
            throw UnresolvedFieldError(msg.str(), tail);
        }
    };
    check_resolution(u0, 0.0);

    VectorField state = velocity ? u0 : helmholtz_apply(u0);
    if (config.dealias) state = dealias(state);
    const RhsFunction rhs = velocity ? RhsFunction([mode](const VectorField& u) { return rhs_velocity(u, mode); })
                                     : RhsFunction([mode](const VectorField& m) { return rhs_momentum(m, mode); });
    auto velocity_of = [&](const VectorField& s) { return velocity ? s : helmholtz_inverse(s); };

    SolutionTrajectory traj;
    traj.metadata.config = config;
    traj.metadata.grid = grid->spec();
    traj.metadata.min_dt = std::numeric_limits<double>::infinity();

    auto record = [&](double t, const VectorField& u) {
        traj.metadata.max_shell_fraction = std::max(traj.metadata.max_shell_fraction, outer_shell_fraction(u));
        const double energy = h1_energy(u);
        if (!observer || observer(t, u)) traj.samples.push_back({t, u, energy});
    };

    double t = 0.0;
    std::size_t next = 0;
    while (next < times.size() && times[next] <= 0.0) {
        record(0.0, velocity_of(state));
        ++next;
    }
    const double h = grid->spacing();
    while (next < times.size()) {
        const double target = times[next];
        const VectorField u = velocity_of(state);
        double dt = config.dt > 0.0 ? config.dt : config.cfl * h / std::max(1.0, lp_norm(u, INFINITY));
        bool land = false;
        if (t + dt >= target - 1e-12 * std::max(1.0, target)) {
            dt = target - t;
            land = true;
        }
        state = step_rk4(state, dt, rhs, config.dealias, t);
        t = land ? target : t + dt;
        ++traj.metadata.steps;
        traj.metadata.min_dt = std::min(traj.metadata.min_dt, dt);
        traj.metadata.max_dt = std::max(traj.metadata.max_dt, dt);
        if (!config.dealias) check_resolution(state, t);
        if (land) {
            record(t, velocity_of(state));
            ++next;
        }
    }
    if (traj.metadata.steps == 0) traj.metadata.min_dt = 0.0;
    traj.metadata.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return traj;
}

}  // namespace hdch
