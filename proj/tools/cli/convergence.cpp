#include "convergence.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "fixtures.hpp"
#include "hdch/error.hpp"
#include "hdch/integrator.hpp"
#include "hdch/report.hpp"

namespace hdch::cli {

void ConvergenceConfig::validate() const {
    grid.validate();
    if (seeds.empty()) throw ConfigError("convergence: seeds must not be empty");
    if (!(t_end > 0.0) || !(dt > 0.0) || dt > t_end) throw ConfigError("convergence: need 0 < dt <= t_end");
    if (levels < 2) throw ConfigError("convergence: levels must be >= 2");
    if (!(budget_seconds > 0.0)) throw ConfigError("convergence: budget_seconds must be positive");
}

namespace {

double order_of(double coarse, double fine) {
    return coarse > 0.0 && fine > 0.0 ? std::log2(coarse / fine) : std::numeric_limits<double>::quiet_NaN();
}

VectorField final_state(const VectorField& u0, Formulation form, double dt, double t_end, bool dealias) {
    SolverConfig c;
    c.formulation = form;
    c.dt = dt;
    c.t_end = t_end;
    c.dealias = dealias;
    return integrate(u0, c).samples.back().u;
}

}  // namespace

ConvergenceResult run_convergence(const ConvergenceConfig& config, const FixtureFactory& fixture) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
    ConvergenceResult out;

    double prev = 0.0;
    for (int l = 0; l <= config.levels; ++l) {
        const double dt = 0.1 / std::exp2(l);
        double y = 1.0;
        for (int i = 0; i < static_cast<int>(std::lround(1.0 / dt)); ++i) y = rk4_step(y, dt, [](double v) { return -v; });
        const double err = std::abs(y - std::exp(-1.0));
        ConvergenceRow row{"ode", 0, l, 0, dt, err};
        if (l > 0) out.ode_order = row.order = order_of(prev, err);
        out.rows.push_back(row);
        prev = err;
    }

    const GridPtr base = Grid::create(config.grid);
    for (int seed : config.seeds) {
        if (elapsed() > config.budget_seconds) {
            out.budget_exceeded = true;
            break;
        }
        const VectorField u0 = fixture(base, seed);

        SolverConfig adaptive;
        adaptive.t_end = config.t_end;
        const auto vel = integrate(u0, adaptive).samples.back().u;
        adaptive.formulation = Formulation::momentum;
        const auto mom = integrate(u0, adaptive).samples.back().u;
        const double gap0 = relative_l2_gap(mom, vel);
        out.default_gap.push_back(gap0);
        out.rows.push_back({"gap_default", seed, 0, config.grid.points_per_axis, 0.0, gap0});

        std::vector<VectorField> ladder;
        for (int l = 0; l <= config.levels; ++l) {
            ladder.push_back(final_state(u0, Formulation::velocity, config.dt / std::exp2(l), config.t_end, true));
        }
        double prev_diff = 0.0;
        for (int l = 0; l < config.levels; ++l) {
            const double diff = relative_l2_gap(ladder[l], ladder[l + 1]);
            ConvergenceRow row{"self", seed, l, config.grid.points_per_axis, config.dt / std::exp2(l), diff};
            if (l > 0) row.order = order_of(prev_diff, diff);
            out.rows.push_back(row);
            prev_diff = diff;
        }
        out.self_order.push_back(out.rows.back().order);

        double first_gap = 0.0, second_gap = 0.0, last_gap = 0.0;
        for (int l = 0; l < config.levels; ++l) {
            if (elapsed() > config.budget_seconds) {
                out.budget_exceeded = true;
                break;
            }
            GridSpec spec = config.grid;
            spec.points_per_axis <<= l;
            const GridPtr g = Grid::create(spec);
            const VectorField v0 = fixture(g, seed);
            const double dt = config.dt / std::exp2(l);
            const double gap = relative_l2_gap(final_state(v0, Formulation::momentum, dt, config.t_end, config.gap_dealias),
                                               final_state(v0, Formulation::velocity, dt, config.t_end, config.gap_dealias));
            ConvergenceRow row{"gap", seed, l, spec.points_per_axis, dt, gap};
            if (l > 0) row.order = order_of(last_gap, gap);
            out.rows.push_back(row);
            if (l == 0) first_gap = gap;
            if (l == 1) second_gap = gap;
            last_gap = gap;
        }
        out.gap_reduction.push_back(second_gap > 0.0 ? first_gap / second_gap : std::numeric_limits<double>::infinity());
    }
    out.wall_seconds = elapsed();
    return out;
}

ConvergenceResult run_convergence(const ConvergenceConfig& config) {
    return run_convergence(config, [&](const GridPtr& g, int seed) {
        return trig_fixture(g, static_cast<std::uint64_t>(seed), config.max_mode, config.amplitude);
    });
}

std::string convergence_csv(const ConvergenceResult& result) {
    std::ostringstream out;
    out << "study,seed,level,points_per_axis,dt,value,order\n";
    for (const auto& r : result.rows) {
        out << r.study << ',' << r.seed << ',' << r.level << ',' << r.points_per_axis << ',' << format_double(r.dt)
            << ',' << format_double(r.value) << ',' << format_double(r.order) << '\n';
    }
    return out.str();
}

std::string convergence_json(const ConvergenceResult& result) {
    auto finite = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
    nlohmann::json self = nlohmann::json::array(), gap = nlohmann::json::array(), red = nlohmann::json::array();
    for (double x : result.self_order) self.push_back(finite(x));
    for (double x : result.default_gap) gap.push_back(finite(x));
    for (double x : result.gap_reduction) red.push_back(finite(x));
    nlohmann::json doc = {{"ode_order", finite(result.ode_order)},
                          {"self_order", self},
                          {"default_gap", gap},
                          {"gap_reduction", red},
                          {"budget_exceeded", result.budget_exceeded}};
    return doc.dump(2) + "\n";
}

}  // namespace hdch::cli
