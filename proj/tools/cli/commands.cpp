#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "fixtures.hpp"
#include "hdch/chdf.hpp"
#include "hdch/error.hpp"
#include "hdch/report.hpp"
#include "hdch/sequences.hpp"
#include "json_config.hpp"

namespace hdch::cli {

namespace {

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

void note(const RunContext& ctx, const std::string& msg) {
    if (ctx.verbosity > 0 && ctx.err) *ctx.err << msg << '\n';
}

BesovParams read_besov(StrictObject& obj, const BesovParams& fallback) {
    return BesovParams{obj.number("s", fallback.s), obj.extended("p", fallback.p), obj.extended("r", fallback.r)};
}

void besov_to_json(nlohmann::json& doc, const BesovParams& b) {
    doc["s"] = b.s;
    doc["p"] = extended_to_json(b.p);
    doc["r"] = extended_to_json(b.r);
}

}  // namespace

// ---- parsing -----------------------------------------------------------------

SimulateConfig parse_simulate(const nlohmann::json& doc) {
    StrictObject obj(doc, "simulate config");
    SimulateConfig d, c;
    c.grid = read_grid(obj, d.grid);
    c.initial = obj.string("initial", d.initial);
    c.initial_file = obj.string("initial_file", d.initial_file);
    c.amplitude = obj.number("amplitude", d.amplitude);
    c.n = obj.integer("n", d.n);
    c.s = obj.number("s", d.s);
    c.support_radius = obj.number("support_radius", d.support_radius);
    c.plateau_radius = obj.number("plateau_radius", d.plateau_radius);
    c.formulation = obj.string("formulation", d.formulation);
    c.dt = obj.number("dt", d.dt);
    c.cfl = obj.number("cfl", d.cfl);
    c.t_end = obj.number("t_end", d.t_end);
    c.sample_times = obj.numbers("sample_times", d.sample_times);
    c.dealias = obj.boolean("dealias", d.dealias);
    c.tail_tolerance = obj.number("tail_tolerance", d.tail_tolerance);
    obj.finish();
    if (c.initial != "zero" && c.initial != "sine" && c.initial != "file" && c.initial != "sequence_u" &&
        c.initial != "sequence_v") {
        throw ConfigError("simulate: initial must be zero, sine, file, sequence_u or sequence_v");
    }
    if (c.initial == "file" && c.initial_file.empty()) throw ConfigError("simulate: initial = file needs initial_file");
    if (c.formulation != "both") (void)parse_formulation(c.formulation);
    return c;
}

BesovConfig parse_besov(const nlohmann::json& doc) {
    StrictObject obj(doc, "besov config");
    BesovConfig d, c;
    c.field = obj.string("field", d.field);
    c.besov = read_besov(obj, d.besov);
    c.dealias_fraction = obj.number("dealias_fraction", d.dealias_fraction);
    c.check_resolution = obj.boolean("check_resolution", d.check_resolution);
    c.force_physical = obj.boolean("force_physical", d.force_physical);
    obj.finish();
    return c;
}

SequencesConfig parse_sequences(const nlohmann::json& doc) {
    StrictObject obj(doc, "sequences config");
    SequencesConfig d, c;
    c.grid = read_grid(obj, d.grid);
    c.besov = read_besov(obj, d.besov);
    c.n_list = obj.integers("n_list", d.n_list);
    c.support_radius = obj.number("support_radius", d.support_radius);
    c.plateau_radius = obj.number("plateau_radius", d.plateau_radius);
    c.enforce_boundary_decay = obj.boolean("enforce_boundary_decay", d.enforce_boundary_decay);
    obj.finish();
    if (c.n_list.empty()) throw ConfigError("sequences: n_list must not be empty");
    return c;
}

ExperimentConfig parse_experiment(const nlohmann::json& doc) {
    StrictObject obj(doc, "experiment config");
    ExperimentConfig d, c;
    c.dimension = obj.integer("dimension", d.dimension);
    c.besov = read_besov(obj, d.besov);
    c.n_list = obj.integers("n_list", d.n_list);
    c.t0 = obj.number("t0", d.t0);
    c.sample_times = obj.numbers("sample_times", d.sample_times);
    c.points_per_axis = obj.integer("points_per_axis", d.points_per_axis);
    c.side_length = obj.number("side_length", d.side_length);
    c.dealias_fraction = obj.number("dealias_fraction", d.dealias_fraction);
    c.fallback_dealias_fraction = obj.number("fallback_dealias_fraction", d.fallback_dealias_fraction);
    c.support_radius = obj.number("support_radius", d.support_radius);
    c.plateau_radius = obj.number("plateau_radius", d.plateau_radius);
    c.enforce_boundary_decay = obj.boolean("enforce_boundary_decay", d.enforce_boundary_decay);
    c.cfl = obj.number("cfl", d.cfl);
    c.dt = obj.number("dt", d.dt);
    c.fit_lo = obj.number("fit_lo", d.fit_lo);
    c.fit_hi = obj.number("fit_hi", d.fit_hi);
    c.cross_check = obj.boolean("cross_check", d.cross_check);
    c.zero_perturbation = obj.boolean("zero_perturbation", d.zero_perturbation);
    c.workers = obj.integer("workers", d.workers);
    obj.finish();
    return c;
}

ConvergenceConfig parse_convergence(const nlohmann::json& doc) {
    StrictObject obj(doc, "convergence config");
    ConvergenceConfig d, c;
    c.grid = read_grid(obj, d.grid);
    c.seeds = obj.integers("seeds", d.seeds);
    c.max_mode = obj.integer("max_mode", d.max_mode);
    c.amplitude = obj.number("amplitude", d.amplitude);
    c.t_end = obj.number("t_end", d.t_end);
    c.dt = obj.number("dt", d.dt);
    c.levels = obj.integer("levels", d.levels);
    c.gap_dealias = obj.boolean("gap_dealias", d.gap_dealias);
    c.budget_seconds = obj.number("budget_seconds", d.budget_seconds);
    obj.finish();
    return c;
}

// ---- effective configs -------------------------------------------------------

nlohmann::json to_json(const SimulateConfig& c) {
    nlohmann::json doc = grid_to_json(c.grid);
    doc.update({{"initial", c.initial},
                {"initial_file", c.initial_file},
                {"amplitude", c.amplitude},
                {"n", c.n},
                {"s", c.s},
                {"support_radius", c.support_radius},
                {"plateau_radius", c.plateau_radius},
                {"formulation", c.formulation},
                {"dt", c.dt},
                {"cfl", c.cfl},
                {"t_end", c.t_end},
                {"sample_times", c.sample_times},
                {"dealias", c.dealias},
                {"tail_tolerance", c.tail_tolerance}});
    return doc;
}

nlohmann::json to_json(const BesovConfig& c) {
    nlohmann::json doc = {{"field", c.field},
                          {"dealias_fraction", c.dealias_fraction},
                          {"check_resolution", c.check_resolution},
                          {"force_physical", c.force_physical}};
    besov_to_json(doc, c.besov);
    return doc;
}

nlohmann::json to_json(const SequencesConfig& c) {
    nlohmann::json doc = grid_to_json(c.grid);
    besov_to_json(doc, c.besov);
    doc.update({{"n_list", c.n_list},
                {"support_radius", c.support_radius},
                {"plateau_radius", c.plateau_radius},
                {"enforce_boundary_decay", c.enforce_boundary_decay}});
    return doc;
}

nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json doc = {{"dimension", c.dimension},
                          {"n_list", c.n_list},
                          {"t0", c.t0},
                          {"sample_times", c.sample_times},
                          {"points_per_axis", c.points_per_axis},
                          {"side_length", c.side_length},
                          {"dealias_fraction", c.dealias_fraction},
                          {"fallback_dealias_fraction", c.fallback_dealias_fraction},
                          {"support_radius", c.support_radius},
                          {"plateau_radius", c.plateau_radius},
                          {"enforce_boundary_decay", c.enforce_boundary_decay},
                          {"cfl", c.cfl},
                          {"dt", c.dt},
                          {"fit_lo", c.fit_lo},
                          {"fit_hi", c.fit_hi},
                          {"cross_check", c.cross_check},
                          {"zero_perturbation", c.zero_perturbation},
                          {"workers", c.workers}};
    besov_to_json(doc, c.besov);
    return doc;
}

nlohmann::json to_json(const ConvergenceConfig& c) {
    nlohmann::json doc = grid_to_json(c.grid);
    doc.update({{"seeds", c.seeds},
                {"max_mode", c.max_mode},
                {"amplitude", c.amplitude},
                {"t_end", c.t_end},
                {"dt", c.dt},
                {"levels", c.levels},
                {"gap_dealias", c.gap_dealias},
                {"budget_seconds", c.budget_seconds}});
    return doc;
}

// ---- runners -----------------------------------------------------------------

namespace {

VectorField initial_field(const SimulateConfig& c) {
    if (c.initial == "file") return read_chdf(std::filesystem::path(c.initial_file), c.grid.dealias_fraction);
    const GridPtr grid = Grid::create(c.grid);
    if (c.initial == "zero") return VectorField::zeros(grid);
    if (c.initial == "sine") return sine_fixture(grid, c.amplitude);
    const int d = c.grid.dimension;
    SequenceParams p;
    p.n = c.n;
    p.s = c.s;
    ProfileOptions popt;
    popt.enforce_boundary_decay = false;
    p.profile = build_profile(c.support_radius > 0 ? c.support_radius : default_support_radius(d),
                              c.plateau_radius > 0 ? c.plateau_radius : default_plateau_radius(d), grid, popt);
    return c.initial == "sequence_u" ? make_u0n(p) : make_v0n(p);
}

double linf(const VectorField& u) { return lp_norm(u, std::numeric_limits<double>::infinity()); }

}  // namespace

void run_simulate(const SimulateConfig& c, const RunContext& ctx) {
    const VectorField u0 = initial_field(c);
    ensure_dir(ctx.out_dir);
    const Dealiasing mode = c.dealias ? Dealiasing::on : Dealiasing::off;
    const VectorField rhs0 = rhs_velocity(u0, mode);
    write_chdf(ctx.out_dir / "rhs0.chdf", rhs0);

    SolverConfig solver;
    solver.dt = c.dt;
    solver.cfl = c.cfl;
    solver.t_end = c.t_end;
    solver.sample_times = c.sample_times;
    solver.dealias = c.dealias;
    solver.tail_tolerance = c.tail_tolerance;
    solver.formulation = c.formulation == "momentum" ? Formulation::momentum : Formulation::velocity;

    note(ctx, "integrating " + std::string(to_string(solver.formulation)) + " form");
    const SolutionTrajectory traj = integrate(u0, solver);
    nlohmann::json samples = nlohmann::json::array();
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const auto& s = traj.samples[i];
        const std::string name = "snapshot_" + std::to_string(i) + ".chdf";
        write_chdf(ctx.out_dir / name, s.u);
        samples.push_back({{"t", s.t}, {"energy", s.energy}, {"linf", linf(s.u)}, {"file", name}});
    }

    nlohmann::json gaps = nullptr;
    if (c.formulation == "both") {
        note(ctx, "integrating momentum form");
        SolverConfig mom = solver;
        mom.formulation = Formulation::momentum;
        const SolutionTrajectory other = integrate(u0, mom);
        gaps = nlohmann::json::array();
        for (std::size_t i = 0; i < traj.samples.size(); ++i) {
            gaps.push_back(relative_l2_gap(other.samples[i].u, traj.samples[i].u));
        }
    }

    nlohmann::json doc = {{"config", to_json(c)},
                          {"grid", grid_to_json(u0.grid().spec())},
                          {"formulation", c.formulation},
                          {"rhs0_l2", lp_norm(rhs0, 2.0)},
                          {"rhs0_linf", linf(rhs0)},
                          {"steps", traj.metadata.steps},
                          {"min_dt", traj.metadata.min_dt},
                          {"max_dt", traj.metadata.max_dt},
                          {"max_shell_fraction", traj.metadata.max_shell_fraction},
                          {"samples", samples},
                          {"cross_formulation_gap", gaps}};
    write_text(ctx.out_dir / "diagnostics.json", doc.dump(2) + "\n");
    if (ctx.out) {
        *ctx.out << "wrote " << traj.samples.size() << " snapshots to " << ctx.out_dir.string() << '\n';
        if (!gaps.is_null()) *ctx.out << "cross-formulation gap at t_end: " << format_double(gaps.back().get<double>()) << '\n';
    }
}

void run_besov(const BesovConfig& c, const RunContext& ctx) {
    if (c.field.empty()) throw ConfigError("besov: no field file given");
    c.besov.validate();
    const VectorField u = read_chdf(std::filesystem::path(c.field), c.dealias_fraction);
    const auto partition = build_partition(u.grid_ptr());
    BesovOptions opt;
    opt.check_resolution = c.check_resolution;
    opt.force_physical = c.force_physical;
    const auto blocks = block_norms(u, c.besov, *partition, opt);
    const double norm = aggregate_blocks(blocks, c.besov.r);
    std::ostringstream csv;
    csv << "j,lp,weighted\n";
    for (const auto& b : blocks) csv << b.j << ',' << format_double(b.lp) << ',' << format_double(b.weighted) << '\n';
    ensure_dir(ctx.out_dir);
    write_text(ctx.out_dir / "blocks.csv", csv.str());
    if (ctx.out) *ctx.out << "besov_norm = " << format_double(norm) << '\n';
}

namespace {

std::vector<SequenceParams> sequence_params(const SequencesConfig& c) {
    const GridPtr grid = Grid::create(c.grid);
    const int d = c.grid.dimension;
    ProfileOptions popt;
    popt.enforce_boundary_decay = c.enforce_boundary_decay;
    const auto profile = build_profile(c.support_radius > 0 ? c.support_radius : default_support_radius(d),
                                       c.plateau_radius > 0 ? c.plateau_radius : default_plateau_radius(d), grid, popt);
    std::vector<SequenceParams> out;
    for (int n : c.n_list) {
        SequenceParams p;
        p.n = n;
        p.s = c.besov.s;
        p.profile = profile;
        p.validate();
        out.push_back(p);
    }
    return out;
}

}  // namespace

void run_sequences_verify(const SequencesConfig& c, const RunContext& ctx) {
    c.besov.validate();
    const auto params = sequence_params(c);
    const auto partition = build_partition(params.front().grid_ptr());
    std::vector<SequenceCheck> rows;
    for (const auto& p : params) {
        note(ctx, "verifying n=" + std::to_string(p.n));
        rows.push_back(verify_sequence(p, c.besov, *partition));
    }
    std::ostringstream csv;
    write_sequence_csv(csv, rows);
    ensure_dir(ctx.out_dir);
    write_text(ctx.out_dir / "sequences.csv", csv.str());
    if (ctx.out) *ctx.out << csv.str();
}

void run_sequences_export(const SequencesConfig& c, const RunContext& ctx) {
    const auto params = sequence_params(c);
    ensure_dir(ctx.out_dir);
    for (const auto& p : params) {
        const std::string n = std::to_string(p.n);
        write_chdf(ctx.out_dir / ("f_" + n + ".chdf"), VectorField({make_f_n(p)}));
        write_chdf(ctx.out_dir / ("g_" + n + ".chdf"), VectorField({make_g_n(p)}));
    }
    if (ctx.out) *ctx.out << "wrote " << 2 * params.size() << " fields to " << ctx.out_dir.string() << '\n';
}

void run_experiment_command(const ExperimentConfig& c, const RunContext& ctx) {
    ProgressCallback progress;
    if (ctx.verbosity > 0 && ctx.err) progress = [&](const std::string& msg) { *ctx.err << msg << '\n'; };
    const ExperimentReport report = run_experiment(c, progress);
    const ReportPaths paths = emit_report(report, ctx.out_dir);
    if (!ctx.out) return;
    auto& out = *ctx.out;
    out << "eps_s = " << format_double(report.eps) << '\n'
        << "delta0 slope = " << format_double(report.delta0_fit.slope) << '\n'
        << "residual32 sup slope = " << format_double(report.residual32_fit.slope) << '\n'
        << "residual33 rate slope = " << format_double(report.residual33_rate_fit.slope) << '\n'
        << "separation floor ratio = " << format_double(report.floor_ratio) << '\n'
        << "separation min R^2 = " << format_double(report.min_separation_r_squared) << '\n';
    for (const auto& r : report.records) {
        out << "n=" << r.n << " residual33 exponent = " << format_double(r.residual33_exponent)
            << ", c_est = " << format_double(r.separation.c_est) << '\n';
    }
    out << "report written to " << paths.summary.parent_path().string() << '\n';
}

void run_convergence_command(const ConvergenceConfig& c, const RunContext& ctx) {
    const ConvergenceResult result = run_convergence(c);
    ensure_dir(ctx.out_dir);
    write_text(ctx.out_dir / "convergence.csv", convergence_csv(result));
    write_text(ctx.out_dir / "convergence.json", convergence_json(result));
    if (ctx.out) {
        *ctx.out << convergence_csv(result);
        if (result.budget_exceeded) *ctx.out << "budget exceeded: ladder truncated\n";
    }
}

}  // namespace hdch::cli
