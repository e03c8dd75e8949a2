#include "hdch/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hdch/error.hpp"
#include "hdch/version.hpp"

namespace hdch {

using nlohmann::json;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json fit_json(const LineFit& f) {
    return {{"slope", number(f.slope)},
            {"intercept", number(f.intercept)},
            {"residual", number(f.residual)},
            {"r_squared", number(f.r_squared)}};
}

json grid_json(const GridSpec& g) {
    return {{"dimension", g.dimension},
            {"points_per_axis", g.points_per_axis},
            {"side_length", g.side_length},
            {"dealias_fraction", g.dealias_fraction}};
}

json config_json(const ExperimentConfig& c) {
    return {{"dimension", c.dimension},
            {"s", c.besov.s},
            {"p", number(c.besov.p)},
            {"r", number(c.besov.r)},
            {"p_is_inf", std::isinf(c.besov.p)},
            {"r_is_inf", std::isinf(c.besov.r)},
            {"n_list", c.n_list},
            {"t0", c.t0},
            {"sample_times", c.resolved_sample_times()},
            {"points_per_axis", c.points_per_axis},
            {"side_length", c.side_length},
            {"dealias_fraction", c.dealias_fraction},
            {"fallback_dealias_fraction", c.fallback_dealias_fraction},
            {"support_radius", c.resolved_support_radius()},
            {"plateau_radius", c.resolved_plateau_radius()},
            {"enforce_boundary_decay", c.enforce_boundary_decay},
            {"cfl", c.cfl},
            {"dt", c.dt},
            {"fit_window", {c.fit_lo, c.fit_hi}},
            {"cross_check", c.cross_check},
            {"zero_perturbation", c.zero_perturbation},
            {"formulation", "velocity"}};
}

json record_json(const PairRecord& r) {
    return {{"n", r.n},
            {"grid", grid_json(r.grid)},
            {"frequency", r.frequency},
            {"resolution_margin", r.resolution_margin},
            {"boundary_ratio", r.boundary_ratio},
            {"delta0", r.delta0},
            {"gn_gradfn_norm", r.gn_gradfn_norm},
            {"transport_anchor", r.transport_anchor},
            {"transport_norm", r.transport_norm},
            {"residual32_sup", r.residual32_sup},
            {"residual33_zero", number(r.residual33_zero)},
            {"residual33_exponent", number(r.residual33_exponent)},
            {"residual33_rate", number(r.residual33_rate)},
            {"residual33_curvature", number(r.residual33_curvature)},
            {"c_est", r.separation.c_est},
            {"separation_intercept", r.separation.intercept},
            {"separation_r_squared", r.separation.r_squared},
            {"separation_min_ratio", r.separation.min_ratio},
            {"energy_drift_u", r.energy_drift_u},
            {"energy_drift_v", r.energy_drift_v},
            {"cross_formulation_gap", number(r.cross_gap)},
            {"max_shell_fraction", r.max_shell_fraction},
            {"steps_u", r.steps_u},
            {"steps_v", r.steps_v}};
}

void require_records(const ExperimentReport& report) {
    if (report.records.empty()) throw ConfigError("experiment report has no records (empty n_list)");
}

}  // namespace

std::string experiment_csv(const ExperimentReport& report) {
    require_records(report);
    std::ostringstream out;
    out << "n,t,delta0,residual32,residual33,separation,gn_gradfn_norm,energy_u,energy_v\n";
    for (const auto& r : report.records) {
        for (const auto& row : r.rows) {
            out << r.n << ',' << format_double(row.t) << ',' << format_double(r.delta0) << ','
                << format_double(row.residual32) << ',' << format_double(row.residual33) << ','
                << format_double(row.separation) << ',' << format_double(r.gn_gradfn_norm) << ','
                << format_double(row.energy_u) << ',' << format_double(row.energy_v) << '\n';
        }
    }
    return out.str();
}

std::string experiment_summary_json(const ExperimentReport& report) {
    require_records(report);
    json per_n = json::array();
    for (const auto& r : report.records) per_n.push_back(record_json(r));
    json doc = {{"schema", "hdch-experiment-summary/1"},
                {"version", kVersion},
                {"config", config_json(report.config)},
                {"eps_s", report.eps},
                {"fits",
                 {{"delta0", fit_json(report.delta0_fit)},
                  {"residual32_sup", fit_json(report.residual32_fit)},
                  {"residual33_rate", fit_json(report.residual33_rate_fit)},
                  {"gn_gradfn_norm", fit_json(report.gn_gradfn_fit)}}},
                {"separation_floor_ratio", number(report.floor_ratio)},
                {"separation_min_r_squared", number(report.min_separation_r_squared)},
                {"per_n", per_n}};
    return doc.dump(2) + "\n";
}

std::string experiment_gnuplot(const ExperimentReport& report) {
    require_records(report);
    std::ostringstream out;
    bool first = true;
    for (const auto& r : report.records) {
        if (!first) out << "\n\n";
        first = false;
        out << "# n=" << r.n << "\n# t residual32 residual33 separation separation_over_t anchor energy_u energy_v\n";
        for (const auto& row : r.rows) {
            const double ratio = row.t > 0.0 ? row.separation / row.t : std::nan("");
            out << format_double(row.t) << ' ' << format_double(row.residual32) << ' '
                << format_double(row.residual33) << ' ' << format_double(row.separation) << ' '
                << format_double(ratio) << ' ' << format_double(row.t * r.gn_gradfn_norm) << ' '
                << format_double(row.energy_u) << ' ' << format_double(row.energy_v) << '\n';
        }
    }
    return out.str();
}

std::string experiment_timings_json(const ExperimentReport& report) {
    json per_n = json::array();
    for (const auto& r : report.records) per_n.push_back({{"n", r.n}, {"wall_seconds", r.wall_seconds}});
    json doc = {{"total_wall_seconds", report.wall_seconds}, {"per_n", per_n}};
    return doc.dump(2) + "\n";
}

void validate_summary_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("summary is not valid JSON: ") + e.what());
    }
    auto need = [](const json& obj, const char* key, json::value_t type, const std::string& where) {
        if (!obj.is_object() || !obj.contains(key)) throw Error("summary: missing key " + where + key);
        const json& v = obj.at(key);
        const bool numeric = type == json::value_t::number_float;
        const bool ok = numeric ? (v.is_number() || v.is_null()) : v.type() == type ||
                                     (type == json::value_t::number_integer && v.is_number_integer());
        if (!ok) throw Error("summary: key " + where + key + " has the wrong type");
    };
    using vt = json::value_t;
    need(doc, "schema", vt::string, "");
    if (doc.at("schema") != "hdch-experiment-summary/1") throw Error("summary: unknown schema tag");
    need(doc, "version", vt::string, "");
    need(doc, "config", vt::object, "");
    need(doc, "eps_s", vt::number_float, "");
    need(doc, "fits", vt::object, "");
    need(doc, "separation_floor_ratio", vt::number_float, "");
    need(doc, "separation_min_r_squared", vt::number_float, "");
    need(doc, "per_n", vt::array, "");
    for (const char* key : {"dimension", "points_per_axis"}) need(doc["config"], key, vt::number_integer, "config.");
    for (const char* key : {"s", "t0", "side_length", "cfl"}) need(doc["config"], key, vt::number_float, "config.");
    need(doc["config"], "n_list", vt::array, "config.");
    for (const char* fit : {"delta0", "residual32_sup", "residual33_rate", "gn_gradfn_norm"}) {
        need(doc["fits"], fit, vt::object, "fits.");
        for (const char* key : {"slope", "intercept", "residual", "r_squared"}) {
            need(doc["fits"][fit], key, vt::number_float, std::string("fits.") + fit + ".");
        }
    }
    if (doc["per_n"].empty()) throw Error("summary: per_n is empty");
    for (const auto& r : doc["per_n"]) {
        need(r, "n", vt::number_integer, "per_n[].");
        need(r, "grid", vt::object, "per_n[].");
        for (const char* key : {"delta0", "gn_gradfn_norm", "residual32_sup", "residual33_zero",
                                "residual33_exponent", "c_est", "separation_r_squared", "separation_min_ratio",
                                "energy_drift_u", "energy_drift_v", "cross_formulation_gap"}) {
            need(r, key, vt::number_float, "per_n[].");
        }
    }
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

ReportPaths emit_report(const ExperimentReport& report, const std::filesystem::path& dir) {
    require_records(report);
    const std::string csv = experiment_csv(report);
    const std::string summary = experiment_summary_json(report);
    validate_summary_json(summary);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    ReportPaths paths{dir / "experiment.csv", dir / "summary.json", dir / "series.dat", dir / "timings.json"};
    write_file(paths.csv, csv);
    write_file(paths.summary, summary);
    write_file(paths.gnuplot, experiment_gnuplot(report));
    write_file(paths.timings, experiment_timings_json(report));
    return paths;
}

}  // namespace hdch
