#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "hdch/error.hpp"
#include "hdch/experiment.hpp"
#include "hdch/report.hpp"

using namespace hdch;
using std::numbers::pi;

namespace {

/// Small one-dimensional configuration, seconds to run.
ExperimentConfig small_config() {
    ExperimentConfig c;
    c.dimension = 1;
    c.besov = BesovParams{2.0, 2.0, 2.0};
    c.n_list = {3, 4, 5};
    c.points_per_axis = 256;
    c.side_length = 4 * pi;
    return c;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("eps_s examples") {
    CHECK(eps_s(3.0, 2.0, 2) == doctest::Approx(0.5));
    CHECK(eps_s(2.5, 2.0, 2) == doctest::Approx(0.25));
    CHECK(eps_s(1.6, std::numeric_limits<double>::infinity(), 3) == doctest::Approx(0.05));
    CHECK(eps_s(10.0, 1.0, 1) == doctest::Approx(0.5));
}

TEST_CASE("regularity hypothesis violations name the constraint") {
    CHECK_THROWS_AS(eps_s(2.0, 2.0, 2), ConfigError);
    CHECK_THROWS_AS(eps_s(1.5, std::numeric_limits<double>::infinity(), 2), ConfigError);
    try {
        check_regularity_hypothesis(BesovParams{1.9, 2.0, 2.0}, 2);
        FAIL("expected a violation");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("s > max{1 + d/p, 3/2}") != std::string::npos);
    }
}

TEST_CASE("line fits on exact data") {
    const std::vector<double> n{4, 5, 6};
    const std::vector<double> v{std::exp2(-4), std::exp2(-5), std::exp2(-6)};
    const auto f = fit_decay_exponent(n, v);
    CHECK(f.slope == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(f.r_squared == doctest::Approx(1.0));
    CHECK(f.residual <= 1e-14);
    CHECK_THROWS_AS(fit_decay_exponent(std::vector<double>{1, 2}, std::vector<double>{1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(fit_decay_exponent(n, std::vector<double>{1, 0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(fit_line(std::vector<double>{1}, std::vector<double>{1}), std::invalid_argument);

    const std::vector<double> t{0.0, 0.025, 0.05, 0.1, 0.2, 0.25};
    std::vector<double> sep;
    for (double x : t) sep.push_back(0.7 * x);
    const auto s = fit_separation(t, sep, 0.05, 0.25);
    CHECK(s.c_est == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(std::abs(s.intercept) <= 1e-14);
    CHECK(s.min_ratio == doctest::Approx(0.7).epsilon(1e-14));
    CHECK_THROWS_AS(fit_separation(t, sep, 0.3, 0.4), std::invalid_argument);
}

TEST_CASE("experiment config validation") {
    auto c = small_config();
    CHECK_NOTHROW(c.validate());
    CHECK(c.resolved_sample_times().size() == 11);
    CHECK(c.resolved_support_radius() == 0.5);
    c.n_list = {3, 3};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_config();
    c.n_list = {6};  // 90.7 exceeds even the 0.75 cutoff of 48
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_config();
    c.fit_hi = 0.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_config();
    c.besov.s = 1.2;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("grid selection uses the fallback fraction only when needed") {
    ExperimentConfig c;
    CHECK(grid_for(c, 4).dealias_fraction == doctest::Approx(2.0 / 3.0));
    CHECK(grid_for(c, 5).dealias_fraction == doctest::Approx(2.0 / 3.0));
    CHECK(grid_for(c, 6).dealias_fraction == 0.75);
    CHECK_THROWS_AS(grid_for(c, 7), ConfigError);
}

TEST_CASE("identical data stay identical") {
    auto c = small_config();
    c.zero_perturbation = true;
    c.n_list = {3};
    const auto rec = run_pair(3, c);
    CHECK(rec.delta0 == 0.0);
    for (const auto& row : rec.rows) CHECK(row.separation <= 1e-10);
}

TEST_CASE("small experiment: fits, conservation and determinism") {
    const auto c = small_config();
    const auto report = run_experiment(c);
    REQUIRE(report.records.size() == 3);
    CHECK(report.eps == doctest::Approx(0.25));
    // delta0 = |g_n|_B halves exactly with n.
    CHECK(report.delta0_fit.slope == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(report.records[2].grid.dealias_fraction == 0.75);
    for (const auto& r : report.records) {
        CAPTURE(r.n);
        CHECK(r.rows.size() == 11);
        CHECK(r.rows.front().t == 0.0);
        CHECK(r.rows.back().t == c.t0);
        CHECK(r.rows.front().residual32 == 0.0);
        CHECK(r.rows.front().separation == doctest::Approx(r.delta0).epsilon(1e-12));
        // n = 5 runs at the 0.75 fallback, where truncation effects are larger.
        const double tol = r.n == 5 ? 1e-3 : 1e-6;
        CHECK(r.energy_drift_u <= tol);
        CHECK(r.energy_drift_v <= tol);
        CHECK(r.cross_gap <= tol);
        CHECK(r.resolution_margin > 0.0);
    }
    const auto again = run_experiment(c);
    CHECK(experiment_csv(again) == experiment_csv(report));
    CHECK(experiment_summary_json(again) == experiment_summary_json(report));
}

TEST_CASE("report emission and schema") {
    ExperimentReport empty;
    CHECK_THROWS_AS(experiment_csv(empty), ConfigError);
    CHECK_THROWS_AS(emit_report(empty, std::filesystem::temp_directory_path() / "hdch_empty"), ConfigError);

    auto c = small_config();
    c.n_list = {3};
    c.cross_check = false;
    const auto report = run_experiment(c);
    const auto dir = std::filesystem::temp_directory_path() / "hdch_report_test";
    std::filesystem::remove_all(dir);
    const auto paths = emit_report(report, dir);
    const std::string csv = slurp(paths.csv);
    CHECK(csv.rfind("n,t,delta0,residual32,residual33,separation,gn_gradfn_norm,energy_u,energy_v\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);
    const std::string summary = slurp(paths.summary);
    CHECK_NOTHROW(validate_summary_json(summary));
    CHECK(summary.find("\"cross_formulation_gap\": null") != std::string::npos);
    CHECK(std::filesystem::exists(paths.gnuplot));
    CHECK(std::filesystem::exists(paths.timings));
    CHECK_THROWS_AS(validate_summary_json("{}"), Error);
    CHECK_THROWS_AS(validate_summary_json("not json"), Error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("number formatting round-trips") {
    for (double x : {0.1, 1.0 / 3.0, 6.02e23, -2.5e-300}) CHECK(std::stod(format_double(x)) == x);
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}
