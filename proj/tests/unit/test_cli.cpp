#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "app.hpp"
#include "commands.hpp"
#include "fixtures.hpp"
#include "hdch/chdf.hpp"
#include "hdch/littlewood_paley.hpp"
#include "hdch/report.hpp"
#include "hdch/sequences.hpp"
#include "test_support.hpp"

using namespace hdch;
using namespace hdch::testing;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "hdch");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

/// Fresh scratch directory under the system temp dir.
fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("hdch_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_json(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("config errors map to exit code 2") {
    const auto dir = scratch("config");
    auto r = run({"simulate", "--config", write_json(dir, R"({"dimenson": 2})").string()});
    CHECK(r.code == cli::kConfigError);
    CHECK(r.err.find("unknown key \"dimenson\"") != std::string::npos);

    r = run({"experiment", "--config", write_json(dir, R"({"s": 2.0})").string()});
    CHECK(r.code == cli::kConfigError);
    CHECK(r.err.find("s > max{1 + d/p, 3/2}") != std::string::npos);

    r = run({"simulate", "--config", write_json(dir, R"({"t_end": "soon"})").string()});
    CHECK(r.code == cli::kConfigError);
    CHECK(run({"nonsense"}).code == cli::kConfigError);
    CHECK(run({}).code == cli::kConfigError);
    CHECK(run({"--help"}).code == cli::kSuccess);
}

TEST_CASE("I/O and numerical failures map to exit codes 4 and 3") {
    CHECK(run({"simulate", "--config", "/nonexistent/config.json"}).code == cli::kIoError);
    CHECK(run({"besov", "--field", "/nonexistent/field.chdf"}).code == cli::kIoError);
    const auto dir = scratch("numerical");
    // sin(x_1) on a box of side 3 is not periodic, so its spectrum has a heavy tail.
    const auto cfg = write_json(dir, R"({"side_length": 3.0, "t_end": 0.01})");
    CHECK(run({"simulate", "--config", cfg.string(), "--out", (dir / "out").string()}).code == cli::kNumericalError);
}

TEST_CASE("print-config shows every default and honors HDCH_WORKERS") {
    auto r = run({"experiment", "--print-config"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["points_per_axis"] == 2048);
    CHECK(doc["n_list"] == nlohmann::json::array({4, 5, 6}));
    CHECK(doc["workers"] == 1);
    ::setenv("HDCH_WORKERS", "3", 1);
    CHECK(nlohmann::json::parse(run({"experiment", "--print-config"}).out)["workers"] == 3);
    CHECK(nlohmann::json::parse(run({"experiment", "--print-config", "--workers", "2"}).out)["workers"] == 2);
    ::setenv("HDCH_WORKERS", "many", 1);
    CHECK(run({"experiment", "--print-config"}).code == cli::kConfigError);
    ::unsetenv("HDCH_WORKERS");
    for (const char* sub : {"simulate", "besov", "convergence"}) {
        r = run({sub, "--print-config"});
        CHECK(r.code == 0);
        CHECK(nlohmann::json::accept(r.out));
    }
    CHECK(run({"sequences", "verify", "--print-config"}).code == 0);
}

TEST_CASE("simulate: zero data give zero snapshots") {
    const auto dir = scratch("zero");
    const auto cfg = write_json(dir, R"({"initial": "zero", "points_per_axis": 16, "t_end": 0.1, "sample_times": [0.0, 0.05, 0.1]})");
    REQUIRE(run({"simulate", "--config", cfg.string(), "--out", (dir / "out").string()}).code == 0);
    for (int i = 0; i < 3; ++i) {
        const auto u = read_chdf(dir / "out" / ("snapshot_" + std::to_string(i) + ".chdf"));
        CHECK(max_abs(u[0].values()) == 0.0);
        CHECK(max_abs(u[1].values()) == 0.0);
    }
}

TEST_CASE("simulate: the sine fixture has the hand-derived right-hand side") {
    const auto dir = scratch("sine");
    const auto cfg = write_json(dir, R"({"points_per_axis": 32, "side_length": 12.566370614359172, "t_end": 0.02})");
    REQUIRE(run({"simulate", "--config", cfg.string(), "--out", (dir / "out").string()}).code == 0);
    const auto rhs = read_chdf(dir / "out" / "rhs0.chdf");
    const auto expect = ScalarField::sample(rhs.grid_ptr(), [](std::span<const double> x) { return -0.6 * std::sin(2 * x[0]); });
    CHECK(rel_max_diff(rhs[0], expect) <= 1e-10);
    CHECK(max_abs(rhs[1].values()) <= 1e-12);
}

TEST_CASE("simulate: both formulations report their gap") {
    const auto dir = scratch("both");
    const auto cfg = write_json(dir, R"({"formulation": "both", "points_per_axis": 32, "t_end": 0.05, "sample_times": [0.025, 0.05]})");
    REQUIRE(run({"simulate", "--config", cfg.string(), "--out", (dir / "out").string()}).code == 0);
    const auto doc = nlohmann::json::parse(slurp(dir / "out" / "diagnostics.json"));
    REQUIRE(doc["cross_formulation_gap"].size() == 2);
    for (const auto& g : doc["cross_formulation_gap"]) CHECK(g.get<double>() <= 1e-10);
    CHECK(doc["samples"].size() == 2);
}

TEST_CASE("besov: zero field, single-block sequence field and library agreement") {
    const auto dir = scratch("besov");
    auto g = make_grid(2, 64, 2 * pi);
    write_chdf(dir / "zero.chdf", VectorField::zeros(g));
    auto r = run({"besov", "--field", (dir / "zero.chdf").string(), "--out", (dir / "z").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out == "besov_norm = 0\n");

    // f_3 on the box 16 pi: only block j = 3 is nonzero.
    auto big = make_grid(2, 512, 16 * pi);
    ProfileOptions lax;
    lax.enforce_boundary_decay = false;
    SequenceParams p;
    p.n = 3;
    p.profile = build_profile(0.25, 1.0 / 16, big, lax);
    write_chdf(dir / "f3.chdf", VectorField({make_f_n(p)}));
    REQUIRE(run({"besov", "--field", (dir / "f3.chdf").string(), "--out", (dir / "f").string()}).code == 0);
    std::istringstream csv(slurp(dir / "f" / "blocks.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "j,lp,weighted");
    const double peak = lp_norm(make_f_n(p), 2.0);
    while (std::getline(csv, line)) {
        const int j = std::stoi(line.substr(0, line.find(',')));
        const double lp = std::stod(line.substr(line.find(',') + 1));
        CAPTURE(j);
        if (j == 3) CHECK(lp == doctest::Approx(peak).epsilon(1e-12));
        else CHECK(lp <= 1e-10 * peak);
    }

    // Random field: printed norm equals the library call exactly.
    const auto u = dealias(random_vector_field(g, 12, 4));
    write_chdf(dir / "rand.chdf", u);
    r = run({"besov", "--field", (dir / "rand.chdf").string(), "--s", "1.5", "--p", "inf", "--r", "1", "--out",
             (dir / "r").string()});
    REQUIRE(r.code == 0);
    const auto stored = read_chdf(dir / "rand.chdf");
    const double lib = besov_norm(stored, BesovParams{1.5, std::numeric_limits<double>::infinity(), 1.0},
                                  *build_partition(stored.grid_ptr()));
    CHECK(r.out == "besov_norm = " + format_double(lib) + "\n");
}

TEST_CASE("sequences verify and export") {
    const auto dir = scratch("sequences");
    const auto cfg = write_json(dir, R"({"points_per_axis": 512, "n_list": [3]})");
    auto r = run({"sequences", "verify", "--config", cfg.string(), "--out", (dir / "v").string()});
    REQUIRE(r.code == 0);
    CHECK(slurp(dir / "v" / "sequences.csv").rfind("n,annulus_leakage,single_block_residual,", 0) == 0);
    r = run({"sequences", "export", "--config", cfg.string(), "--out", (dir / "e").string()});
    REQUIRE(r.code == 0);
    const auto f = read_chdf(dir / "e" / "f_3.chdf");
    CHECK(f.grid().spec().points_per_axis == 512);
    CHECK(fs::exists(dir / "e" / "g_3.chdf"));
}

TEST_CASE("experiment: a tiny one-dimensional run completes quickly") {
    const auto dir = scratch("experiment");
    const auto cfg = write_json(dir, R"({"dimension": 1, "s": 2.0, "n_list": [3, 4, 5], "points_per_axis": 256,
                                         "side_length": 12.566370614359172})");
    const auto start = std::chrono::steady_clock::now();
    const auto r = run({"experiment", "--config", cfg.string(), "--out", (dir / "out").string()});
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    REQUIRE(r.code == 0);
    CHECK(seconds < 60.0);
    CHECK_NOTHROW(validate_summary_json(slurp(dir / "out" / "summary.json")));
    CHECK(fs::exists(dir / "out" / "experiment.csv"));
}

TEST_CASE("convergence: ODE order and self-convergence on a small configuration") {
    cli::ConvergenceConfig c;
    c.grid.points_per_axis = 32;
    c.seeds = {1};
    c.amplitude = 1.0;
    c.levels = 2;
    c.gap_dealias = true;
    const auto result = cli::run_convergence(c);
    CHECK(result.ode_order == doctest::Approx(4.0).epsilon(0.025));
    REQUIRE(result.self_order.size() == 1);
    CHECK(result.self_order[0] == doctest::Approx(4.0).epsilon(0.075));
    CHECK(result.default_gap[0] <= 1e-12);
    CHECK_FALSE(result.budget_exceeded);
    CHECK(cli::convergence_csv(result).rfind("study,seed,level,points_per_axis,dt,value,order\node,0,0,", 0) == 0);
}

TEST_CASE("trig fixture is grid independent") {
    auto coarse = make_grid(2, 32, 2 * pi);
    auto fine = make_grid(2, 64, 2 * pi);
    const auto a = cli::trig_fixture(coarse, 7, 4, 1.0);
    const auto b = cli::trig_fixture(fine, 7, 4, 1.0);
    // Every other fine point coincides with a coarse point.
    double worst = 0.0;
    for (std::size_t i = 0; i < 32; ++i) {
        for (std::size_t j = 0; j < 32; ++j) worst = std::max(worst, std::abs(a[0].values()[i * 32 + j] - b[0].values()[2 * i * 64 + 2 * j]));
    }
    CHECK(worst <= 1e-13);
    CHECK(max_abs(a[1].values()) <= 1.0);
    CHECK(rel_max_diff(cli::trig_fixture(coarse, 7, 4, 1.0), a) == 0.0);
}
