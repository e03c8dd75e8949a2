#include "app.hpp"

#include <cstdlib>
#include <limits>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "hdch/error.hpp"
#include "hdch/version.hpp"
#include "json_config.hpp"

namespace hdch::cli {

namespace {

double parse_extended(const std::string& text, const char* what) {
    if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("--") + what + " must be a number or inf, got \"" + text + "\"");
}

/// Flag value, then HDCH_WORKERS, then the config file.
int resolve_workers(int flag, int from_config) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("HDCH_WORKERS"); env && *env) {
        try {
            const int v = std::stoi(env);
            if (v >= 1) return v;
        } catch (const std::exception&) {
        }
        throw ConfigError(std::string("HDCH_WORKERS must be a positive integer, got \"") + env + "\"");
    }
    return from_config;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pseudospectral higher-dimensional Camassa-Holm solver and Besov-norm toolkit", "hdch"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "hdch_out";
    int verbosity = 0;
    int workers = 0;
    bool print_config = false;
    long long seed = 0;
    app.add_option("--config", config_path, "JSON config file (unknown keys are an error)");
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_flag("-v,--verbose", verbosity, "Progress messages on stderr (repeat for more)");
    app.add_option("--workers", workers, "Worker threads (overrides HDCH_WORKERS and the config)")
        ->check(CLI::PositiveNumber);
    app.add_flag("--print-config", print_config, "Print the effective config with all defaults and exit");
    app.add_option("--seed", seed, "Reserved; every computation is deterministic");

    auto* simulate = app.add_subcommand("simulate", "Integrate one trajectory and write CHDF snapshots")->fallthrough();
    auto* besov = app.add_subcommand("besov", "Besov norm and per-block table of a CHDF field")->fallthrough();
    std::string field, s_text, p_text, r_text;
    besov->add_option("--field", field, "CHDF field file");
    besov->add_option("--s", s_text, "Smoothness index s");
    besov->add_option("--p", p_text, "Integrability p (number or inf)");
    besov->add_option("--r", r_text, "Summability r (number or inf)");
    auto* sequences = app.add_subcommand("sequences", "Build and check the f_n / g_n sequences")->fallthrough();
    sequences->require_subcommand(1);
    auto* verify = sequences->add_subcommand("verify", "Write sequences.csv")->fallthrough();
    auto* exporter = sequences->add_subcommand("export", "Write f_n and g_n as CHDF")->fallthrough();
    auto* experiment = app.add_subcommand("experiment", "Run the non-uniform dependence experiment")->fallthrough();
    auto* convergence = app.add_subcommand("convergence", "Time-step and grid refinement study")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kConfigError;
    }

    RunContext ctx{out_dir, verbosity, &out, &err};
    auto emit_config = [&](const nlohmann::json& doc) {
        out << doc.dump(2) << '\n';
        return kSuccess;
    };

    try {
        const nlohmann::json doc = load_json(config_path);
        if (seed != 0 && verbosity > 0) err << "--seed is reserved and has no effect\n";
        if (*simulate) {
            const auto c = parse_simulate(doc);
            if (print_config) return emit_config(to_json(c));
            run_simulate(c, ctx);
        } else if (*besov) {
            auto c = parse_besov(doc);
            if (!field.empty()) c.field = field;
            if (!s_text.empty()) c.besov.s = parse_extended(s_text, "s");
            if (!p_text.empty()) c.besov.p = parse_extended(p_text, "p");
            if (!r_text.empty()) c.besov.r = parse_extended(r_text, "r");
            if (print_config) return emit_config(to_json(c));
            run_besov(c, ctx);
        } else if (*sequences) {
            const auto c = parse_sequences(doc);
            if (print_config) return emit_config(to_json(c));
            if (*verify) run_sequences_verify(c, ctx);
            if (*exporter) run_sequences_export(c, ctx);
        } else if (*experiment) {
            auto c = parse_experiment(doc);
            c.workers = resolve_workers(workers, c.workers);
            if (print_config) return emit_config(to_json(c));
            run_experiment_command(c, ctx);
        } else if (*convergence) {
            const auto c = parse_convergence(doc);
            if (print_config) return emit_config(to_json(c));
            run_convergence_command(c, ctx);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUnexpected;
    }
    return kSuccess;
}

}  // namespace hdch::cli
