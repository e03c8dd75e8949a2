#pragma once

#include <filesystem>
#include <string>

#include "hdch/experiment.hpp"

namespace hdch {

/// Shortest round-trip decimal form of x ("nan", "inf" and "-inf" for non-finite values).
std::string format_double(double x);

/// One row per (n, sample time):
/// n,t,delta0,residual32,residual33,separation,gn_gradfn_norm,energy_u,energy_v
std::string experiment_csv(const ExperimentReport& report);
/// Fits, per-n diagnostics and the config echo. Contains no wall-clock data,
/// so identical inputs give identical bytes.
std::string experiment_summary_json(const ExperimentReport& report);
/// Whitespace-separated columns, one block per n separated by two blank lines
/// (gnuplot "index" blocks).
std::string experiment_gnuplot(const ExperimentReport& report);
std::string experiment_timings_json(const ExperimentReport& report);

/// Throws Error when the summary lacks a required key or has a wrong type.
void validate_summary_json(const std::string& text);

struct ReportPaths {
    std::filesystem::path csv;
    std::filesystem::path summary;
    std::filesystem::path gnuplot;
    std::filesystem::path timings;
};

/// Writes experiment.csv, summary.json, series.dat and timings.json into `dir`.
/// Throws ConfigError for a report without records and IoError on write failure.
ReportPaths emit_report(const ExperimentReport& report, const std::filesystem::path& dir);

}  // namespace hdch
