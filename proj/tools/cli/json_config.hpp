#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "hdch/grid.hpp"

namespace hdch::cli {

using nlohmann::json;

/// Reads one flat JSON object and rejects keys nobody asked for.
///
/// Every getter records its key; finish() throws ConfigError listing the rest,
/// so a typo never silently falls back to a default.
class StrictObject {
public:
    StrictObject(json doc, std::string where);

    bool has(const std::string& key) const;
    double number(const std::string& key, double fallback);
    /// A number, or the strings "inf" / "infinity".
    double extended(const std::string& key, double fallback);
    int integer(const std::string& key, int fallback);
    bool boolean(const std::string& key, bool fallback);
    std::string string(const std::string& key, const std::string& fallback);
    std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback);
    std::vector<int> integers(const std::string& key, const std::vector<int>& fallback);

    void finish() const;

private:
    const json* find(const std::string& key);
    [[noreturn]] void wrong_type(const std::string& key, const char* expected) const;

    json doc_;
    std::string where_;
    std::set<std::string> used_;
};

/// Parses a file; an empty path yields an empty object. Throws IoError when the
/// file cannot be read and ConfigError when it is not a JSON object.
json load_json(const std::filesystem::path& path);

/// Shared grid keys: dimension, points_per_axis, side_length, dealias_fraction.
GridSpec read_grid(StrictObject& obj, const GridSpec& fallback);
json grid_to_json(const GridSpec& g);

/// inf encodes as the string "inf".
json extended_to_json(double x);

}  // namespace hdch::cli
