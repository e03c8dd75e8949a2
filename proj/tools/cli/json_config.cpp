#include "json_config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "hdch/error.hpp"

namespace hdch::cli {

StrictObject::StrictObject(json doc, std::string where) : doc_(std::move(doc)), where_(std::move(where)) {
    if (doc_.is_null()) doc_ = json::object();
    if (!doc_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
}

bool StrictObject::has(const std::string& key) const { return doc_.contains(key); }

const json* StrictObject::find(const std::string& key) {
    used_.insert(key);
    auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &*it;
}

void StrictObject::wrong_type(const std::string& key, const char* expected) const {
    throw ConfigError(where_ + ": key \"" + key + "\" must be " + expected);
}

double StrictObject::number(const std::string& key, double fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number()) wrong_type(key, "a number");
    return v->get<double>();
}

double StrictObject::extended(const std::string& key, double fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (v->is_number()) return v->get<double>();
    if (v->is_string() && (*v == "inf" || *v == "infinity")) return std::numeric_limits<double>::infinity();
    wrong_type(key, "a number or \"inf\"");
}

int StrictObject::integer(const std::string& key, int fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) wrong_type(key, "an integer");
    return v->get<int>();
}

bool StrictObject::boolean(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) wrong_type(key, "true or false");
    return v->get<bool>();
}

std::string StrictObject::string(const std::string& key, const std::string& fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) wrong_type(key, "a string");
    return v->get<std::string>();
}

std::vector<double> StrictObject::numbers(const std::string& key, const std::vector<double>& fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_array()) wrong_type(key, "an array of numbers");
    std::vector<double> out;
    for (const auto& x : *v) {
        if (!x.is_number()) wrong_type(key, "an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::vector<int> StrictObject::integers(const std::string& key, const std::vector<int>& fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_array()) wrong_type(key, "an array of integers");
    std::vector<int> out;
    for (const auto& x : *v) {
        if (!x.is_number_integer()) wrong_type(key, "an array of integers");
        out.push_back(x.get<int>());
    }
    return out;
}

void StrictObject::finish() const {
    std::ostringstream unknown;
    int count = 0;
    for (const auto& [key, value] : doc_.items()) {
        if (used_.count(key)) continue;
        unknown << (count++ ? ", " : "") << '"' << key << '"';
    }
    if (count) throw ConfigError(where_ + ": unknown key" + (count > 1 ? "s " : " ") + unknown.str());
}

json load_json(const std::filesystem::path& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config " + path.string() + " must hold a JSON object");
    return doc;
}

GridSpec read_grid(StrictObject& obj, const GridSpec& fallback) {
    GridSpec g;
    g.dimension = obj.integer("dimension", fallback.dimension);
    g.points_per_axis = obj.integer("points_per_axis", fallback.points_per_axis);
    g.side_length = obj.number("side_length", fallback.side_length);
    g.dealias_fraction = obj.number("dealias_fraction", fallback.dealias_fraction);
    return g;
}

json grid_to_json(const GridSpec& g) {
    return {{"dimension", g.dimension},
            {"points_per_axis", g.points_per_axis},
            {"side_length", g.side_length},
            {"dealias_fraction", g.dealias_fraction}};
}

json extended_to_json(double x) { return std::isinf(x) ? json("inf") : json(x); }

}  // namespace hdch::cli
