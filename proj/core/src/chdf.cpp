#include "hdch/chdf.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "hdch/error.hpp"

namespace hdch {

namespace {

static_assert(std::endian::native == std::endian::little, "CHDF I/O assumes a little-endian host");

constexpr char kMagic[4] = {'C', 'H', 'D', 'F'};

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw IoError("CHDF: truncated header");
    return v;
}

}  // namespace

void write_chdf(std::ostream& out, const VectorField& u) {
    const Grid& g = u.grid();
    out.write(kMagic, sizeof kMagic);
    put<std::uint32_t>(out, kChdfVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dimension()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.points_per_axis()));
    put<double>(out, g.side_length());
    put<std::uint32_t>(out, static_cast<std::uint32_t>(u.size()));
    for (const auto& c : u.components()) {
        const auto v = c.values();
        out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size_bytes()));
    }
    if (!out) throw IoError("CHDF: write failed");
}

void write_chdf(const std::filesystem::path& path, const VectorField& u) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_chdf(out, u);
}

VectorField read_chdf(std::istream& in, double dealias_fraction) {
    char magic[4];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
        throw IoError("CHDF: bad magic");
    }
    const auto version = get<std::uint32_t>(in);
    if (version != kChdfVersion) throw IoError("CHDF: unsupported version " + std::to_string(version));
    GridSpec spec;
    spec.dimension = static_cast<int>(get<std::uint32_t>(in));
    spec.points_per_axis = static_cast<int>(get<std::uint32_t>(in));
    spec.side_length = get<double>(in);
    spec.dealias_fraction = dealias_fraction;
    const auto components = get<std::uint32_t>(in);
    if (spec.dimension < 1 || spec.dimension > 6 || components < 1 || components > 64) {
        throw IoError("CHDF: implausible header");
    }
    GridPtr grid;
    try {
        grid = Grid::create(spec);
    } catch (const ConfigError& e) {
        throw IoError(std::string("CHDF: invalid grid in header: ") + e.what());
    }
    std::vector<ScalarField> fields;
    for (std::uint32_t c = 0; c < components; ++c) {
        RealBuffer values(grid->point_count());
        const auto bytes = static_cast<std::streamsize>(values.size() * sizeof(double));
        if (!in.read(reinterpret_cast<char*>(values.data()), bytes)) throw IoError("CHDF: truncated data");
        fields.push_back(ScalarField::from_values(grid, std::move(values)));
    }
    return VectorField(std::move(fields));
}

VectorField read_chdf(const std::filesystem::path& path, double dealias_fraction) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_chdf(in, dealias_fraction);
}

}  // namespace hdch
