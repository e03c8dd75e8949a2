#pragma once

#include <filesystem>
#include <iosfwd>

#include "hdch/field.hpp"

namespace hdch {

/// Binary field container.
///
/// Layout (little-endian): magic "CHDF", u32 version, u32 dimension, u32 points
/// per axis, f64 side length, u32 component count, then each component's
/// physical values as row-major f64.
inline constexpr unsigned kChdfVersion = 1;

void write_chdf(std::ostream& out, const VectorField& u);
void write_chdf(const std::filesystem::path& path, const VectorField& u);

/// Reads a field; the grid uses `dealias_fraction` since the container does not
/// store it. Throws IoError on malformed input.
VectorField read_chdf(std::istream& in, double dealias_fraction = 2.0 / 3.0);
VectorField read_chdf(const std::filesystem::path& path, double dealias_fraction = 2.0 / 3.0);

}  // namespace hdch
